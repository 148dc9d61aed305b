"""Windowed estimators for the sequence-side growth conditions.

Every check returns a ConditionVerdict whose witnesses can be substituted
back into the condition (see ``replay``). Constants are reported both as
logs (``log_A`` ...) and, when finite, exponentiated (``A`` ...).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .sequence import LOG_CONVEX, SequenceError, TruncationConfig, WeightSequence, equivalent, root_power_sequence, slc_regularization
from .tail import (
    classify_levels,
    dyadic_checkpoints,
    liminf_decision,
    pairwise_drop,
    sup_trend,
    tail_rising,
    block_maxima,
    window_min,
)
from .verdict import FAILS, HOLDS, INCONCLUSIVE, ConditionVerdict, combine_any

CONDITIONS = (
    "slc",
    "mg",
    "beta1",
    "gamma1",
    "beta3",
    "rai",
    "raimixed",
    "raimixedM",
    "omega1_seq",
    "alpha0_mg_forms",
    "omega1mixed",
    "omega7_seq",
)


def _exp(x: float) -> float:
    return math.exp(x) if x < 700 else math.inf


def _status_from_trend(trend) -> str:
    if trend.bounded:
        return HOLDS
    if trend.diverging:
        return FAILS
    return INCONCLUSIVE


# ---------------------------------------------------------------- (slc)


def check_slc(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    lm = M.log_m
    d = lm[2:] + lm[:-2] - 2.0 * lm[1:-1]
    tol = 1e-9 * (1.0 + np.abs(lm[1:-1]))
    bad = np.flatnonzero(d < -tol)
    window = (1, M.P)
    margin = float(d.min())
    if bad.size:
        p = int(bad[0]) + 1
        w = {"violating_index": p, "second_difference": float(d[bad[0]])}
        return ConditionVerdict("slc", FAILS, w, margin, window, "log m not midpoint-convex")
    return ConditionVerdict("slc", HOLDS, {"min_second_difference": margin}, margin, window)


# ---------------------------------------------------------------- (mg)


def _sup_sub(name: str, values: np.ndarray, index: np.ndarray, cfg: TruncationConfig, window) -> ConditionVerdict:
    tr = sup_trend(values, cfg.margin)
    status = _status_from_trend(tr)
    w = {"log_sup": tr.observed, "log_bound": tr.estimate, "trend": tr.trend}
    if status == HOLDS:
        w["bound"] = _exp(max(0.0, tr.estimate))
    if status == FAILS:
        k = int(np.argmax(values))
        w["violating_index"] = int(index[k])
        w["violating_log_value"] = float(values[k])
    margin = max(0.0, tr.estimate) - tr.observed if status == HOLDS else math.nan
    return ConditionVerdict(name, status, w, margin, window)


def mg_profiles(M: WeightSequence) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """The four (mg) reformulations as (index, log-value) profiles whose sup must be finite."""
    P, lM, lmu = M.P, M.log_M, M.log_mu
    h = np.arange(1, P // 2 + 1)
    n = np.arange(2, P + 1)
    p = np.arange(1, P + 1)
    # log-convexity makes the balanced split the worst case in M_{p+q} <= C^{p+q} M_p M_q
    return {
        "i": (n, (lM[n] - lM[n // 2] - lM[n - n // 2]) / n),
        "ii": (h, (lM[2 * h] - 2.0 * lM[h]) / (2 * h)),
        "iii": (h, lmu[2 * h] - lmu[h]),
        "iv": (p, lmu[p] - M.log_root[p]),
    }


MG_MIN_DISTINCT = 4  # distinct quotient values needed in the window to certify (mg)


def check_mg(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    window = cfg.window(M.P)
    subs = {k: _sup_sub(f"mg_{k}", v, idx, cfg, window) for k, (idx, v) in mg_profiles(M).items()}
    main = subs["iii"]
    conclusive = {k: s.status for k, s in subs.items() if s.conclusive}
    agree = len(set(conclusive.values())) <= 1
    w = {
        "ratio_sup": _exp(main.witnesses["log_sup"]),
        "log_ratio_bound": main.witnesses["log_bound"],
        "sub_status": {k: s.status for k, s in subs.items()},
        "A_ii": subs["ii"].witnesses.get("bound"),
        "A_iv": subs["iv"].witnesses.get("bound"),
        "C_i": subs["i"].witnesses.get("bound"),
        "sub_agreement": agree,
    }
    if main.fails:
        w["violating_index"] = main.witnesses["violating_index"]
        w["violating_ratio"] = _exp(main.witnesses["violating_log_value"])
    notes = "" if agree else "conclusive reformulations disagree"
    status = main.status
    lo, hi = window
    if status == HOLDS and np.unique(M.log_mu[lo : hi + 1]).size < MG_MIN_DISTINCT:
        # quotients (nearly) flat across the window: the next jump is unconstrained by the data
        status = INCONCLUSIVE
        notes = "too few distinct quotients in the window; bounded ratio not certifiable"
    return ConditionVerdict("mg", status, w, main.margin, window, notes)


# ---------------------------------------------------------------- liminf conditions


def _liminf_check(cid: str, vals: np.ndarray, p: np.ndarray, outer: int, threshold: float, cfg: TruncationConfig):
    """vals[i] is the log of the ratio at index p[i]; outer index = outer * p."""
    wm = window_min(vals, 0, vals.size - 1)
    decision = liminf_decision(wm, threshold, cfg.margin, cfg.eps)
    i_full, i_last = wm.argmin, wm.last_quarter_argmin
    w = {
        "log_liminf": wm.full_min,
        "liminf_ratio": _exp(wm.full_min),
        "last_quarter_ratio": _exp(wm.last_quarter_min),
        "argmin_index": int(p[i_full]),
    }
    margin = wm.full_min - threshold
    if decision == FAILS:
        w["violating_index"] = int(p[i_last])
        w["violating_ratio"] = _exp(float(vals[i_last]))
    return ConditionVerdict(cid, decision, w, margin, (int(p[0]) * outer, int(p[-1]) * outer))


def _outer_window(P: int, factor: int, cfg: TruncationConfig) -> np.ndarray:
    lo, hi = cfg.window(P)
    return np.arange(max(1, math.ceil(lo / factor)), hi // factor + 1)


def _quotient_ratio_verdict(cid: str, M: WeightSequence, cfg: TruncationConfig, thr_of_Q) -> ConditionVerdict:
    parts = []
    for Q in range(2, cfg.Q_max + 1):
        p = _outer_window(M.P, Q, cfg)
        if p.size < 4:
            break
        vals = M.log_mu[Q * p] - M.log_mu[p]
        parts.append((Q, _liminf_check(cid, vals, p, Q, thr_of_Q(Q), cfg)))
    if not parts:
        return ConditionVerdict(cid, INCONCLUSIVE, {}, math.nan, cfg.window(M.P), "window too short")
    return combine_any(cid, parts, "Q", cfg.window(M.P))


def check_beta1(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """liminf mu_{Qp}/mu_p > Q for some Q."""
    return _quotient_ratio_verdict("beta1", M, cfg, math.log)


def check_beta3(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """liminf mu_{Qp}/mu_p > 1 for some Q."""
    v = _quotient_ratio_verdict("beta3", M, cfg, lambda Q: 0.0)
    blocks = beta3_block_witnesses(M)
    if blocks:
        w = dict(v.witnesses)
        w["block_witnesses"] = blocks
        v = ConditionVerdict(v.condition_id, v.status, w, v.margin, v.window, v.notes)
    return v


def beta3_block_witnesses(M: WeightSequence) -> list[dict]:
    """For block sequences: the ratio mu_{Q a_j}/mu_{a_j} at every 2 <= Q <= j with Q a_j <= P."""
    a = M.meta.get("a")
    if not a:
        return []
    out = []
    for j in range(2, len(a) + 1):
        aj = a[j - 1]
        for Q in range(2, j + 1):
            if Q * aj <= M.P:
                r = float(M.log_mu[Q * aj] - M.log_mu[aj])
                out.append({"Q": Q, "j": j, "a_j": aj, "ratio": math.exp(r)})
    return out


def check_omega1_seq(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """liminf (M_{Lp})^{1/(Lp)} / (M_p)^{1/p} > 1 for some L; also yields (h, A)."""
    R = M.log_root
    parts = []
    for L in range(2, cfg.L_max + 1):
        p = _outer_window(M.P, L, cfg)
        if p.size < 4:
            break
        vals = R[L * p] - R[p]
        v = _liminf_check("omega1_seq", vals, p, L, 0.0, cfg)
        if v.holds:
            log_h = 0.5 * v.witnesses["log_liminf"]
            q = np.arange(0, M.P // L + 1)
            log_A = float(max(0.0, np.max(L * M.log_M[q] + L * q * log_h - M.log_M[L * q])))
            w = dict(v.witnesses)
            w.update(h=math.exp(log_h), log_h=log_h, log_A=log_A, A=_exp(log_A), all_ratios_min=_exp(float(vals.min())))
            v = ConditionVerdict(v.condition_id, v.status, w, v.margin, v.window)
        parts.append((L, v))
    if not parts:
        return ConditionVerdict("omega1_seq", INCONCLUSIVE, {}, math.nan, cfg.window(M.P), "window too short")
    return combine_any("omega1_seq", parts, "L", cfg.window(M.P))


def root_ratio_profile(M: WeightSequence, L: int, p_min: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(p, (M_{Lp})^{1/(Lp)}/(M_p)^{1/p}) for p_min <= p <= P/L."""
    p = np.arange(max(1, p_min), M.P // L + 1)
    return p, np.exp(M.log_root[L * p] - M.log_root[p])


# ---------------------------------------------------------------- (gamma_1)


def gamma1_profile(M: WeightSequence, T: int | None = None) -> np.ndarray:
    """out[p-1] = (mu_p/p) * sum_{k=p..T} 1/mu_k for p = 1..T."""
    T = M.P if T is None else T
    neg = -M.log_mu[1 : T + 1]
    suffix = np.logaddexp.accumulate(neg[::-1])[::-1]
    p = np.arange(1, T + 1)
    return np.exp(M.log_mu[1 : T + 1] - np.log(p) + suffix)


def check_gamma1(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """Windowed (gamma_1): sup over p <= T/2 of the partial-sum profile, tracked as T doubles.

    A bounded profile only certifies holds-on-window: the tail beyond P is unknown.
    """
    checkpoints = [T for T in dyadic_checkpoints(M.P, 4) if T >= 8]
    if len(checkpoints) < 2:
        return ConditionVerdict("gamma1", INCONCLUSIVE, {}, math.nan, (1, M.P), "truncation too small")
    levels = []
    for T in checkpoints:
        prof = gamma1_profile(M, T)
        levels.append(float(np.log(prof[: T // 2].max())))
    tr = classify_levels(levels, cfg.margin)
    w = {"log_levels": levels, "truncations": checkpoints, "sup": _exp(tr.observed), "trend": tr.trend}
    if tr.bounded:
        w["C"] = _exp(tr.estimate)
        w["holds_on_window"] = True
        return ConditionVerdict("gamma1", HOLDS, w, tr.estimate - tr.observed, (1, M.P), "holds-on-window: sum beyond P not certified")
    if tr.diverging:
        w["violating_index"] = 1
        w["violating_truncation"] = checkpoints[-1]
        return ConditionVerdict("gamma1", FAILS, w, math.nan, (1, M.P), "partial sums grow with truncation")
    return ConditionVerdict("gamma1", INCONCLUSIVE, w, math.nan, (1, M.P), "sup still rising at truncation")


# ---------------------------------------------------------------- root almost increasing family


def drawdown(v: np.ndarray, C: int) -> np.ndarray:
    """out[q] = max_{1<=p<=q/C} v[p] - v[q] for q >= C (v indexed from 0, index 0 unused); -inf below C."""
    n = v.size - 1
    pmax = np.maximum.accumulate(np.concatenate(([-np.inf], v[1:])))
    out = np.full(n + 1, -np.inf)
    q = np.arange(C, n + 1)
    out[q] = pmax[q // C] - v[q]
    return out


def _mu_tail(M: WeightSequence, cfg: TruncationConfig) -> list[float] | None:
    """Tail drops of mu_p / p per dyadic ratio (see tail_lambda_levels); only meaningful for monotone mu."""
    if LOG_CONVEX not in M.flags:
        return None
    return tail_lambda_levels(M.log_mu, M.log_mu, 1, cfg.lambda_max, M.P)


def _drawdown_verdict(cid: str, v: np.ndarray, C: int, cfg: TruncationConfig, window,
                      tail: list[float] | None = None) -> ConditionVerdict:
    """sup over 1 <= p, q <= P with q >= C p of v_p - v_q bounded.

    ``tail``: drops of mu_p / p beyond the head; a steady rise there blocks a "holds".
    """
    n = v.size - 1
    dd = drawdown(v, C)
    run = np.maximum.accumulate(dd)
    checkpoints = dyadic_checkpoints(n, 4, start=C)
    levels = [float(run[k]) for k in checkpoints]
    tr = classify_levels(levels, cfg.margin)
    if tail_rising(block_maxima(dd[1:], 4)):
        trend, status = "diverging", FAILS
    else:
        trend, status = tr.trend, _status_from_trend(tr)
    val, p, q = pairwise_drop(v, n, C)
    w = {"C": C, "log_sup": val, "argmax_pair": [p, q], "trend": trend, "log_levels": levels}
    if tail is not None:
        w["tail_levels"] = tail
        if status == HOLDS and tail_levels_rising(tail):
            status = INCONCLUSIVE
    margin = math.nan
    if status == HOLDS:
        log_A = max(0.0, tr.estimate)
        w.update(log_A=log_A, A=_exp(log_A))
        margin = log_A - val
    elif status == FAILS:
        w["violating_index"] = [p, q]
    return ConditionVerdict(cid, status, w, margin, window)


def check_rai(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """(m_p)^{1/p} <= A (m_q)^{1/q} for all p <= q."""
    return _drawdown_verdict("rai", M.log_m_root, 1, cfg, (1, M.P), _mu_tail(M, cfg))


def check_raimixed(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """Truncated rai: only q >= C p; smallest C (<= L_max) with a bounded sup."""
    parts = []
    tail = _mu_tail(M, cfg)
    for C in range(1, cfg.L_max + 1):
        if M.P // C < 16:
            break
        v = _drawdown_verdict("raimixed", M.log_m_root, C, cfg, (1, M.P), tail)
        parts.append((C, v))
        if v.holds:
            break
    return combine_any("raimixed", parts, "C", (1, M.P))


def _lambda_table(a: np.ndarray, b: np.ndarray, C: int, lam_max: int, P: int, log_lambda: bool = True):
    """Rows (lam, q, value) with value = log lam + a[p] - b[lam C p], q = lam C p <= P."""
    lams, qs, vals = [], [], []
    for lam in range(1, lam_max + 1):
        pmax = P // (lam * C)
        if pmax < 1:
            break
        p = np.arange(1, pmax + 1)
        q = lam * C * p
        lams.append(np.full(p.size, lam))
        qs.append(q)
        vals.append((math.log(lam) if log_lambda else 0.0) + a[p] - b[q])
    return np.concatenate(lams), np.concatenate(qs), np.concatenate(vals)


def _two_axis_sup(lams, qs, vals, P: int, lam_max: int, cfg: TruncationConfig):
    """Classify sup of vals along dyadic q checkpoints and dyadic lambda levels."""
    q_checks = dyadic_checkpoints(P, 4)
    q_levels = [float(vals[qs <= n].max()) if np.any(qs <= n) else -math.inf for n in q_checks]
    lam_levels_pts = [2**k for k in range(int(math.log2(lam_max)) + 1) if 2**k <= lams.max()]
    lam_levels = [float(vals[lams <= L].max()) for L in lam_levels_pts]
    tq = classify_levels(q_levels, cfg.margin)
    tl = classify_levels(lam_levels, cfg.margin) if len(lam_levels) >= 2 else tq
    # block maxima along each axis catch growth hidden behind a large early value
    q_blocks = [float(vals[(qs > n // 2) & (qs <= n)].max()) for n in q_checks if np.any((qs > n // 2) & (qs <= n))]
    l_blocks = [float(vals[(lams > L // 2) & (lams <= L)].max()) for L in lam_levels_pts]
    rising = tail_rising(q_blocks) or tail_rising(l_blocks[-4:])
    return tq, tl, rising, q_levels, lam_levels


TAIL_P_MIN = 16  # tail rows start here, clear of a short irregular head
TAIL_STEP = 0.05  # per-doubling rise of the tail levels that rules out a "holds"


def tail_lambda_levels(a: np.ndarray, b: np.ndarray, C: int, lam_max: int, P: int) -> list[float]:
    """Per dyadic lam, max over TAIL_P_MIN <= p <= P/(lam C) of log lam + a[p] - b[lam C p]."""
    out = []
    lam = 1
    while lam <= lam_max and P // (lam * C) >= 2 * TAIL_P_MIN:
        p = np.arange(TAIL_P_MIN, P // (lam * C) + 1)
        out.append(float(np.max(math.log(lam) + a[p] - b[lam * C * p])))
        lam *= 2
    return out


def tail_levels_rising(levels: list[float]) -> bool:
    """Three trailing per-doubling steps, each at least TAIL_STEP."""
    d = np.diff(levels)
    return d.size >= 3 and bool(np.all(d[-3:] >= TAIL_STEP))


def _raimixedM_single(M: WeightSequence, N: WeightSequence, C: int, cfg: TruncationConfig, cid: str) -> ConditionVerdict:
    P = min(M.P, N.P)
    lams, qs, vals = _lambda_table(M.log_root, N.log_root, C, cfg.lambda_max, P)
    tq, tl, rising, ql, ll = _two_axis_sup(lams, qs, vals, P, cfg.lambda_max, cfg)
    k = int(np.argmax(vals))
    w = {"C": C, "log_sup": float(vals[k]), "argmax": [int(lams[k]), int(qs[k] // (lams[k] * C))],
         "trend_q": tq.trend, "trend_lambda": tl.trend, "log_levels_q": ql, "log_levels_lambda": ll}
    if rising or tq.diverging or tl.diverging:
        w["violating_index"] = w["argmax"]
        return ConditionVerdict(cid, FAILS, w, math.nan, (1, P), "sup grows along lambda or p")
    # the root form averages over the head; the quotients show the tail growth in lambda directly
    # (the slope in lambda does not depend on C, so C = 1 keeps the most rows)
    tail = tail_lambda_levels(M.log_mu, N.log_mu, 1, cfg.lambda_max, P)
    w["tail_levels_lambda"] = tail
    if tq.bounded and tl.bounded and not tail_levels_rising(tail):
        log_B = max(0.0, tq.estimate, tl.estimate)
        w.update(log_B=log_B, B=_exp(log_B))
        return ConditionVerdict(cid, HOLDS, w, log_B - float(vals[k]), (1, P))
    return ConditionVerdict(cid, INCONCLUSIVE, w, math.nan, (1, P), "sup still rising at truncation")


def check_raimixedM(M: WeightSequence, cfg: TruncationConfig, C_values=None) -> ConditionVerdict:
    """(M_p)^{1/p} lambda <= B (M_{lambda C p})^{1/(lambda C p)} for all lambda <= lambda_max."""
    parts = []
    for C in C_values or range(1, cfg.L_max + 1):
        if M.P // C < 16:
            break
        v = _raimixedM_single(M, M, C, cfg, "raimixedM")
        parts.append((C, v))
        if v.holds:
            break
    return combine_any("raimixedM", parts, "C", (1, M.P))


def check_mu_form(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """mu_p lambda <= B mu_{lambda p}."""
    lams, qs, vals = _lambda_table(M.log_mu, M.log_mu, 1, cfg.lambda_max, M.P)
    tq, tl, rising, ql, ll = _two_axis_sup(lams, qs, vals, M.P, cfg.lambda_max, cfg)
    k = int(np.argmax(vals))
    w = {"log_sup": float(vals[k]), "argmax": [int(lams[k]), int(qs[k] // lams[k])], "trend_q": tq.trend, "trend_lambda": tl.trend}
    if rising or tq.diverging or tl.diverging:
        w["violating_index"] = w["argmax"]
        return ConditionVerdict("mu_form", FAILS, w, math.nan, (1, M.P))
    tail = tail_lambda_levels(M.log_mu, M.log_mu, 1, cfg.lambda_max, M.P)
    w["tail_levels_lambda"] = tail
    if tq.bounded and tl.bounded and not tail_levels_rising(tail):
        log_B = max(0.0, tq.estimate, tl.estimate)
        w.update(log_B=log_B, B=_exp(log_B))
        return ConditionVerdict("mu_form", HOLDS, w, log_B - w["log_sup"], (1, M.P))
    return ConditionVerdict("mu_form", INCONCLUSIVE, w, math.nan, (1, M.P))


def check_mu_over_p(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """mu_p / p almost increasing."""
    v = M.log_mu - np.log(np.maximum(np.arange(M.P + 1), 1))
    out = _drawdown_verdict("mu_over_p", v, 1, cfg, (1, M.P), _mu_tail(M, cfg))
    return out


def check_slc_equivalent(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """M is equivalent to a strongly log-convex S (tested with the sigma-regularization)."""
    S = slc_regularization(M)
    eq = equivalent(M, S, cfg)
    slc = check_slc(S, cfg)
    w = {"equivalence": eq.to_dict(), "S_slc": slc.status, "S_label": S.label}
    if eq.holds and slc.holds:
        return ConditionVerdict("slc_equivalent", HOLDS, w, eq.margin, eq.window)
    if eq.fails:
        return ConditionVerdict("slc_equivalent", FAILS, w, math.nan, eq.window, "regularization not equivalent")
    return ConditionVerdict("slc_equivalent", INCONCLUSIVE, w, math.nan, eq.window)


def check_alpha0_mg_forms(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """The moderate-growth reformulations of (alpha_0): root form, quotient form, mu_p/p and rai."""
    mg = check_mg(M, cfg)
    subs = {
        "root_form": check_raimixedM(M, cfg, C_values=[1]),
        "mu_form": check_mu_form(M, cfg),
        "mu_over_p": check_mu_over_p(M, cfg),
        "rai": check_rai(M, cfg),
    }
    statuses = {k: v.status for k, v in subs.items()}
    conclusive = {s for s in statuses.values() if s != INCONCLUSIVE}
    agree = len(conclusive) <= 1
    status = conclusive.pop() if len(conclusive) == 1 else INCONCLUSIVE
    w = {"sub_status": statuses, "sub_agreement": agree, "mg": mg.status}
    for k, v in subs.items():
        for key in ("A", "B", "log_A", "log_B", "violating_index"):
            if key in v.witnesses:
                w[f"{k}.{key}"] = v.witnesses[key]
    if status == FAILS and "violating_index" not in w:
        w["violating_index"] = next(v.witnesses.get("violating_index") for v in subs.values() if v.fails)
    notes = []
    if not mg.holds:
        notes.append("conditional: (mg) not certified, equivalence of forms not asserted")
    if not agree:
        notes.append("conclusive forms disagree")
    return ConditionVerdict("alpha0_mg_forms", status, w, math.nan, cfg.window(M.P), "; ".join(notes))


# ---------------------------------------------------------------- mixed (alpha_1) form


def _omega1mixed_single(M: WeightSequence, N: WeightSequence, C: int, cfg: TruncationConfig) -> ConditionVerdict:
    uniform = _raimixedM_single(M, N, C, cfg, "omega1mixed")
    if uniform.holds:
        # a lambda-uniform bound is the special case D = 1
        w = dict(uniform.witnesses)
        w["D_lambda"] = {}
        return ConditionVerdict("omega1mixed", HOLDS, w, uniform.margin, uniform.window, "uniform bound, D = 1")
    P = min(M.P, N.P)
    lam_pts, logB, logD = [], [], {}
    for lam in range(1, cfg.lambda_max + 1):
        pmax = P // (lam * C)
        if pmax < 16:
            break
        p = np.arange(1, pmax + 1)
        f = math.log(lam) + M.log_root[p] - N.log_root[lam * C * p]
        tail = f[pmax // 2 :]
        b = float(tail.max())
        lam_pts.append(lam)
        logB.append(b)
        logD[lam] = float(max(0.0, np.max(p * (f - b))))
    if len(lam_pts) < 4:
        return ConditionVerdict("omega1mixed", INCONCLUSIVE, {"C": C}, math.nan, (1, P), "too few lambda with a p-tail")
    dy = [L for L in (2**k for k in range(8)) if L <= lam_pts[-1]]
    run = np.maximum.accumulate(logB)
    levels = [float(run[L - 1]) for L in dy]
    tr = classify_levels(levels, cfg.margin)
    w = {"C": C, "log_B_lambda": dict(zip(lam_pts, logB)), "D_lambda": {k: _exp(v) for k, v in logD.items()}, "trend": tr.trend}
    if tr.bounded:
        log_B = max(0.0, tr.estimate)
        w.update(log_B=log_B, B=_exp(log_B))
        return ConditionVerdict("omega1mixed", HOLDS, w, log_B - float(run[-1]), (1, P))
    if tr.diverging or tail_rising(block_maxima(np.asarray(logB), 4)):
        w["violating_index"] = int(lam_pts[int(np.argmax(logB))])
        return ConditionVerdict("omega1mixed", FAILS, w, math.nan, (1, P), "tail constant grows with lambda")
    return ConditionVerdict("omega1mixed", INCONCLUSIVE, w, math.nan, (1, P))


def check_omega1mixed(M: WeightSequence, N: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """(M_p)^{1/p} lambda <= B D_lambda^{1/p} (N_{lambda C p})^{1/(lambda C p)} with lambda-uniform B."""
    parts = []
    for C in range(1, cfg.L_max + 1):
        if min(M.P, N.P) // C < 16:
            break
        v = _omega1mixed_single(M, N, C, cfg)
        parts.append((C, v))
        if v.holds:
            break
    return combine_any("omega1mixed", parts, "C", (1, min(M.P, N.P)))


# ---------------------------------------------------------------- (omega_7) on the sequence side


OMEGA7_MIN_FRACTION = 4  # the p-window for a given L must cover at least P/4 indices


def check_omega7_seq(M: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """(M_p)^{2L} <= A B^p M_{Lp} for some L >= 2."""
    parts = []
    for L in range(2, cfg.L_max + 1):
        pmax = M.P // L
        # large L leaves a short window in which slowly turning tails look bounded
        if pmax < max(16, M.P // OMEGA7_MIN_FRACTION):
            break
        p = np.arange(1, pmax + 1)
        g = 2 * L * M.log_M[p] - M.log_M[L * p]
        slope = g / p
        tr = sup_trend(slope, cfg.margin)
        w = {"L": L, "log_slope_sup": tr.observed, "trend": tr.trend}
        if tr.bounded:
            lo = pmax // 2
            log_B = max(0.0, float(slope[lo:].max()), tr.estimate if tr.trend == "converging" else 0.0)
            log_A = float(max(0.0, np.max(g - p * log_B)))
            w.update(log_A=log_A, log_B=log_B, A=_exp(log_A), B=_exp(log_B))
            v = ConditionVerdict("omega7_seq", HOLDS, w, 0.0, (1, pmax))
        elif tr.diverging:
            k = int(np.argmax(slope))
            w["violating_index"] = int(p[k])
            v = ConditionVerdict("omega7_seq", FAILS, w, math.nan, (1, pmax))
        else:
            v = ConditionVerdict("omega7_seq", INCONCLUSIVE, w, math.nan, (1, pmax))
        parts.append((L, v))
        if v.holds:
            break
    if not parts:
        return ConditionVerdict("omega7_seq", INCONCLUSIVE, {}, math.nan, (1, M.P), "truncation too small")
    return combine_any("omega7_seq", parts, "L", (1, M.P))


# ---------------------------------------------------------------- L^C bridge


def check_raimixed_via_LC(M: WeightSequence, cfg: TruncationConfig, C: int = 2) -> ConditionVerdict:
    """(m_p)^{1/p} <= B (l^C_q)^{1/q} for p <= q, evaluated with the auxiliary sequence L^C."""
    L = root_power_sequence(M, C)
    n = L.P
    a = M.log_m_root[: n + 1]
    b = L.log_m_root
    amax = np.maximum.accumulate(np.concatenate(([-np.inf], a[1:])))
    gap = amax[1:] - b[1:]  # max_{p<=q} a_p - b_q at each q
    run = np.maximum.accumulate(gap)
    levels = [float(run[k - 1]) for k in dyadic_checkpoints(n, 4)]
    tr = classify_levels(levels, cfg.margin)
    w = {"C": C, "log_sup": float(run[-1]), "trend": tr.trend}
    if tail_rising(block_maxima(gap, 4)) or tr.diverging:
        return ConditionVerdict("raimixed_LC", FAILS, dict(w, violating_index=int(np.argmax(gap)) + 1), math.nan, (1, n))
    if tr.bounded:
        log_B = max(0.0, tr.estimate)
        return ConditionVerdict("raimixed_LC", HOLDS, dict(w, log_B=log_B, B=_exp(log_B)), log_B - float(run[-1]), (1, n))
    return ConditionVerdict("raimixed_LC", INCONCLUSIVE, w, math.nan, (1, n))


# ---------------------------------------------------------------- dispatch and replay


_SINGLE = {
    "slc": check_slc,
    "mg": check_mg,
    "beta1": check_beta1,
    "gamma1": check_gamma1,
    "beta3": check_beta3,
    "rai": check_rai,
    "raimixed": check_raimixed,
    "raimixedM": check_raimixedM,
    "omega1_seq": check_omega1_seq,
    "alpha0_mg_forms": check_alpha0_mg_forms,
    "omega7_seq": check_omega7_seq,
}


def check(condition_id: str, M: WeightSequence, cfg: TruncationConfig, N: WeightSequence | None = None) -> ConditionVerdict:
    if condition_id == "omega1mixed":
        return check_omega1mixed(M, M if N is None else N, cfg)
    try:
        fn = _SINGLE[condition_id]
    except KeyError:
        raise SequenceError(f"unknown condition {condition_id!r}; known: {', '.join(CONDITIONS)}") from None
    return fn(M, cfg)


def replay(v: ConditionVerdict, M: WeightSequence, cfg: TruncationConfig, N: WeightSequence | None = None) -> bool:
    """Substitute a holding verdict's witnesses into its inequality and re-check within eps."""
    if not v.holds:
        raise ValueError("only holding verdicts carry a full witness set")
    w, tol = v.witnesses, cfg.eps
    cid = v.condition_id
    if cid == "mg":
        h = np.arange(1, M.P // 2 + 1)
        return bool(np.all(M.log_mu[2 * h] - M.log_mu[h] <= w["log_ratio_bound"] + tol))
    if cid in ("rai", "raimixed"):
        C = w.get("C", 1)
        dd = drawdown(M.log_m_root, C)
        return bool(dd.max() <= w["log_A"] + tol)
    if cid == "raimixedM":
        _, _, vals = _lambda_table(M.log_root, M.log_root, w["C"], cfg.lambda_max, M.P)
        return bool(vals.max() <= w["log_B"] + tol)
    if cid in ("beta1", "beta3"):
        Q = w["Q"]
        p = _outer_window(M.P, Q, cfg)
        thr = math.log(Q) if cid == "beta1" else 0.0
        vals = M.log_mu[Q * p] - M.log_mu[p]
        return bool(np.all(vals >= w["log_liminf"] - tol) and w["log_liminf"] > thr)
    if cid == "omega1_seq":
        L = w["L"]
        q = np.arange(0, M.P // L + 1)
        lhs = L * M.log_M[q] + L * q * w["log_h"]
        return bool(w["log_h"] > 0 and np.all(lhs <= w["log_A"] + M.log_M[L * q] + tol * (1 + np.abs(lhs))))
    if cid == "omega7_seq":
        L = w["L"]
        p = np.arange(0, M.P // L + 1)
        lhs = 2 * L * M.log_M[p]
        return bool(np.all(lhs <= w["log_A"] + p * w["log_B"] + M.log_M[L * p] + tol * (1 + np.abs(lhs))))
    if cid == "omega1mixed":
        N = M if N is None else N
        P = min(M.P, N.P)
        C = w["C"]
        if not w.get("D_lambda"):
            _, _, vals = _lambda_table(M.log_root, N.log_root, C, cfg.lambda_max, P)
            return bool(vals.max() <= w["log_B"] + tol)
        ok = True
        for lam, D in w["D_lambda"].items():
            lam = int(lam)
            p = np.arange(1, P // (lam * C) + 1)
            f = math.log(lam) + M.log_root[p] - N.log_root[lam * C * p]
            ok &= bool(np.all(f <= w["log_B"] + math.log(D) / p + tol))
        return ok
    if cid == "slc":
        return check_slc(M, cfg).holds
    if cid == "gamma1":
        return bool(math.log(gamma1_profile(M)[: M.P // 2].max()) <= math.log(w["C"]) + tol)
    raise ValueError(f"no replay rule for {cid}")
