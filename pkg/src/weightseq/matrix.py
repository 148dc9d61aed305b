"""The weight matrix {W^(l)} associated with a weight function and its identities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .associated import omega_M
from .conditions import check_raimixed
from .sequence import LOG_CONVEX, NORMALIZED, SequenceError, TruncationConfig, WeightSequence, equivalent
from .tail import sup_trend
from .verdict import FAILS, HOLDS, INCONCLUSIVE, ConditionVerdict
from .weightfn import WeightFunction, phi_star_domain

DEFAULT_L_GRID = (0.25, 0.5, 1.0, 2.0, 3.0, 4.0)
LC_TOL = 1e-7
IDENTITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    l_grid: tuple[float, ...]
    rows: dict  # l -> WeightSequence with log W^(l)_p = phi*(l p) / l
    source: WeightFunction
    notes: dict = field(default_factory=dict)

    def row(self, l: float) -> WeightSequence:
        try:
            return self.rows[float(l)]
        except KeyError:
            raise SequenceError(f"no row l = {l}; grid is {list(self.l_grid)}") from None

    def to_dict(self) -> dict:
        return {
            "schema": "weightseq.matrix/1",
            "source": self.source.family_tag,
            "l_grid": list(self.l_grid),
            "rows": {f"{l:g}": self.rows[l].log_M.tolist() for l in self.l_grid},
            "notes": {f"{k:g}": v for k, v in self.notes.items()},
        }


def build_matrix(w: WeightFunction, l_grid=DEFAULT_L_GRID, P: int = 200) -> WeightMatrix:
    """Rows up to P, each cut where phi*(l p) would need omega beyond its domain."""
    grid = tuple(sorted(float(l) for l in l_grid))
    if not grid or grid[0] <= 0:
        raise ValueError("l_grid must contain positive values")
    rows, notes = {}, {}
    for l in grid:
        p = np.arange(P + 1, dtype=float)
        xs, vals = phi_star_domain(w, l * p)
        n = xs.size - 1
        if n < 2:
            raise SequenceError(f"row l = {l:g}: domain exhausted before p = 2")
        log_W = vals / l
        log_W[0] = 0.0
        log_mu = np.diff(log_W)
        # log-convexity of each row, up to rounding in phi*
        d = np.diff(log_mu)
        if d.size and d.min() < -LC_TOL * max(1.0, float(np.abs(log_mu).max())):
            raise SequenceError(f"row l = {l:g} is not log-convex (min increment {d.min():.3g})")
        log_mu = np.maximum.accumulate(log_mu)
        rows[l] = WeightSequence(
            np.concatenate(([0.0], log_mu)), f"W^({l:g})[{w.family_tag}]", frozenset((LOG_CONVEX, NORMALIZED)), {"l": l}
        )
        if n < P:
            notes[l] = f"truncated at p = {n} (domain)"
    return WeightMatrix(grid, rows, w, notes)


def _source_sequence(Mx: WeightMatrix) -> WeightSequence:
    if Mx.source.sequence is None:
        raise SequenceError("identity needs a sequence-backed matrix")
    return Mx.source.sequence


def _integer(l: float) -> bool:
    return float(l).is_integer()


def _tol(scale) -> float:
    """Absolute 1e-6, relaxed to relative 1e-10 for very large log values."""
    return max(IDENTITY_TOL, 1e-10 * abs(float(scale)))


def _max_abs(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if len(a) else 0.0


def row_fixpoint(Mx: WeightMatrix, p_max: int | None = None) -> ConditionVerdict:
    """log W^(1)_p = log M_p."""
    M = _source_sequence(Mx)
    W = Mx.row(1.0)
    n = min(W.P, M.P) if p_max is None else min(p_max, W.P, M.P)
    err = _max_abs(W.log_M[: n + 1], M.log_M[: n + 1])
    st = HOLDS if err <= _tol(M.log_M[n]) else FAILS
    return ConditionVerdict("row_fixpoint", st, {"max_abs_err": err, "p_max": n}, IDENTITY_TOL - err, (0, n))


def transform_identity(Mx: WeightMatrix, l: float, p_max: int | None = None) -> ConditionVerdict:
    """log W^(l)_p = (1/l) log M_{l p} for integer l."""
    if not _integer(l):
        raise ValueError("transform identity is stated for integer l")
    M = _source_sequence(Mx)
    W = Mx.row(l)
    L = int(l)
    n = min(W.P, M.P // L) if p_max is None else min(p_max, W.P, M.P // L)
    p = np.arange(n + 1)
    err = _max_abs(W.log_M[p], M.log_M[L * p] / L)
    st = HOLDS if err <= _tol(W.log_M[n]) else FAILS
    return ConditionVerdict("transform", st, {"l": l, "max_abs_err": err, "p_max": n}, IDENTITY_TOL - err, (0, n))


def transform_identity_general(Mx: WeightMatrix, l: float, C: int) -> ConditionVerdict:
    """log W^(l C)_p = (1/C) log W^(l)_{C p}."""
    A, B = Mx.row(l * C), Mx.row(l)
    n = min(A.P, B.P // C)
    p = np.arange(n + 1)
    err = _max_abs(A.log_M[p], B.log_M[C * p] / C)
    st = HOLDS if err <= _tol(A.log_M[n]) else FAILS
    return ConditionVerdict("transform_general", st, {"l": l, "C": C, "max_abs_err": err, "p_max": n}, IDENTITY_TOL - err, (0, n))


def mixed_moderate_growth(Mx: WeightMatrix, l: float, n_max: int = 100) -> ConditionVerdict:
    """W^(l)_{p+q} <= W^(2l)_p W^(2l)_q for p + q <= n_max (where both rows are defined)."""
    A, B = Mx.row(l), Mx.row(2 * l)
    n = min(n_max, A.P, B.P)
    p, q = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    mask = p + q <= n
    excess = np.where(mask, A.log_M[np.minimum(p + q, n)] - B.log_M[p] - B.log_M[q], -np.inf)
    i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
    worst = float(excess[i, j])
    tol = _tol(A.log_M[n])
    wit = {"l": l, "n_max": n, "max_log_excess": worst, "argmax": [int(i), int(j)]}
    if worst <= tol:
        return ConditionVerdict("mixed_mg", HOLDS, wit, -worst, (0, n))
    wit["violating_index"] = [int(i), int(j)]
    return ConditionVerdict("mixed_mg", FAILS, wit, -worst, (0, n))


def sandwich(Mx: WeightMatrix, x: float, cfg: TruncationConfig, points: int = 400) -> ConditionVerdict:
    """x omega_{W^(x)} <= omega_M <= 2x omega_{W^(x)} + D_x on a common t-grid."""
    M = _source_sequence(Mx)
    W = Mx.row(x)
    t_hi = float(min(M.mu[M.P], W.mu[W.P]))
    t = np.exp(np.linspace(min(0.0, float(W.log_mu[1])) - 1.0, math.log(t_hi), points))
    t = np.minimum(t, t_hi)
    wM, wW = omega_M(M, t), omega_M(W, t)
    lower = x * wW - wM
    low_err = float(lower.max())
    defect = wM - 2 * x * wW
    tr = sup_trend(defect, cfg.margin)
    wit = {"x": x, "lower_excess": low_err, "D_x": max(0.0, tr.observed), "trend": tr.trend, "t_max": t_hi}
    window = (float(t[0]), t_hi)
    if low_err > IDENTITY_TOL * max(1.0, float(wM.max())):
        k = int(np.argmax(lower))
        wit["violating_index"] = float(t[k])
        return ConditionVerdict("sandwich", FAILS, wit, -low_err, window, "lower inequality violated")
    if tr.bounded:
        return ConditionVerdict("sandwich", HOLDS, wit, 0.0, window)
    if tr.diverging:
        wit["violating_index"] = t_hi
        return ConditionVerdict("sandwich", FAILS, wit, math.nan, window, "additive defect grows")
    return ConditionVerdict("sandwich", INCONCLUSIVE, wit, math.nan, window)


def row_ordering(Mx: WeightMatrix) -> ConditionVerdict:
    """W^(l) <= W^(n) for l <= n on the common truncation."""
    worst, where = -math.inf, None
    for a, b in zip(Mx.l_grid[:-1], Mx.l_grid[1:]):
        A, B = Mx.row(a), Mx.row(b)
        n = min(A.P, B.P)
        d = A.log_M[: n + 1] - B.log_M[: n + 1]
        k = int(np.argmax(d))
        if d[k] > worst:
            worst, where = float(d[k]), [a, b, k]
    st = HOLDS if worst <= IDENTITY_TOL else FAILS
    return ConditionVerdict("row_ordering", st, {"max_log_excess": worst, "at": where}, -worst, (0, 0))


def rows_equivalent(Mx: WeightMatrix, cfg: TruncationConfig) -> ConditionVerdict:
    """Constant matrix: all rows pairwise equivalent.

    The extreme pair suffices when it holds (the other rows lie in between);
    otherwise neighbouring pairs are tested (the relation is transitive, and
    their constants are smaller, so the windowed trends settle sooner).
    """
    lo, hi = Mx.l_grid[0], Mx.l_grid[-1]
    ext = equivalent(Mx.row(lo), Mx.row(hi), cfg)
    w = {"l": [lo, hi], "extreme": ext.witnesses}
    if ext.holds:
        return ConditionVerdict("rows_equivalent", HOLDS, w, ext.margin, ext.window)
    pairs, status, margin = [], HOLDS, math.inf
    for a, b in zip(Mx.l_grid[:-1], Mx.l_grid[1:]):
        v = equivalent(Mx.row(a), Mx.row(b), cfg)
        pairs.append({"l": [a, b], "status": v.status, "witnesses": v.witnesses})
        if v.fails:
            w.update(pairs=pairs, violating_index=[a, b])
            return ConditionVerdict("rows_equivalent", FAILS, w, math.nan, v.window)
        if v.holds:
            margin = min(margin, v.margin)
        else:
            status = INCONCLUSIVE
    w["pairs"] = pairs
    return ConditionVerdict("rows_equivalent", status, w, margin if status == HOLDS else math.nan, ext.window)


def _cross_drawdown(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """out[q] = max_{1 <= p <= q} a[p] - b[q], q = 1..n (indexed by q so the running sup tracks the truncation)."""
    return np.maximum.accumulate(a[1 : n + 1]) - b[1 : n + 1]


def _status(tr) -> str:
    return HOLDS if tr.bounded else FAILS if tr.diverging else INCONCLUSIVE


def check_matrix_rai(Mx: WeightMatrix, cfg: TruncationConfig) -> ConditionVerdict:
    """Roumieu (M_rai): for each integer x there are y, C with (m^(x)_p)^{1/p} <= C (m^(y)_q)^{1/q}, p <= q.

    Cross-checked against the truncated rai of the source sequence.
    """
    xs = [l for l in Mx.l_grid if _integer(l)]
    per_x, all_hold, any_fail = {}, True, False
    for x in xs:
        a = Mx.row(x).log_m_root
        found = None
        tried = []
        for y in [l for l in Mx.l_grid if l >= x]:
            b = Mx.row(y).log_m_root
            n = min(a.size, b.size) - 1
            if n < 16:
                continue
            tr = sup_trend(_cross_drawdown(a, b, n), cfg.margin)
            tried.append((y, tr.trend))
            if tr.bounded:
                found = {"y": y, "log_C": max(0.0, tr.estimate), "trend": tr.trend}
                break
        per_x[f"{x:g}"] = found if found else {"tried": tried}
        if found is None:
            all_hold = False
            any_fail = any_fail or (tried and all(t == "diverging" for _, t in tried))
    wit = {"per_x": per_x}
    if all_hold and xs:
        status = HOLDS
    elif any_fail:
        status = FAILS
    else:
        status = INCONCLUSIVE
    notes = ""
    if Mx.source.sequence is not None:
        base = check_raimixed(Mx.source.sequence, cfg)
        wit["raimixed_base"] = base.status
        if status != INCONCLUSIVE and base.conclusive and base.status != status:
            notes = "disagrees with raimixed of the source sequence"
            wit["agreement"] = False
        else:
            wit["agreement"] = True
    return ConditionVerdict("matrix_rai", status, wit, math.nan, (1, min(r.P for r in Mx.rows.values())), notes)


def check_newexpabsorb(Mx: WeightMatrix, cfg: TruncationConfig, h: float = 2.0) -> ConditionVerdict:
    """h^p W^(l)_p <= D W^(A l)_p: for each l, the smallest grid ratio A with a bounded log D."""
    per_l, ok = {}, True
    for l in Mx.l_grid:
        found, tried = None, []
        for m in Mx.l_grid:
            if m <= l:
                continue
            A, B = Mx.row(l), Mx.row(m)
            n = min(A.P, B.P)
            if n < 16:
                continue
            p = np.arange(1, n + 1)
            vals = p * math.log(h) + A.log_M[p] - B.log_M[p]
            tr = sup_trend(vals, cfg.margin)
            tried.append((m / l, tr.trend))
            if tr.bounded:
                found = {"A": m / l, "log_D": max(0.0, tr.observed)}
                break
        if tried:
            per_l[f"{l:g}"] = found if found else {"tried": tried}
            ok = ok and found is not None
    wit = {"h": h, "per_l": per_l, "uniform_A": max((v["A"] for v in per_l.values() if "A" in v), default=math.nan)}
    st = HOLDS if ok and per_l else INCONCLUSIVE
    return ConditionVerdict("newexpabsorb", st, wit, math.nan, (0, 0), "checked on the finite l-grid only")


def verify_identities(Mx: WeightMatrix, cfg: TruncationConfig) -> list[tuple[str, ConditionVerdict]]:
    """All structural identities available for this matrix, as labelled verdicts."""
    out = [("row_ordering", row_ordering(Mx))]
    if Mx.source.sequence is not None:
        out.append(("row_fixpoint", row_fixpoint(Mx)))
        for l in Mx.l_grid:
            if _integer(l) and l > 1:
                out.append((f"transform l={l:g}", transform_identity(Mx, l)))
    for l in Mx.l_grid:
        for C in (2, 3, 4):
            if l * C in Mx.rows:
                out.append((f"transform_general l={l:g} C={C}", transform_identity_general(Mx, l, C)))
    for l in Mx.l_grid:
        if 2 * l in Mx.rows:
            out.append((f"mixed_mg l={l:g}", mixed_moderate_growth(Mx, l)))
    if Mx.source.sequence is not None:
        for x in (1.0, 2.0):
            if x in Mx.rows:
                out.append((f"sandwich x={x:g}", sandwich(Mx, x, cfg)))
    return out
