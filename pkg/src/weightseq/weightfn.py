"""Weight functions, the Young conjugate and function-side condition estimators.

Functions are evaluated through ``phi(y) = omega(e^y)``; all grids are
geometric in t (uniform in y). The finite domain [0, t_max] is explicit and
every tail estimate reports the y-window it used.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad, simpson

from .associated import DomainError, omega_M_log
from .sequence import TruncationConfig, WeightSequence, sequence_from_spec
from .tail import DIVERGING, ERRATIC, SupTrend, classify_levels, limsup_trend, tail_rising
from .verdict import FAILS, HOLDS, INCONCLUSIVE, ConditionVerdict

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_T_MAX = 1e100
FAMILIES = ("power", "t_log_t", "log_power", "linear")
GRID = 400  # points per tail window
MIN_SPAN = 1.0  # smallest usable tail window, in units of log t
MIN_KINKS = 16  # smallest number of quotients log mu_k inside a window of omega_M
OMEGA1_FAIL_GROWTH = 2.0  # growth of omega(2t)/(omega(t)+1) across the window needed for an (omega_1) fail
MIN_FAIL_SPAN = 6.0  # a trend in t counts as divergence only over a window this long (log t)


@dataclass(frozen=True, eq=False)
class WeightFunction:
    phi: Callable  # y -> omega(e^y), vectorized, valid for y <= log t_max
    t_max: float
    family_tag: str
    zero_until: float = 0.0  # log t below which omega vanishes
    convex_in_log: bool = True
    sequence: WeightSequence | None = None
    params: dict = field(default_factory=dict)

    @property
    def y_max(self) -> float:
        return math.log(self.t_max)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0) or np.any(t_arr > self.t_max * (1 + 1e-12)):
            raise DomainError(f"t outside [0, {self.t_max:.6g}]")
        with np.errstate(divide="ignore"):
            y = np.log(t_arr)
        out = np.where(t_arr > 0, self.phi(np.minimum(y, self.y_max)), 0.0)
        return float(out) if out.ndim == 0 else out

    def __repr__(self) -> str:
        return f"WeightFunction({self.family_tag!r}, t_max={self.t_max:.3g})"


def make_closed_form(family: str, param: float | None = None, t_max: float = DEFAULT_T_MAX) -> WeightFunction:
    """Normalized closed forms, each clamped to 0 on [0, 1]."""
    if t_max <= 1:
        raise ValueError("t_max must exceed 1")
    if family == "power":
        a = 0.5 if param is None else float(param)
        if not 0 < a <= 2:
            raise ValueError("power exponent must lie in (0, 2]")
        phi = lambda y: np.expm1(a * np.maximum(y, 0.0))  # noqa: E731
        tag = f"power({a:g})"
    elif family == "t_log_t":
        phi = lambda y: np.exp(np.maximum(y, 0.0)) * np.maximum(y, 0.0)  # noqa: E731
        tag = "t_log_t"
    elif family == "log_power":
        b = 2.0 if param is None else float(param)
        if b < 1:
            raise ValueError("log_power exponent must be >= 1")
        phi = lambda y: np.maximum(y, 0.0) ** b  # noqa: E731
        tag = f"log_power({b:g})"
    elif family == "linear":
        phi = lambda y: np.expm1(np.maximum(y, 0.0))  # noqa: E731
        tag = "linear"
    else:
        raise ValueError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")
    return WeightFunction(phi, float(t_max), tag, 0.0, True, None, {"family": family, "param": param})


def from_sequence(M: WeightSequence) -> WeightFunction:
    """omega_M as a weight function on [0, mu_P]."""
    return WeightFunction(
        lambda y: omega_M_log(M, y),
        float(M.mu[M.P]),
        f"omega_M[{M.label}]",
        float(M.log_mu[1]),
        True,
        M,
        {"family": "sequence"},
    )


def _phi_safe(w: WeightFunction, y):
    return w.phi(np.minimum(y, w.y_max))


# ---------------------------------------------------------------- Young conjugate


def _golden_max(f, a, b, iters: int = 90):
    """Vectorized golden-section maximization of a unimodal f on [a, b] (arrays)."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        d_new = np.where(left, c, a + GOLDEN * (b - a))
        c_new = np.where(left, b - GOLDEN * (b - a), d)
        fd_new = np.where(left, fc, np.nan)
        fc_new = np.where(left, np.nan, fd)
        c, d = c_new, d_new
        need_c = np.isnan(fc_new)
        need_d = np.isnan(fd_new)
        fc = np.where(need_c, f(c), fc_new)
        fd = np.where(need_d, f(d), fd_new)
    x = 0.5 * (a + b)
    return x, f(x)


def _phi_star_raw(w: WeightFunction, x: np.ndarray):
    """(value, maximizer, hit-the-cap mask) of sup over y in [0, log t_max] of x y - phi(y)."""
    ymax = w.y_max
    obj = lambda y: x * y - _phi_safe(w, y)  # noqa: E731
    y, val = _golden_max(obj, np.zeros_like(x), np.full_like(x, ymax))
    if w.sequence is not None:
        # piecewise linear phi: polish to the nearest kinks log mu_k
        lm = w.sequence.log_mu
        k = np.clip(np.searchsorted(lm[1:], y) + 1, 1, w.sequence.P)
        for kk in (k - 1, k, k + 1):
            kk = np.clip(kk, 1, w.sequence.P)
            yk = np.clip(lm[kk], 0.0, ymax)
            vk = x * yk - _phi_safe(w, yk)
            better = vk > val
            y, val = np.where(better, yk, y), np.where(better, vk, val)
    v0 = -_phi_safe(w, np.zeros_like(x))
    at0 = v0 >= val
    y, val = np.where(at0, 0.0, y), np.where(at0, v0, val) + 0.0
    if w.sequence is not None:
        # beyond mu_P the slope of phi is >= P, so the sup is attained inside for x <= P
        capped = x > w.sequence.P
    else:
        capped = (y >= ymax - 1e-9 * max(1.0, ymax)) & (x > 0)
    return val, y, capped


def phi_star_argmax(w: WeightFunction, x):
    """(phi*(x), maximizer y) for x >= 0; sup over y in [0, log t_max]."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    val, y, capped = _phi_star_raw(w, x)
    if np.any(capped):
        bad = float(x[np.argmax(capped)])
        raise DomainError(f"domain too small for x = {bad:.6g}: maximizer at log t_max")
    return val, y


def phi_star_domain(w: WeightFunction, x) -> tuple[np.ndarray, np.ndarray]:
    """phi* on the longest prefix of the sorted grid x whose maximizers stay inside the domain."""
    x = np.asarray(x, dtype=float)
    val, _, capped = _phi_star_raw(w, x)
    n = int(np.argmax(capped)) if np.any(capped) else x.size
    return x[:n], val[:n]


def phi_star(w: WeightFunction, x):
    val, _ = phi_star_argmax(w, x)
    return float(val[0]) if np.ndim(x) == 0 else val


def biconjugate(w: WeightFunction, y, x_max=None):
    """phi**(y) = sup_{x >= 0} x y - phi*(x), with x bracketed by a convexity slope bound."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x_max is None:
        # phi'(y) <= phi(y + 1) - phi(y) for convex phi
        x_max = np.maximum(_phi_safe(w, y + 1.0) - _phi_safe(w, y), 0.0) * 1.5 + 1.0
    x_max = np.broadcast_to(np.asarray(x_max, dtype=float), y.shape)
    _, v = _golden_max(lambda x: x * y - phi_star(w, x), np.zeros_like(y), x_max, iters=80)
    return np.maximum(v, 0.0)


# ---------------------------------------------------------------- tail windows


@dataclass(frozen=True)
class TailWindow:
    y_lo: float
    y_hi: float

    @property
    def span(self) -> float:
        return self.y_hi - self.y_lo

    def grid(self, n: int = GRID) -> np.ndarray:
        return np.linspace(self.y_lo, self.y_hi, n)

    def as_t(self) -> tuple[float, float]:
        return (math.exp(self.y_lo), math.exp(self.y_hi))


def tail_window(w: WeightFunction, shift: float = 0.0, y_cap: float | None = None) -> TailWindow | None:
    """Upper half (in log t) of the usable range [zero_until, y_max - shift]; None if too short."""
    hi = (w.y_max if y_cap is None else y_cap) - shift
    lo = 0.5 * (max(w.zero_until, 0.0) + hi)
    if hi - lo < MIN_SPAN / 2 or hi <= max(w.zero_until, 0.0):
        return None
    if w.sequence is not None:
        # omega_M is piecewise linear in log t: the window must hold enough kinks
        lm = w.sequence.log_mu
        if np.searchsorted(lm[1:], hi) - np.searchsorted(lm[1:], lo) < MIN_KINKS:
            return None
    return TailWindow(lo, hi)


def _ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def _window_tuple(win: TailWindow | None):
    return tuple(win.as_t()) if win else (math.nan, math.nan)


# ---------------------------------------------------------------- (omega_0) ... (omega_6)


def _bounded_ratio_verdict(cid: str, values, win: TailWindow, cfg: TruncationConfig, key: str,
                           growth: float = 1.0) -> ConditionVerdict:
    """Bounded windowed ratio; a fail also needs the block maxima to grow by ``growth`` across the window."""
    tr = limsup_trend(values, cfg.margin)
    w = {key: tr.estimate, "window_sup": tr.sup, "trend": tr.trend, "block_max": list(tr.block_max)}
    if tr.bounded:
        return ConditionVerdict(cid, HOLDS, w, 0.0, _window_tuple(win))
    if tr.diverging and win.span >= MIN_FAIL_SPAN and tr.block_max[-1] >= growth * tr.block_max[0]:
        w["violating_index"] = float(math.exp(win.y_hi))
        return ConditionVerdict(cid, FAILS, w, math.nan, _window_tuple(win), "ratio rising through the window")
    return ConditionVerdict(cid, INCONCLUSIVE, w, math.nan, _window_tuple(win))


def check_omega1_fn(w: WeightFunction, cfg: TruncationConfig, h: float = 2.0) -> ConditionVerdict:
    """omega(h t) <= L (omega(t) + 1)."""
    win = tail_window(w, math.log(h))
    if win is None:
        return ConditionVerdict("omega1", INCONCLUSIVE, {}, math.nan, (math.nan, math.nan), "domain too small")
    y = win.grid()
    r = _phi_safe(w, y + math.log(h)) / (_phi_safe(w, y) + 1.0)
    # omega_M approaches its asymptotic ratio slowly from below; a fail needs the ratio to double
    v = _bounded_ratio_verdict("omega1", r, win, cfg, "L_tail", growth=OMEGA1_FAIL_GROWTH)
    if v.holds:
        yy = np.linspace(min(w.zero_until, 0.0) - 1.0, win.y_hi, 2 * GRID)
        full = _phi_safe(w, yy + math.log(h)) / (_phi_safe(w, yy) + 1.0)
        wt = dict(v.witnesses, L=float(max(1.0, full.max(), v.witnesses["L_tail"])), h=h)
        v = ConditionVerdict(v.condition_id, v.status, wt, v.margin, v.window)
    return v


def check_omega_conditions(w: WeightFunction, cfg: TruncationConfig) -> dict[str, ConditionVerdict]:
    out = {}
    yneg = np.linspace(-5.0, 0.0, 101)
    zmax = float(np.max(np.abs(_phi_safe(w, yneg))))
    out["omega0"] = ConditionVerdict(
        "omega0", HOLDS if zmax <= cfg.eps else FAILS, {"max_on_unit_interval": zmax}, cfg.eps - zmax, (0.0, 1.0)
    )
    out["omega1"] = check_omega1_fn(w, cfg)
    win = tail_window(w)
    if win is None:
        for k in ("omega2", "omega3", "omega4", "omega5", "omega6"):
            out[k] = ConditionVerdict(k, INCONCLUSIVE, {}, math.nan, (math.nan, math.nan), "domain too small")
        return out
    y = win.grid()
    phi = _phi_safe(w, y)
    t = np.exp(y)
    out["omega2"] = _bounded_ratio_verdict("omega2", phi / t, win, cfg, "ratio_limsup")
    # (omega_3): omega / log t must grow without bound
    tr3 = limsup_trend(phi / y, cfg.margin)
    w3 = {"ratio_block_max": list(tr3.block_max), "trend": tr3.trend}
    if tr3.diverging:
        out["omega3"] = ConditionVerdict("omega3", HOLDS, w3, 0.0, _window_tuple(win))
    elif tr3.bounded and win.span >= MIN_FAIL_SPAN:
        w3["violating_index"] = float(t[-1])
        out["omega3"] = ConditionVerdict("omega3", FAILS, w3, math.nan, _window_tuple(win), "omega/log t not growing")
    else:
        out["omega3"] = ConditionVerdict("omega3", INCONCLUSIVE, w3, math.nan, _window_tuple(win))
    # (omega_4): convexity of phi, sampled over the whole domain
    ys = np.linspace(min(w.zero_until, 0.0) - 1.0, w.y_max, 2001)
    ps = _phi_safe(w, ys)
    d2 = ps[2:] + ps[:-2] - 2 * ps[1:-1]
    tol = 1e-9 * (1 + np.abs(ps[1:-1]))
    bad = np.flatnonzero(d2 < -tol)
    if bad.size:
        out["omega4"] = ConditionVerdict("omega4", FAILS, {"violating_index": float(math.exp(ys[bad[0] + 1]))}, float(d2.min()), (0.0, w.t_max))
    else:
        out["omega4"] = ConditionVerdict("omega4", HOLDS, {"min_second_difference": float(d2.min())}, float(d2.min()), (0.0, w.t_max))
    # (omega_5): omega(t)/t -> 0
    tr5 = limsup_trend(phi / t, cfg.margin)
    w5 = {"ratio_block_max": list(tr5.block_max), "ratio_block_min": list(tr5.block_min)}
    if tr5.block_max[-1] < 0.5 * tr5.block_max[0] and all(np.diff(tr5.block_max) < 0):
        out["omega5"] = ConditionVerdict("omega5", HOLDS, w5, 0.0, _window_tuple(win))
    elif tr5.block_min[-1] >= tr5.block_min[0] * (1 - cfg.margin) and tr5.block_min[-1] > 0 and win.span >= MIN_FAIL_SPAN:
        w5["violating_index"] = float(t[-1])
        out["omega5"] = ConditionVerdict("omega5", FAILS, w5, math.nan, _window_tuple(win), "omega/t not decaying")
    else:
        out["omega5"] = ConditionVerdict("omega5", INCONCLUSIVE, w5, math.nan, _window_tuple(win))
    out["omega6"] = check_omega6_fn(w, cfg)
    return out


def _distinct_kinks(w: WeightFunction, win: TailWindow) -> int:
    """Distinct kinks of omega_M in the window (repeated quotients give one kink); inf for closed forms."""
    if w.sequence is None:
        return math.inf
    lm = w.sequence.log_mu[1:]
    return int(np.unique(lm[(lm > win.y_lo) & (lm <= win.y_hi)]).size)


def check_omega6_fn(w: WeightFunction, cfg: TruncationConfig) -> ConditionVerdict:
    """2 omega(t) <= omega(H t) + H for some H >= 1."""
    tried = []
    fails = 0
    for k in range(1, 17):
        H = 2.0**k
        win = tail_window(w, math.log(H))
        if win is None:
            break
        yy = np.linspace(min(w.zero_until, 0.0) - 1.0, win.y_hi, 2 * GRID)
        d = 2 * _phi_safe(w, yy) - _phi_safe(w, yy + math.log(H))
        tail = 2 * _phi_safe(w, win.grid()) - _phi_safe(w, win.grid() + math.log(H))
        tr = limsup_trend(tail, cfg.margin)
        tried.append(H)
        if float(d.max()) <= H and not tr.diverging and _distinct_kinks(w, win) >= MIN_KINKS and tr.block_max[-1] <= max(tr.block_max[:-1]) + cfg.margin * max(1.0, H):
            return ConditionVerdict("omega6", HOLDS, {"H": H, "max_defect": float(d.max())}, H - float(d.max()), _window_tuple(win))
        if tr.diverging and win.span >= MIN_FAIL_SPAN:
            fails += 1
    if tried and fails == len(tried):
        return ConditionVerdict("omega6", FAILS, {"violating_index": tried[-1], "searched": tried}, math.nan, (0.0, w.t_max),
                                "fails-within-bounds: defect grows for every H")
    return ConditionVerdict("omega6", INCONCLUSIVE, {"searched": tried}, math.nan, (0.0, w.t_max))


# ---------------------------------------------------------------- (alpha_0), (alpha_1)


def _lambdas(cfg: TruncationConfig) -> list[int]:
    return [2**k for k in range(1, int(math.log2(cfg.lambda_max)) + 1)]


SMALL_T_LOG = 2.0  # the small-t range [0, t0] with t0 = e^2 for the additive constants


def _defect(w: WeightFunction, lam: float, C: float, y_hi: float) -> tuple[float, float]:
    """max over t <= e^{y_hi} of (omega(lam t) - C lam omega(t)) / lam, and its argmax t."""
    ys = np.linspace(min(w.zero_until, 0.0) - 2.0, y_hi, 3 * GRID)
    if y_hi <= SMALL_T_LOG:
        ys = np.linspace(min(w.zero_until, 0.0) - 2.0, y_hi, GRID)
    d = (_phi_safe(w, ys + math.log(lam)) - C * lam * _phi_safe(w, ys)) / lam
    i = int(np.argmax(d))
    return float(d[i]), float(math.exp(ys[i]))


def _per_lambda(w: WeightFunction, cfg: TruncationConfig, plus_one: bool):
    rows = []
    for lam in _lambdas(cfg):
        win = tail_window(w, math.log(lam))
        if win is None:
            break
        y = win.grid()
        den = lam * (_phi_safe(w, y) + (1.0 if plus_one else 0.0))
        r = _ratio(_phi_safe(w, y + math.log(lam)), den)
        rows.append((lam, win, limsup_trend(r, cfg.margin)))
    return rows


LAMBDA_STEP = 0.1  # relative growth per doubling of lambda that counts as divergence


def _lambda_levels(values: list[float], cfg: TruncationConfig):
    """Classify values over dyadic lambda; divergence needs a non-decaying relative step per doubling."""
    run = list(np.maximum.accumulate(np.asarray(values, dtype=float)))
    tr = classify_levels(run, cfg.margin)
    rising = tr.diverging or tail_rising(values[-4:])
    if rising:
        step = run[-1] - run[-2]
        if math.isinf(run[-1]) or step >= LAMBDA_STEP * max(1.0, abs(run[-1])):
            return SupTrend(DIVERGING, tr.observed, math.inf, tr.levels)
        if not tr.bounded:
            return SupTrend(ERRATIC, tr.observed, tr.observed, tr.levels)
    return tr


def check_alpha0_fn(w: WeightFunction, cfg: TruncationConfig) -> ConditionVerdict:
    """omega(lam t) <= C lam omega(t) + D lam with C, D uniform in lam (dyadic lam <= lambda_max).

    C comes from the tail ratio omega(lam t) / (lam (omega(t) + 1)); D_lam is the
    remaining additive defect over the whole range, dominated by small t.
    """
    rows = _per_lambda(w, cfg, plus_one=True)
    if len(rows) < 4:
        return ConditionVerdict("alpha0", INCONCLUSIVE, {"lambdas": [r[0] for r in rows]}, math.nan, (0.0, w.t_max),
                                "domain too small for lambda search")
    C_lam = [r[2].sup for r in rows]
    trC = _lambda_levels(C_lam, cfg)
    C = max(1.0, trC.estimate if math.isfinite(trC.estimate) else max(C_lam))
    C_used = (1.0 + cfg.margin) * C
    D_lam, D_arg = [], []
    for lam, win, _ in rows:
        d, targ = _defect(w, lam, C_used, win.y_hi)
        D_lam.append(max(d, 0.0))
        D_arg.append(targ)
    trD = _lambda_levels(D_lam, cfg)
    lams = [r[0] for r in rows]
    D_small = [max(_defect(w, lam, C_used, min(SMALL_T_LOG, win.y_hi))[0], 0.0) for lam, win, _ in rows]
    wit = {
        "lambdas": lams,
        "C_lambda": C_lam,
        "D_lambda": D_lam,
        "D_argmax_t": D_arg,
        "D_lambda_small_t": D_small,
        "t0": math.exp(SMALL_T_LOG),
        "C": C_used,
        "trend_C": trC.trend,
        "trend_D": trD.trend,
    }
    window = (0.0, rows[0][1].as_t()[1])
    if trC.diverging or trD.diverging:
        k = int(np.argmax(D_lam)) if trD.diverging else int(np.argmax(C_lam))
        wit["violating_index"] = lams[k]
        wit["per_lambda_sup"] = max(D_lam) if trD.diverging else max(C_lam)
        which = "additive defect D_lambda" if trD.diverging else "tail constant C_lambda"
        return ConditionVerdict("alpha0", FAILS, wit, math.nan, window, f"{which} grows with lambda")
    if trC.bounded and trD.bounded:
        D = max(1.0, trD.estimate)
        wit["D"] = D
        return ConditionVerdict("alpha0", HOLDS, wit, D - max(D_lam), window)
    return ConditionVerdict("alpha0", INCONCLUSIVE, wit, math.nan, window)


def _strongly_rising(tr) -> bool:
    """Diverging block maxima whose last step is a sizeable fraction of the level."""
    if not tr.diverging:
        return False
    last = tr.block_max[-1]
    return math.isinf(last) or last - tr.block_max[-2] >= LAMBDA_STEP * max(1.0, abs(last))


def check_alpha1_fn(w: WeightFunction, cfg: TruncationConfig) -> ConditionVerdict:
    """sup over lam of limsup_t omega(lam t) / (lam omega(t)) finite; D_lam per lam."""
    rows = _per_lambda(w, cfg, plus_one=False)
    if len(rows) < 4:
        return ConditionVerdict("alpha1", INCONCLUSIVE, {"lambdas": [r[0] for r in rows]}, math.nan, (0.0, w.t_max),
                                "domain too small for lambda search")
    lams = [r[0] for r in rows]
    # a decreasing ratio has its limsup below the value at the window end
    lim = [math.inf if _strongly_rising(tr) and win.span >= MIN_FAIL_SPAN else (tr.last if tr.decreasing else tr.estimate) for _, win, tr in rows]
    resolved = all(tr.bounded or tr.decreasing for _, _, tr in rows)
    wit = {"lambdas": lams, "limsup_lambda": lim, "per_lambda_trend": [tr.trend for _, _, tr in rows]}
    window = (0.0, rows[0][1].as_t()[1])
    if any(math.isinf(v) for v in lim):
        wit["violating_index"] = lams[next(i for i, v in enumerate(lim) if math.isinf(v))]
        return ConditionVerdict("alpha1", FAILS, wit, math.nan, window, "per-lambda ratio diverges in t")
    tr = _lambda_levels(lim, cfg)
    wit["trend"] = tr.trend
    if tr.diverging:
        wit["violating_index"] = lams[int(np.argmax(lim))]
        return ConditionVerdict("alpha1", FAILS, wit, math.nan, window, "limsup ratio grows with lambda")
    if not tr.bounded or not resolved:
        return ConditionVerdict("alpha1", INCONCLUSIVE, wit, math.nan, window)
    C = max(1.0, tr.estimate)
    C_used = (1.0 + cfg.margin) * C
    wit["sup_ratio"] = max(lim)
    wit["C"] = C_used
    wit["D_lambda"] = [max(1.0, _defect(w, lam, C_used, win.y_hi)[0]) for lam, win, _ in rows]
    return ConditionVerdict("alpha1", HOLDS, wit, C - max(lim), window)


# ---------------------------------------------------------------- growth index


@dataclass(frozen=True)
class GammaEstimate:
    """gamma(omega) bracket: (P_gamma) passes below ``lower``, fails at/above ``upper``."""

    lower: float
    upper: float
    gamma_max: float
    witnesses: dict

    @property
    def value(self) -> float:
        return math.inf if self.lower >= self.gamma_max else self.lower

    @property
    def at_sentinel(self) -> bool:
        return self.lower >= self.gamma_max


K_GRID = [2.0 ** (k / 2) for k in range(1, 41)]


def p_gamma(w: WeightFunction, gamma: float, cfg: TruncationConfig) -> tuple[str, dict]:
    """Three-valued (P_{omega,gamma}): limsup omega(K^gamma t)/omega(t) < K for some K."""
    fails, tried = 0, 0
    for K in K_GRID:
        shift = gamma * math.log(K)
        win = tail_window(w, shift)
        if win is None:
            break
        y = win.grid()
        r = _ratio(_phi_safe(w, y + shift), _phi_safe(w, y))
        tr = limsup_trend(r, cfg.margin)
        tried += 1
        if tr.bounded and tr.estimate < K * (1 - cfg.margin):
            return HOLDS, {"K": K, "limsup": tr.estimate}
        if tr.block_min[-1] >= K * (1 + cfg.margin) and not tr.decreasing:
            fails += 1
    if tried and fails == tried:
        return FAILS, {"tried": tried}
    return INCONCLUSIVE, {"tried": tried}


def gamma_bounds(w: WeightFunction, cfg: TruncationConfig, iters: int = 24) -> GammaEstimate:
    gmax = cfg.gamma_max
    g_min = 1e-3
    wit = {}
    st_max, wmax = p_gamma(w, gmax, cfg)
    if st_max == HOLDS:
        lower = gmax
        wit["at_gamma_max"] = wmax
    else:
        st_min, _ = p_gamma(w, g_min, cfg)
        if st_min != HOLDS:
            lower = 0.0
        else:
            a, b = g_min, gmax
            for _ in range(iters):
                m = 0.5 * (a + b)
                if p_gamma(w, m, cfg)[0] == HOLDS:
                    a = m
                else:
                    b = m
            lower = a
            wit["K_at_lower"] = p_gamma(w, a, cfg)[1].get("K")
    if st_max != FAILS:
        upper = math.inf
    elif p_gamma(w, g_min, cfg)[0] == FAILS:
        upper = g_min
    else:
        a, b = g_min, gmax
        for _ in range(iters):
            m = 0.5 * (a + b)
            if p_gamma(w, m, cfg)[0] == FAILS:
                b = m
            else:
                a = m
        upper = b
    return GammaEstimate(lower, upper, gmax, wit)


def gamma_index(w: WeightFunction, cfg: TruncationConfig) -> float:
    """Estimate of gamma(omega); math.inf is the '>= gamma_max' sentinel."""
    return gamma_bounds(w, cfg).value


GAMMA_SLACK = 0.05


def gamma_verdict(est: GammaEstimate, threshold: float, cid: str) -> ConditionVerdict:
    """'gamma(omega) > threshold' (threshold = inf means the sentinel)."""
    wit = {"lower": est.lower, "upper": est.upper, "gamma_max": est.gamma_max}
    if math.isinf(threshold):
        if est.at_sentinel:
            return ConditionVerdict(cid, HOLDS, wit, 0.0, (0.0, math.inf))
        if est.upper < est.gamma_max:
            return ConditionVerdict(cid, FAILS, dict(wit, violating_index=est.upper), math.nan, (0.0, math.inf))
        return ConditionVerdict(cid, INCONCLUSIVE, wit, math.nan, (0.0, math.inf))
    if est.lower > threshold + GAMMA_SLACK:
        return ConditionVerdict(cid, HOLDS, wit, est.lower - threshold, (0.0, math.inf))
    if est.upper <= threshold - GAMMA_SLACK or (threshold == 0 and est.upper <= GAMMA_SLACK):
        return ConditionVerdict(cid, FAILS, dict(wit, violating_index=est.upper), math.nan, (0.0, math.inf))
    return ConditionVerdict(cid, INCONCLUSIVE, wit, math.nan, (0.0, math.inf))


# ---------------------------------------------------------------- strong non-quasianalyticity


def kappa(w: WeightFunction, y: float, s_max: float | None = None, method: str = "quad") -> float:
    """int_1^T omega(y t)/t^2 dt = int_0^S omega(y e^s) e^{-s} ds with T = e^S <= t_max / y.

    ``method='quad'`` uses adaptive quadrature; ``'simpson'`` a dense composite
    Simpson rule (vectorized, used for sweeps over many y).
    """
    if y < 0:
        raise ValueError("y must be >= 0")
    if y == 0:
        return 0.0
    ly = math.log(y)
    S = w.y_max - ly if s_max is None else min(s_max, w.y_max - ly)
    if S <= 0:
        raise DomainError("y beyond the domain")
    if method == "simpson":
        s = np.linspace(0.0, S, 8193)
        return float(simpson(_phi_safe(w, ly + s) * np.exp(-s), x=s))
    if method != "quad":
        raise ValueError(f"unknown method {method!r}")
    f = lambda s: float(_phi_safe(w, ly + s)) * math.exp(-s)  # noqa: E731
    brk = w.zero_until - ly
    pts = [brk] if 0 < brk < S else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(f, 0.0, S, limit=400, epsrel=1e-8, epsabs=0.0, points=pts)
    return val


KAPPA_RTOL = 1e-3
KAPPA_TAIL_RTOL = 5e-2


def kappa_with_tail(w: WeightFunction, y: float, method: str = "quad") -> tuple[float, str, float]:
    """kappa(y) with a truncation study at S/4, S/2, S.

    Returns (value, state, tail) with state 'converged', 'diverging' or
    'unresolved'. The tail beyond T is estimated from the log-decay rate of
    the integrand over [S/2, S].
    """
    S = w.y_max - math.log(y)
    k1, k2, k3 = (kappa(w, y, S * f, method) for f in (0.25, 0.5, 1.0))
    d1, d2 = k2 - k1, k3 - k2
    ly = math.log(y)
    g_end = float(_phi_safe(w, ly + S)) * math.exp(-S)
    g_mid = float(_phi_safe(w, ly + S / 2)) * math.exp(-S / 2)
    if g_end <= 0:
        return k3, "converged", 0.0
    rate = (math.log(g_mid) - math.log(g_end)) / (S / 2) if g_mid > 0 else 0.0
    tail = g_end / rate if rate > 0 else math.inf
    if d2 <= KAPPA_RTOL * max(k3, 1e-300) or tail <= KAPPA_TAIL_RTOL * k3:
        return k3, "converged", min(tail, max(d2, 0.0)) if d2 <= KAPPA_RTOL * k3 else tail
    if rate <= 0 and d1 > 0 and d2 >= 0.85 * d1:
        return k3, "diverging", math.inf
    return k3, "unresolved", tail


def check_strong_nq(w: WeightFunction, cfg: TruncationConfig) -> ConditionVerdict:
    """kappa(y) <= C omega(y) + C over a tail y-grid."""
    hi = 0.5 * w.y_max
    lo = max(w.zero_until, 0.0) + 1.0
    if hi - lo < MIN_SPAN:
        return ConditionVerdict("strong_nq", INCONCLUSIVE, {}, math.nan, (math.nan, math.nan), "domain too small")
    ys = np.linspace(lo, hi, 24)
    ratios, states = [], []
    for yy in ys:
        k, state, _ = kappa_with_tail(w, math.exp(yy), method="simpson")
        states.append(state)
        ratios.append(k / (float(_phi_safe(w, yy)) + 1.0))
        if state == "diverging":
            wit = {"violating_index": float(math.exp(yy)), "kappa_truncated": k}
            return ConditionVerdict("strong_nq", FAILS, wit, math.nan, (math.exp(lo), math.exp(hi)), "kappa diverges at the upper limit")
    window = (math.exp(lo), math.exp(hi))
    if any(s != "converged" for s in states):
        return ConditionVerdict("strong_nq", INCONCLUSIVE, {"states": states}, math.nan, window, "tail contribution not resolved")
    tr = limsup_trend(np.asarray(ratios), cfg.margin)
    wit = {"C": max(1.0, tr.estimate, max(ratios)), "ratio_limsup": tr.estimate, "trend": tr.trend}
    if tr.bounded:
        return ConditionVerdict("strong_nq", HOLDS, wit, 0.0, window)
    if tr.diverging:
        wit["violating_index"] = float(math.exp(hi))
        return ConditionVerdict("strong_nq", FAILS, wit, math.nan, window)
    return ConditionVerdict("strong_nq", INCONCLUSIVE, wit, math.nan, window)


# ---------------------------------------------------------------- (omega_7)


def check_omega7_fn(w: WeightFunction, cfg: TruncationConfig) -> ConditionVerdict:
    """omega(t^2) = O(omega(H t)) for some H on a geometric grid."""
    y_cap = 0.5 * w.y_max
    tried, fails = [], 0
    for k in range(0, 11):
        H = 2.0**k
        win = tail_window(w, 0.0, y_cap=y_cap)
        if win is None:
            return ConditionVerdict("omega7", INCONCLUSIVE, {}, math.nan, (math.nan, math.nan), "window too small")
        y = win.grid()
        r = _ratio(_phi_safe(w, 2 * y), _phi_safe(w, y + math.log(H)))
        tr = limsup_trend(r, cfg.margin)
        tried.append(H)
        if tr.bounded and _distinct_kinks(w, win) >= MIN_KINKS:
            wit = {"H": H, "ratio_limsup": tr.estimate, "ratio_sup": tr.sup, "trend": tr.trend}
            return ConditionVerdict("omega7", HOLDS, wit, 0.0, win.as_t())
        if tr.diverging and win.span >= MIN_FAIL_SPAN:
            fails += 1
    if fails == len(tried):
        return ConditionVerdict("omega7", FAILS, {"violating_index": tried[-1], "searched": tried}, math.nan, win.as_t(),
                                "fails-within-bounds: ratio grows for every H")
    return ConditionVerdict("omega7", INCONCLUSIVE, {"searched": tried}, math.nan, win.as_t())


# ---------------------------------------------------------------- concave majorant


def upper_hull(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Upper concave hull of points sorted by x (monotone chain)."""
    hx, hy = [], []
    for xi, yi in zip(x, y):
        while len(hx) >= 2 and (hx[-1] - hx[-2]) * (yi - hy[-2]) - (hy[-1] - hy[-2]) * (xi - hx[-2]) >= 0:
            hx.pop()
            hy.pop()
        hx.append(float(xi))
        hy.append(float(yi))
    return np.asarray(hx), np.asarray(hy)


def _hull_samples(w: WeightFunction, T: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    ylo = min(w.zero_until, 0.0) - 2.0
    t = np.concatenate(([0.0], np.exp(np.linspace(ylo, math.log(T), n))))
    t = np.unique(np.concatenate((t, np.linspace(0.0, T, n))))
    return t, w(np.minimum(t, w.t_max))


def least_concave_majorant(w: WeightFunction, T: float | None = None, grid: int = 2000) -> WeightFunction:
    """Piecewise-linear upper hull of the sampled graph on [0, T].

    ``params['unbounded']`` flags a last hull slope that still rises with T
    (the majorant on [0, infinity) would be infinite).
    """
    T = w.t_max if T is None else float(T)
    if T > w.t_max * (1 + 1e-12) or T <= 0:
        raise DomainError("T must lie in (0, t_max]")
    if grid < 3:
        raise ValueError("need at least 3 samples")
    t, v = _hull_samples(w, T, grid)
    hx, hy = upper_hull(t, v)
    slopes = []
    for frac in (0.25, 0.5, 1.0):
        Tk = math.exp(frac * math.log(T)) if T > 1 else T * frac
        tk, vk = _hull_samples(w, Tk, max(grid // 4, 16))
        ax, ay = upper_hull(tk, vk)
        slopes.append(float((ay[-1] - ay[-2]) / (ax[-1] - ax[-2])) if ax.size > 1 else 0.0)
    d = np.diff(slopes)
    unbounded = bool(d[-1] > 1e-2 * max(1.0, abs(slopes[-1])) and d[-1] >= 0.5 * d[0] > 0)

    def phi(y):
        tt = np.exp(np.asarray(y, dtype=float))
        return np.interp(tt, hx, hy)

    return WeightFunction(phi, T, f"concave_majorant[{w.family_tag}]", -math.inf, False, None,
                          {"hull_t": hx, "hull_v": hy, "unbounded": unbounded, "last_slopes": slopes})


def check_majorant_equivalence(w: WeightFunction, cfg: TruncationConfig) -> ConditionVerdict:
    """F_omega = O(omega) on growing windows [0, T]: sup_t F_T(t)/(omega(t)+1) must stay bounded in T."""
    ymax = w.y_max
    fracs = (0.25, 0.5, 0.75, 1.0)
    levels = []
    for f in fracs:
        T = math.exp(max(w.zero_until, 0.0) + f * (ymax - max(w.zero_until, 0.0)))
        t, v = _hull_samples(w, T, 1500)
        hx, hy = upper_hull(t, v)
        F = np.interp(t, hx, hy)
        levels.append(float(np.max(F / (v + 1.0))))
    tr = classify_levels(levels, cfg.margin)
    if tail_rising(levels):
        tr = type(tr)(DIVERGING, tr.observed, math.inf, tr.levels)
    wit = {"levels": levels, "trend": tr.trend}
    if tr.bounded:
        wit["A"] = max(1.0, tr.estimate)
        return ConditionVerdict("majorant_equivalence", HOLDS, wit, 0.0, (0.0, w.t_max))
    if tr.diverging:
        wit["violating_index"] = w.t_max
        return ConditionVerdict("majorant_equivalence", FAILS, wit, math.nan, (0.0, w.t_max), "F/omega grows with the window")
    return ConditionVerdict("majorant_equivalence", INCONCLUSIVE, wit, math.nan, (0.0, w.t_max))


# ---------------------------------------------------------------- equivalence of weights


def equivalent_fn(sigma: WeightFunction, tau: WeightFunction, cfg: TruncationConfig) -> ConditionVerdict:
    """sigma ~ tau: tau = O(sigma) and sigma = O(tau) on a common tail window."""
    y_hi = min(sigma.y_max, tau.y_max)
    zero = max(sigma.zero_until, tau.zero_until, 0.0)
    if y_hi - zero < MIN_SPAN:
        return ConditionVerdict("equivalent_fn", INCONCLUSIVE, {}, math.nan, (math.nan, math.nan), "no common window")
    win = TailWindow(0.5 * (zero + y_hi), y_hi)
    y = win.grid()
    a, b = _phi_safe(sigma, y), _phi_safe(tau, y)
    t1 = limsup_trend(b / (a + 1.0), cfg.margin)
    t2 = limsup_trend(a / (b + 1.0), cfg.margin)
    wit = {"tau_over_sigma": t1.sup, "sigma_over_tau": t2.sup, "trend": [t1.trend, t2.trend]}
    if t1.bounded and t2.bounded:
        wit["A"] = max(1.0, t1.sup, t2.sup)
        return ConditionVerdict("equivalent_fn", HOLDS, wit, 0.0, win.as_t())
    if t1.diverging or t2.diverging:
        wit["violating_index"] = math.exp(y_hi)
        return ConditionVerdict("equivalent_fn", FAILS, wit, math.nan, win.as_t())
    return ConditionVerdict("equivalent_fn", INCONCLUSIVE, wit, math.nan, win.as_t())


def function_csv(w: WeightFunction, ts, with_majorant: bool = True, with_kappa: bool = False) -> str:
    ts = np.asarray(ts, dtype=float)
    cols = ["t", "omega"]
    data = [ts, w(ts)]
    if with_majorant:
        F = least_concave_majorant(w, float(ts.max()))
        cols.append("F")
        data.append(F(ts))
    if with_kappa:
        cols.append("kappa")
        data.append(np.array([kappa(w, t) if 0 < t < w.t_max else 0.0 for t in ts]))
    lines = [",".join(cols)]
    for row in zip(*data):
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def function_from_spec(spec: dict) -> WeightFunction:
    """{"family": power|t_log_t|log_power|linear, "param": a, "t_max": T}; any sequence spec gives omega_M."""
    if not isinstance(spec, dict):
        raise ValueError("function spec must be a JSON object")
    if spec.get("family") in FAMILIES:
        return make_closed_form(spec["family"], spec.get("param"), float(spec.get("t_max", DEFAULT_T_MAX)))
    return from_sequence(sequence_from_spec(spec))
