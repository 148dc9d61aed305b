"""The associated function omega_M(t) = sup_p log(t^p / M_p) of a log-convex sequence."""

from __future__ import annotations

import io
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .sequence import LOG_CONVEX, SequenceError, WeightSequence


class DomainError(ValueError):
    """Argument outside the range where the truncated data determines the value."""


def _require_lc(M: WeightSequence):
    if LOG_CONVEX not in M.flags:
        raise SequenceError("omega_M fast path needs a log-convex sequence")


def omega_M(M: WeightSequence, t):
    """Counting form: with k = #{p >= 1: mu_p < t}, omega_M(t) = k log t - log M_k.

    Valid on [0, mu_P]; exact zero on [0, mu_1].
    """
    _require_lc(M)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise DomainError("t must be >= 0")
    if np.any(t_arr > M.mu[M.P]):
        raise DomainError(f"t exceeds mu_P = {M.mu[M.P]:.6g}; raise the truncation P")
    k = np.searchsorted(M.mu[1:], t_arr, side="left")
    with np.errstate(divide="ignore", invalid="ignore"):  # t = 0 gives 0 * -inf, masked by k = 0
        lt = np.log(t_arr)
        out = np.where(k > 0, k * lt - M.log_M[k], 0.0)
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def omega_M_log(M: WeightSequence, y):
    """omega_M(e^y) evaluated directly in y = log t (any real y <= log mu_P)."""
    _require_lc(M)
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr > M.log_mu[M.P]):
        raise DomainError("y exceeds log mu_P")
    k = np.searchsorted(M.log_mu[1:], y_arr, side="left")
    with np.errstate(invalid="ignore"):
        out = np.where(k > 0, np.maximum(k * y_arr - M.log_M[k], 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def omega_M_bruteforce(M: WeightSequence, t: float, p_max: int | None = None) -> float:
    """Defining sup: max over 0 <= p <= p_max of p log t - log M_p."""
    p_max = M.P if p_max is None else p_max
    if not 0 <= p_max <= M.P:
        raise SequenceError("p_max out of range")
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return 0.0
    p = np.arange(p_max + 1)
    return float(np.max(p * math.log(t) - M.log_M[: p_max + 1]))


def recover_M(M: WeightSequence, p: int, grid_points: int = 400) -> float:
    """log of sup_t t^p / exp(omega_M(t)), by grid search plus bounded refinement near mu_p."""
    if not 0 <= p < M.P:
        raise SequenceError(f"p must be in [0, {M.P - 1}]")
    if p == 0:
        return 0.0
    y_hi = float(M.log_mu[M.P])
    y_lo = min(0.0, float(M.log_mu[1])) - 1.0

    def obj(y):
        return p * y - omega_M_log(M, y)

    ys = np.linspace(y_lo, y_hi, grid_points)
    vals = obj(ys)
    i = int(np.argmax(vals))
    best = float(vals[i])
    brackets = [(ys[max(i - 1, 0)], ys[min(i + 1, ys.size - 1)]), (float(M.log_mu[p]), float(M.log_mu[p + 1]))]
    for a, b in brackets:
        for y in (a, b):
            best = max(best, float(obj(y)))
        if b > a:
            res = minimize_scalar(lambda y: -obj(y), bounds=(a, b), method="bounded", options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
    return best


def omega_csv(M: WeightSequence, ts) -> str:
    buf = io.StringIO()
    buf.write("t,omega\n")
    for t, w in zip(ts, omega_M(M, np.asarray(ts, dtype=float))):
        buf.write(f"{t:.17g},{w:.17g}\n")
    return buf.getvalue()


def default_t_grid(M: WeightSequence, points: int = 200, cap_index: int | None = None) -> np.ndarray:
    """Geometric grid on [mu_1/2, mu_{cap}] (cap defaults to P-1), with 0 prepended."""
    cap = M.P - 1 if cap_index is None else cap_index
    lo = float(M.log_mu[1]) - math.log(2.0)
    hi = float(M.log_mu[cap])
    if hi <= lo:
        hi = lo + 1.0
    grid = np.minimum(np.exp(np.linspace(lo, hi, points - 1)), M.mu[cap])
    return np.concatenate(([0.0], grid))
