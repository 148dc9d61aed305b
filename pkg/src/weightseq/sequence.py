"""Truncated weight sequences stored as log-quotients.

A sequence M is kept as ``log_mu[p] = log(M_p / M_{p-1})`` for p = 0..P with
``log_mu[0] = 0``. Everything else (log M_p, log m_p, log roots) is derived
by prefix sums; M_p itself is never exponentiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy.special import gammaln

from .tail import sup_trend
from .verdict import FAILS, HOLDS, INCONCLUSIVE, ConditionVerdict

LOG_CONVEX = "log_convex"
NORMALIZED = "normalized"
KNOWN_FLAGS = (LOG_CONVEX, NORMALIZED)
LC_FLAGS = frozenset(KNOWN_FLAGS)

# float slack for monotonicity checks on computed (not hand-typed) quotients
MONOTONE_TOL = 1e-9


class SequenceError(ValueError):
    """Invalid input for a weight sequence."""


@dataclass(frozen=True)
class TruncationConfig:
    """Truncation and tolerance settings shared by all estimators."""

    P: int = 512
    tail_lo: int | None = None
    eps: float = 1e-6
    margin: float = 1e-2
    L_max: int = 16
    Q_max: int = 16
    lambda_max: int = 64
    t_min: float = 1.0
    t_max: float | None = None
    t_points: int = 400
    seed: int = 7
    gamma_max: float = 8.0

    def __post_init__(self):
        if self.P < 2:
            raise ValueError("P must be >= 2")
        if self.tail_lo is not None and not 1 <= self.tail_lo < self.P:
            raise ValueError("need 1 <= tail_lo < P")
        for name in ("L_max", "Q_max", "lambda_max"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")
        if self.t_min <= 0:
            raise ValueError("t_min must be > 0")
        if self.eps <= 0 or self.margin <= 0:
            raise ValueError("eps and margin must be > 0")

    def window(self, P: int) -> tuple[int, int]:
        """Asymptotic window (tail_lo, P) for a sequence truncated at P."""
        if self.tail_lo is not None and self.tail_lo < P:
            return self.tail_lo, P
        return max(1, math.ceil(P / 2)), P

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, d: dict) -> "TruncationConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True, eq=False)
class WeightSequence:
    log_mu: np.ndarray
    label: str = "explicit"
    flags: frozenset = frozenset()
    meta: dict = field(default_factory=dict)

    @property
    def P(self) -> int:
        return self.log_mu.size - 1

    @cached_property
    def log_M(self) -> np.ndarray:
        out = np.cumsum(self.log_mu)
        out[0] = 0.0
        out.setflags(write=False)
        return out

    @cached_property
    def log_factorial(self) -> np.ndarray:
        return gammaln(np.arange(self.P + 1) + 1.0)

    @cached_property
    def log_m(self) -> np.ndarray:
        out = self.log_M - self.log_factorial
        out.setflags(write=False)
        return out

    @cached_property
    def log_root(self) -> np.ndarray:
        """(1/p) log M_p, with index 0 set to 0."""
        p = np.arange(self.P + 1, dtype=float)
        out = np.zeros(self.P + 1)
        out[1:] = self.log_M[1:] / p[1:]
        out.setflags(write=False)
        return out

    @cached_property
    def log_m_root(self) -> np.ndarray:
        """(1/p) log m_p, with index 0 set to 0."""
        p = np.arange(self.P + 1, dtype=float)
        out = np.zeros(self.P + 1)
        out[1:] = self.log_m[1:] / p[1:]
        out.setflags(write=False)
        return out

    @cached_property
    def mu(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            out = np.exp(self.log_mu)
        out.setflags(write=False)
        return out

    @property
    def is_lc(self) -> bool:
        return LC_FLAGS <= self.flags

    def diverges_on_window(self, cfg: TruncationConfig | None = None) -> bool:
        """Finite surrogate for (M_p)^{1/p} -> infinity: the roots strictly grow across the window."""
        lo, hi = (cfg or TruncationConfig(P=max(self.P, 2))).window(self.P)
        return bool(self.log_root[hi] > self.log_root[lo])

    def truncate(self, P: int) -> "WeightSequence":
        if not 1 <= P <= self.P:
            raise SequenceError(f"cannot truncate P={self.P} sequence to {P}")
        return WeightSequence(_frozen(self.log_mu[: P + 1]), self.label, self.flags, dict(self.meta))

    def to_dict(self) -> dict:
        with np.errstate(over="ignore"):
            roots = np.exp(self.log_root)
        return {
            "schema": "weightseq.sequence/1",
            "label": self.label,
            "P": self.P,
            "flags": sorted(self.flags),
            "log_mu": self.log_mu.tolist(),
            "log_M": self.log_M.tolist(),
            "log_roots": self.log_root.tolist(),
            "roots": [float(r) if math.isfinite(r) else None for r in roots],
        }

    def __repr__(self) -> str:
        return f"WeightSequence({self.label!r}, P={self.P}, flags={sorted(self.flags)})"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def from_log_quotients(
    values: Iterable[float],
    flags: Iterable[str] = KNOWN_FLAGS,
    label: str = "explicit",
    tol: float = MONOTONE_TOL,
    meta: dict | None = None,
) -> WeightSequence:
    """Build a sequence from ``log mu_p`` (p = 0..P); requested flags are verified."""
    try:
        v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    except (TypeError, ValueError):
        raise SequenceError("log quotients must be a list of numbers") from None
    flags = frozenset(flags)
    if v.ndim != 1 or v.size < 3:
        raise SequenceError("need log_mu[0..P] with P >= 2")
    if not np.all(np.isfinite(v)):
        bad = int(np.flatnonzero(~np.isfinite(v))[0])
        raise SequenceError(f"non-finite log quotient at index {bad}")
    if v[0] != 0.0:
        raise SequenceError("log_mu[0] must be 0 (mu_0 = 1)")
    unknown = flags - set(KNOWN_FLAGS)
    if unknown:
        raise SequenceError(f"unknown flags {sorted(unknown)}")
    if LOG_CONVEX in flags:
        d = np.diff(v[1:])
        if d.size and d.min() < -tol * max(1.0, float(np.abs(v).max())):
            p = int(np.argmin(d)) + 2
            raise SequenceError(f"log-convexity violated: log_mu[{p}] < log_mu[{p - 1}]")
    if NORMALIZED in flags and v[1] < -tol:
        raise SequenceError("normalization violated: log_mu[1] < 0")
    return WeightSequence(_frozen(v), label, flags, dict(meta or {}))


def gevrey(s: float, P: int) -> WeightSequence:
    """M_p = (p!)^s."""
    if s < 1:
        raise SequenceError("gevrey index s must be >= 1")
    if P < 2:
        raise SequenceError("P must be >= 2")
    v = np.zeros(P + 1)
    v[1:] = s * np.log(np.arange(1, P + 1))
    return from_log_quotients(v, label=f"gevrey(s={s:g})", meta={"family": "gevrey", "s": s})


def q_gevrey(q: float, P: int) -> WeightSequence:
    """M_p = q^(p^2)."""
    if q <= 1:
        raise SequenceError("q must be > 1")
    if P < 2:
        raise SequenceError("P must be >= 2")
    v = np.zeros(P + 1)
    v[1:] = (2.0 * np.arange(1, P + 1) - 1.0) * math.log(q)
    return from_log_quotients(v, label=f"q_gevrey(q={q:g})", meta={"family": "q_gevrey", "q": q})


def beta3_blocks(J: int) -> tuple[list[int], list[float]]:
    """Block boundaries a_1..a_{J+1} (a_j = 2^(j(j-1)/2)) and log c_1..log c_J."""
    if J < 4:
        raise SequenceError("need J >= 4 blocks")
    if J > 6:
        raise SequenceError("J > 6 gives more than 2^21 terms")
    a = [2 ** (j * (j - 1) // 2) for j in range(1, J + 2)]
    for j in range(1, J + 1):
        if a[j] < (j + 1) * a[j - 1]:
            raise SequenceError(f"a_{j + 1}/a_{j} < {j + 1}")
    for j in range(2, J):
        if not a[j] / (a[j - 1] - 1) < a[j + 1] / (a[j] - 1):
            raise SequenceError(f"third block-growth condition fails at j={j}")
    log_c = [0.0]
    log_M_before = 0.0  # log M_{a_j - 1}; all quotients are 1 below a_2
    for j in range(2, J + 1):
        aj, aj1 = a[j - 1], a[j]
        prev_start, prev_end = a[j - 2], aj - 1
        log_M_before += (prev_end - prev_start + 1) * log_c[-1] if j > 2 else 0.0
        lc = aj1 / (aj - 1) * math.log(2.0) + log_M_before / (aj - 1)
        if lc < log_c[-1]:
            raise SequenceError(f"block values not nondecreasing at j={j}")
        log_c.append(lc)
    return a, log_c


def counterexample_beta3(J: int) -> WeightSequence:
    """Block sequence with constant quotients c_j on [a_j, a_{j+1} - 1], j = 1..J.

    The truncation is P = a_{J+1} - 1 so that every one of the J blocks is complete.
    """
    a, log_c = beta3_blocks(J)
    P = a[J] - 1
    v = np.zeros(P + 1)
    for j in range(1, J + 1):
        v[a[j - 1] : a[j]] = log_c[j - 1]
    meta = {"family": "beta3_counterexample", "J": J, "a": a, "log_c": log_c}
    return from_log_quotients(v, label=f"beta3_counterexample(J={J})", tol=0.0, meta=meta)


def root_power_sequence(N: WeightSequence, C: int) -> WeightSequence:
    """L^C_p = (N_{Cp})^{1/C}, quotients are geometric means of C consecutive nu_i."""
    if C < 1:
        raise SequenceError("C must be >= 1")
    if C == 1:
        return N
    P = N.P // C
    if P < 2:
        raise SequenceError(f"truncation {N.P} too small for C={C}")
    log_L = N.log_M[: C * P + 1 : C] / C
    v = np.diff(log_L, prepend=0.0)
    v[0] = 0.0
    return from_log_quotients(v, N.flags, label=f"L^{C}[{N.label}]", meta={"root_power": C})


def _common_P(M: WeightSequence, N: WeightSequence, cfg: TruncationConfig) -> int:
    P = min(M.P, N.P)
    lo, _ = cfg.window(P)
    if P < 4 or lo >= P:
        raise SequenceError(f"common truncation {P} too small")
    return P


def preceq(M: WeightSequence, N: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """M ⪯ N: sup_p (1/p) log(M_p / N_p) < ∞ on the data, with stabilization."""
    P = _common_P(M, N, cfg)
    p = np.arange(1, P + 1)
    vals = (M.log_M[1 : P + 1] - N.log_M[1 : P + 1]) / p
    trend = sup_trend(vals, cfg.margin)
    k = int(np.argmax(vals))
    w = {"log_sup": trend.observed, "sup_index": int(p[k]), "trend": trend.trend, "levels": list(trend.levels)}
    window = cfg.window(P)
    if trend.bounded:
        w["C"] = math.exp(max(0.0, trend.estimate))
        return ConditionVerdict("preceq", HOLDS, w, max(0.0, trend.estimate) - trend.observed, window)
    # a sup still below 0 (ratio below 1) is not yet evidence of divergence
    if trend.diverging and trend.observed > 0:
        w["violating_index"] = int(p[-1])
        return ConditionVerdict("preceq", FAILS, w, math.nan, window, "sup still rising at truncation (diverging witness)")
    return ConditionVerdict("preceq", INCONCLUSIVE, w, math.nan, window, "sup still rising at truncation")


def equivalent(M: WeightSequence, N: WeightSequence, cfg: TruncationConfig) -> ConditionVerdict:
    """M ≈ N: preceq both ways."""
    a, b = preceq(M, N, cfg), preceq(N, M, cfg)
    w = {"forward": a.to_dict(), "backward": b.to_dict()}
    if a.holds and b.holds:
        return ConditionVerdict("approx", HOLDS, w, min(a.margin, b.margin), a.window)
    if a.fails or b.fails:
        return ConditionVerdict("approx", FAILS, w, math.nan, a.window)
    return ConditionVerdict("approx", INCONCLUSIVE, w, math.nan, a.window)


def slc_regularization(M: WeightSequence) -> WeightSequence:
    """Quotients sigma_p = p * min_{p <= q <= P} mu_q / q, sigma_0 = 1.

    The infimum is truncated at P; it is exact only when mu_q / q is
    nondecreasing from some index on (recorded in ``meta['truncated_inf']``).
    """
    if LOG_CONVEX not in M.flags:
        raise SequenceError("slc_regularization needs a log-convex sequence")
    p = np.arange(1, M.P + 1, dtype=float)
    g = M.log_mu[1:] - np.log(p)
    gmin = np.minimum.accumulate(g[::-1])[::-1]
    v = np.zeros(M.P + 1)
    v[1:] = np.log(p) + gmin
    flags = {LOG_CONVEX}
    if v[1] >= 0:
        flags.add(NORMALIZED)
    exact = bool(np.all(np.diff(g[len(g) // 2 :]) >= -MONOTONE_TOL))
    meta = {"truncated_inf": True, "tail_monotone": exact}
    return from_log_quotients(v, flags, label=f"slc[{M.label}]", meta=meta)


def stirling_sandwich_holds(P: int) -> bool:
    """p log p - p <= log p! <= p log p for 1 <= p <= P."""
    p = np.arange(1, P + 1, dtype=float)
    lf = gammaln(p + 1)
    plogp = p * np.log(p)
    return bool(np.all(plogp - p <= lf + 1e-12) and np.all(lf <= plogp + 1e-12))


SEQUENCE_FAMILIES = ("gevrey", "q_gevrey", "beta3_counterexample")


def sequence_from_spec(spec: dict) -> WeightSequence:
    """Spec forms: {"family": ..., "params": {...}, "P": n} or {"log_mu": [...]} (exports load back)."""
    if not isinstance(spec, dict):
        raise SequenceError("sequence spec must be a JSON object")
    if "log_mu" in spec:
        flags = spec.get("flags", KNOWN_FLAGS)
        return from_log_quotients(spec["log_mu"], flags=flags, label=spec.get("label", "explicit"))
    family = spec.get("family")
    params = dict(spec.get("params", {}))
    try:
        if family == "gevrey":
            return gevrey(float(params.get("s", 1.0)), int(spec.get("P", params.get("P", 200))))
        if family == "q_gevrey":
            return q_gevrey(float(params.get("q", 2.0)), int(spec.get("P", params.get("P", 200))))
        if family == "beta3_counterexample":
            return counterexample_beta3(int(params.get("J", 5)))
    except (TypeError, ValueError) as e:
        raise SequenceError(f"bad parameters for {family}: {e}") from None
    raise SequenceError(f"spec needs 'log_mu' or a family in {', '.join(SEQUENCE_FAMILIES)}; got {family!r}")
