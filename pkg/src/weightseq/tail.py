"""Finite-window surrogates for sup/liminf/limsup statements.

Two shapes of evidence are used throughout the package:

* bounded-sup questions ("is sup_p v_p finite?") are answered from the running
  sup sampled at dyadic checkpoints of the data range;
* strict-liminf questions ("is liminf v_p > thr?") are answered from the
  minimum over a tail window together with the minimum over its last quarter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STABLE = "stable"
CONVERGING = "converging"
DIVERGING = "diverging"
ERRATIC = "erratic"

# ratios of successive running-sup increments
CONVERGING_RATIO = 0.6
DIVERGING_RATIO = 0.85


@dataclass(frozen=True)
class SupTrend:
    """Classification of a running sup observed at increasing checkpoints."""

    trend: str
    observed: float
    estimate: float
    levels: tuple[float, ...]

    @property
    def bounded(self) -> bool:
        return self.trend in (STABLE, CONVERGING)

    @property
    def diverging(self) -> bool:
        return self.trend == DIVERGING


def classify_levels(levels, tol: float) -> SupTrend:
    """Classify a nondecreasing sequence of running-sup levels.

    ``tol`` is relative to ``max(1, |last level|)``. Geometric decay of the
    increments is extrapolated; non-decaying increments count as divergence.
    """
    lv = np.maximum.accumulate(np.asarray(levels, dtype=float))
    last = float(lv[-1])
    if not math.isfinite(last):
        return SupTrend(DIVERGING, last, math.inf, tuple(lv))
    d = np.diff(lv)[-3:]
    scale = max(1.0, abs(last))
    if len(d) == 0 or d[-1] <= tol * scale:
        return SupTrend(STABLE, last, last, tuple(lv))
    if len(d) == 3 and np.all(d > 0):
        ratios = d[1:] / d[:-1]
        if ratios.max() <= CONVERGING_RATIO:
            r = float(ratios.max())
            return SupTrend(CONVERGING, last, last + float(d[-1]) * r / (1.0 - r), tuple(lv))
        if ratios.min() >= DIVERGING_RATIO:
            return SupTrend(DIVERGING, last, math.inf, tuple(lv))
    return SupTrend(ERRATIC, last, last, tuple(lv))


def dyadic_checkpoints(n: int, count: int = 4, start: int = 1) -> list[int]:
    """Checkpoints n/2^(count-1), ..., n/2, n (deduplicated, each >= start)."""
    pts = sorted({max(start, n >> k) for k in range(count)})
    return pts


def running_sup_trend(values, tol: float, count: int = 4) -> SupTrend:
    """Trend of ``max(values[:k])`` for k at dyadic checkpoints of ``len(values)``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty value array")
    run = np.maximum.accumulate(v)
    levels = [run[k - 1] for k in dyadic_checkpoints(v.size, count)]
    return classify_levels(levels, tol)


def sup_over_prefixes(values, checkpoints) -> list[float]:
    """Running max of ``values`` evaluated at the given prefix lengths."""
    run = np.maximum.accumulate(np.asarray(values, dtype=float))
    return [float(run[min(k, run.size) - 1]) for k in checkpoints]


@dataclass(frozen=True)
class WindowMin:
    """Minimum of a sequence over a tail window and over its last quarter."""

    full_min: float
    last_quarter_min: float
    argmin: int
    last_quarter_argmin: int
    lo: int
    hi: int


def window_min(values, lo: int, hi: int, index_offset: int = 0) -> WindowMin:
    """Window statistics of ``values[lo:hi+1]``; indices reported with ``index_offset``."""
    if hi < lo:
        raise ValueError(f"empty window [{lo}, {hi}]")
    seg = np.asarray(values[lo : hi + 1], dtype=float)
    q0 = len(seg) - max(1, len(seg) // 4)
    i_full = int(np.argmin(seg))
    i_last = q0 + int(np.argmin(seg[q0:]))
    return WindowMin(
        full_min=float(seg[i_full]),
        last_quarter_min=float(seg[i_last]),
        argmin=lo + i_full + index_offset,
        last_quarter_argmin=lo + i_last + index_offset,
        lo=lo + index_offset,
        hi=hi + index_offset,
    )


def liminf_decision(w: WindowMin, threshold: float, margin: float, eps: float) -> str:
    """'holds' / 'fails' / 'inconclusive' for ``liminf > threshold``."""
    if w.full_min >= threshold + margin:
        return "holds"
    if w.last_quarter_min <= threshold + eps:
        return "fails"
    return "inconclusive"


def suffix_min(a):
    """out[i] = min(a[i:])."""
    return np.minimum.accumulate(np.asarray(a, dtype=float)[::-1])[::-1]


def pairwise_drop(a, n: int | None = None, gap: int = 1):
    """max over 1 <= p, q <= n with q >= gap*p of a[p] - a[q] (a indexed from 0, p >= 1).

    Returns (value, p, q). O(n) via suffix minima.
    """
    a = np.asarray(a, dtype=float)
    n = a.size - 1 if n is None else n
    if n < 1:
        raise ValueError("need at least one index")
    smin = suffix_min(a[: n + 1])
    ps = np.arange(1, n // gap + 1)
    if ps.size == 0:
        return -math.inf, 0, 0
    drops = a[ps] - smin[gap * ps]
    k = int(np.argmax(drops))
    p = int(ps[k])
    seg = a[gap * p : n + 1]
    q = gap * p + int(np.argmin(seg))
    return float(drops[k]), p, q


def dyadic_blocks(n: int, count: int = 4) -> list[tuple[int, int]]:
    """Index blocks (n/2^(k+1), n/2^k] for k = count-1..0, as half-open [lo, hi) over 0..n-1."""
    out = []
    for k in range(count - 1, -1, -1):
        lo, hi = n >> (k + 1), n >> k
        if hi > lo:
            out.append((lo, hi))
    return out


def block_maxima(values, count: int = 4) -> list[float]:
    v = np.asarray(values, dtype=float)
    return [float(v[lo:hi].max()) for lo, hi in dyadic_blocks(v.size, count)]


def equal_blocks(n: int, count: int = 4) -> list[tuple[int, int]]:
    edges = np.linspace(0, n, count + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def tail_rising(levels) -> bool:
    """Block maxima that keep rising with non-decaying increments."""
    lv = np.asarray(levels, dtype=float)
    if lv.size < 4 or not np.all(np.isfinite(lv)):
        return bool(lv.size and not math.isfinite(lv[-1]) and lv[-1] > 0)
    d = np.diff(lv)[-3:]
    if not np.all(d > 0):
        return False
    return bool((d[1:] / d[:-1]).min() >= DIVERGING_RATIO)


def sup_trend(values, tol: float, count: int = 4) -> SupTrend:
    """Running-sup trend, overridden to DIVERGING when dyadic block maxima keep rising.

    The block tests catch tails that grow without bound but have not yet
    overtaken a large early value (which would freeze the running sup).
    """
    v = np.asarray(values, dtype=float)
    r = running_sup_trend(v, tol, count)
    if v.size >= 2 ** count and tail_rising(block_maxima(v, count)):
        return SupTrend(DIVERGING, r.observed, math.inf, r.levels)
    if r.bounded and v.size >= 2 ** (count + 1):
        # a tail still climbing below an early maximum cannot certify a bound
        lt = limsup_trend(v[v.size // 2 :], tol, count)
        if lt.diverging:
            return SupTrend(DIVERGING, r.observed, math.inf, r.levels)
        if lt.trend == ERRATIC:
            return SupTrend(ERRATIC, r.observed, r.observed, r.levels)
    return r


@dataclass(frozen=True)
class LimsupTrend:
    """Block statistics of a function sampled on an increasing tail grid."""

    trend: str
    estimate: float  # limsup surrogate: max over the last block
    sup: float  # max over the whole window
    block_max: tuple[float, ...]
    block_min: tuple[float, ...]
    last: float = math.nan  # value at the end of the window

    @property
    def bounded(self) -> bool:
        return self.trend in (STABLE, CONVERGING)

    @property
    def diverging(self) -> bool:
        return self.trend == DIVERGING

    @property
    def decreasing(self) -> bool:
        return self.block_max[-1] < self.block_max[0] - 1e-12 * max(1.0, abs(self.block_max[0]))


def limsup_trend(values, tol: float, count: int = 4) -> LimsupTrend:
    """limsup surrogate over ``count`` equal blocks of a tail grid.

    STABLE when the last block does not exceed the earlier ones (by ``tol``
    relative), DIVERGING when block maxima rise with non-decaying increments,
    CONVERGING when the rise decays geometrically.
    """
    v = np.asarray(values, dtype=float)
    blocks = equal_blocks(v.size, count)
    if len(blocks) < 2:
        raise ValueError("need at least two blocks")
    bmax = [float(v[a:b].max()) for a, b in blocks]
    bmin = [float(v[a:b].min()) for a, b in blocks]
    last, prev = bmax[-1], max(bmax[:-1])
    estimate = last
    scale = max(1.0, abs(last))
    if not math.isfinite(last):
        trend = DIVERGING
    elif last <= prev + tol * scale:
        trend = STABLE
    elif tail_rising(bmax):
        trend = DIVERGING
    else:
        d = np.diff(bmax)
        if len(d) >= 3 and np.all(d[-3:] > 0) and (d[-2:] / d[-3:-1]).max() <= CONVERGING_RATIO:
            trend = CONVERGING
            r = float((d[-2:] / d[-3:-1]).max())
            estimate = last + float(d[-1]) * r / (1.0 - r)
        else:
            trend = ERRATIC
    return LimsupTrend(trend, estimate, float(v.max()), tuple(bmax), tuple(bmin), float(v[-1]))
