"""Rescaled-range (R/S) estimation of the Hurst index.

For each prefix X_1..X_t of the series: center by the prefix mean,
cumulate the centered values into Z (a pinned bridge, Z_t = 0), take
the range R_t = max Z - min Z, and normalize by the population
standard deviation S_t of the same prefix.  The rescaled range grows
like lambda * t^H for large t, so an ordinary least-squares fit of
ln(R_t/S_t) on ln(t) estimates H (slope) and lambda (exp intercept).

Centering each prefix by its own mean (rather than centering once by
the full-series mean) is what keeps the estimator consistent: a global
center turns the largest prefixes into pinned bridges with suppressed
ranges and drags the fitted slope well below the true index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RSSeries",
    "HurstEstimate",
    "DegenerateSeriesError",
    "rs_series",
    "loglog_regression",
    "estimate_hurst",
]

DEFAULT_T_MIN = 16  # "t large enough": smaller prefixes are dropped from the fit


class DegenerateSeriesError(ValueError):
    """Series carries no usable rescaled-range entries."""


@dataclass(frozen=True, eq=False)
class RSSeries:
    """Prefix lengths t and their rescaled ranges R_t/S_t (both > 0)."""

    lengths: np.ndarray
    ratios: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.lengths, dtype=int)
        rs = np.asarray(self.ratios, dtype=float)
        if t.shape != rs.shape:
            raise ValueError("lengths and ratios must align")
        if t.size and ((np.diff(t) <= 0).any() or t[0] < 2):
            raise ValueError("prefix lengths must be >= 2 and strictly increasing")
        if not (rs > 0).all():
            raise ValueError("rescaled ranges must be positive")
        for arr in (t, rs):
            arr.flags.writeable = False
        object.__setattr__(self, "lengths", t)
        object.__setattr__(self, "ratios", rs)


@dataclass(frozen=True)
class HurstEstimate:
    hurst: float
    amplitude: float
    r_squared: float
    points_used: int

    def __post_init__(self):
        if self.points_used < 2:
            raise ValueError("an estimate needs at least two fit points")


def rs_series(series) -> RSSeries:
    """Rescaled-range entries (t, R_t/S_t) for prefixes t = 2..n.

    Entries whose standard deviation or range vanishes are excluded
    (they carry no information and would break the log fit); if nothing
    remains, e.g. for a constant series, a DegenerateSeriesError is
    raised.  O(n^2): each prefix is recentered by its own mean.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a one-dimensional series of length >= 2")
    n = x.size
    # work on globally centered values so large offsets cost no precision;
    # per-prefix recentering below makes this mathematically neutral
    y = x - x.mean()
    sums = np.cumsum(y)
    t = np.arange(1, n + 1, dtype=float)
    drift = sums / t
    std = np.sqrt(np.clip(np.cumsum(y * y) / t - drift * drift, 0.0, None))
    ranges = np.empty(n)
    for i in range(n):
        z = sums[: i + 1] - drift[i] * t[: i + 1]
        ranges[i] = z.max() - z.min()
    keep = (std > 0) & (ranges > 0)
    keep[0] = False
    if not keep.any():
        raise DegenerateSeriesError("series has no positive rescaled-range entries")
    return RSSeries(np.nonzero(keep)[0] + 1, ranges[keep] / std[keep])


def loglog_regression(lengths, ratios) -> tuple[float, float, float]:
    """OLS of ln(ratio) on ln(length): returns (slope, intercept, r^2)."""
    t = np.asarray(lengths, dtype=float)
    rs = np.asarray(ratios, dtype=float)
    if t.size < 2:
        raise ValueError("regression needs at least two points")
    if (t < 1).any() or (rs <= 0).any():
        raise ValueError("regression needs lengths >= 1 and positive ratios")
    x = np.log(t)
    y = np.log(rs)
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise ValueError("regression needs at least two distinct lengths")
    slope = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    ss_res = float(np.sum((y - intercept - slope * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_sq = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r_sq


def estimate_hurst(series, t_min: int = DEFAULT_T_MIN) -> HurstEstimate:
    """Fit the rescaled-range growth law on prefixes of length >= t_min.

    The asymptotic law holds "for t large enough"; t_min makes that
    concrete and configurable.  The estimator is affine invariant:
    shifting cancels in the centering and scaling cancels in R/S.
    """
    if t_min < 2:
        raise ValueError("t_min must be at least 2")
    rs = rs_series(series)
    sel = rs.lengths >= t_min
    if int(sel.sum()) < 2:
        raise ValueError(
            f"fewer than two rescaled-range entries at t >= {t_min}")
    slope, intercept, r_sq = loglog_regression(rs.lengths[sel], rs.ratios[sel])
    return HurstEstimate(slope, math.exp(intercept), r_sq, int(sel.sum()))
