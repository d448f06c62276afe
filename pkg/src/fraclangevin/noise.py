"""Seeded noise sources: Gaussian increments, rescaled random walks,
quadratic variation, and the piecewise-constant white-noise smoothing.

The smoothing family puts an i.i.d. level xi_k / eps on each interval
[(k-1) eps^2, k eps^2), so its running integral performs a rescaled
random walk whose variance at t = k eps^2 is exactly t.  Note the 1/eps
amplitude: without it the integral's variance would collapse like eps^2
and no Brownian limit would exist.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import NoiseStream, Path, TimeGrid
from .kernels import KernelSpec, weight_matrix

__all__ = [
    "StepKind",
    "StepDistribution",
    "StepFunction",
    "gaussian_increments",
    "quadratic_variation",
    "donsker_path",
    "theta_epsilon_path",
    "smoothed_fbm",
]


class StepKind(enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


@dataclass(frozen=True)
class StepDistribution:
    """Centered step law with variance sigma^2.

    Rademacher steps (+/- sigma) are bounded, so every moment is finite;
    that satisfies the moment requirement m > 1/H of the smoothing
    construction for any Hurst index without case analysis.
    """

    kind: StepKind = StepKind.RADEMACHER
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("step std must be positive")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind is StepKind.GAUSSIAN:
            return self.sigma * rng.standard_normal(size)
        return self.sigma * (2.0 * rng.integers(0, 2, size) - 1.0)


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-open piecewise-constant function on [0, support_end]."""

    breakpoints: np.ndarray
    levels: np.ndarray
    support_end: float

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        lv = np.asarray(self.levels, dtype=float)
        if bp.size != lv.size + 1:
            raise ValueError("need one level per interval between breakpoints")
        if not (np.diff(bp) > 0).all():
            raise ValueError("breakpoints must be strictly increasing")
        if not np.isfinite(lv).all():
            raise ValueError("levels must be finite")
        for arr in (bp, lv):
            arr.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "levels", lv)

    def value_at(self, s) -> np.ndarray:
        """Level on the interval containing s (right-open intervals)."""
        idx = np.searchsorted(self.breakpoints, s, side="right") - 1
        return self.levels[np.clip(idx, 0, self.levels.size - 1)]

    def integral_to(self, x: float) -> float:
        """Exact integral of the step function over [0, x]."""
        upper = np.minimum(self.breakpoints[1:], x)
        lengths = np.clip(upper - self.breakpoints[:-1], 0.0, None)
        return float(self.levels @ lengths)


def gaussian_increments(grid: TimeGrid, stream: NoiseStream) -> np.ndarray:
    """Independent N(0, t_i - t_{i-1}) variates, one per grid cell."""
    rng = stream.generator()
    return rng.standard_normal(grid.n_cells) * np.sqrt(grid.widths)


def quadratic_variation(path: Path) -> float:
    """Sum of squared increments; tends to the horizon T for Bm paths."""
    d = np.diff(path.values)
    return float(d @ d)


def donsker_path(n: int, horizon: float, dist: StepDistribution,
                 stream: NoiseStream) -> Path:
    """Rescaled random-walk polygonal line sampled at its kinks.

    Kinks sit at multiples of 1/n, where the line equals the partial
    sums of the steps divided by sigma * sqrt(n); sampling exactly there
    loses nothing because the line is linear in between.  ``n * horizon``
    is rounded to the nearest integer cell count.
    """
    n = int(n)
    if n < 1:
        raise ValueError("need n >= 1 steps per unit time")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    cells = max(1, round(n * horizon))
    steps = dist.sample(stream.generator(), cells)
    values = np.concatenate(([0.0], np.cumsum(steps))) / (dist.sigma * math.sqrt(n))
    return Path(TimeGrid(np.arange(cells + 1) / n), values)


def theta_epsilon_path(epsilon: float, horizon: float, dist: StepDistribution,
                       stream: NoiseStream) -> StepFunction:
    """White-noise smoothing: level xi_k / eps on [(k-1) eps^2, k eps^2)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    cell = epsilon * epsilon
    count = max(1, math.ceil(horizon / cell - 1e-12))
    steps = dist.sample(stream.generator(), count)
    return StepFunction(np.arange(count + 1) * cell, steps / epsilon, horizon)


def smoothed_fbm(spec: KernelSpec, epsilon: float, grid: TimeGrid,
                 stream: NoiseStream,
                 dist: StepDistribution = StepDistribution(StepKind.GAUSSIAN)) -> Path:
    """Kernel-smoothed noise int_0^t K(t,s) theta_eps(s) ds on the grid.

    As eps shrinks this converges in law to fractional Brownian motion;
    the integral is evaluated with the midpoint kernel weights, so grids
    aligned with the eps^2 cells sample the step function exactly.
    """
    theta = theta_epsilon_path(epsilon, grid.horizon, dist, stream)
    levels_at_mids = theta.value_at(grid.midpoints)
    w = weight_matrix(spec, grid)
    return Path(grid, np.concatenate(([0.0], w @ levels_at_mids)))
