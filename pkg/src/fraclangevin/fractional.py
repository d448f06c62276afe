"""Fractional velocity transform, its expectation, and the amplitude fit.

An ordinary velocity path V is mapped to

    V^H_t = V_0 + phi(t) * int_0^t K(t,s) V_s ds,    phi(t) = A t^(1/2-H),

which rescales the kernel-weighted history of the velocity into a
long-memory observable.  The same kernel applied to the Langevin
equation itself yields the pathwise identity

    m int_0^t K(t,s) dV_s = -b int_0^t K(t,s) V_s ds + sigma B^H_t

when V and B^H are driven by one Brownian path; its discretized
residual is the falsifiable certificate that the transform, the kernel
quadrature and the samplers all fit together.  Finally the amplitude A
is recovered from measured transform values by averaging the per-time
ratios t^(H-1/2) (V^H_t - V_0) / int_0^t K(t,s) V_s ds.

The t -> 0 boundary of the transform is defined by continuity: below
half both factors vanish, above half the integral vanishes faster than
phi diverges, so V^H(0) = V_0 and phi is never evaluated at 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NoiseStream, Path, TimeGrid, uniform_grid
from .kernels import (KernelSpec, Regime, _kernel_values, _weight_row,
                      kernel_weights, weight_matrix)
from .langevin import LangevinParams
from .noise import gaussian_increments

__all__ = [
    "FractionalConfig",
    "FractionalPath",
    "DegenerateDenominatorError",
    "phi",
    "fractional_velocity",
    "expected_fractional_velocity",
    "transformed_langevin_residual",
    "normalized_residual_max",
    "residual_refinement_study",
    "estimate_ah",
]


class DegenerateDenominatorError(ValueError):
    """A kernel integral in the amplitude estimator vanished."""


@dataclass(frozen=True)
class FractionalConfig:
    """Kernel spec plus the normalization amplitude of phi."""

    spec: KernelSpec
    amplitude: float

    def __post_init__(self):
        if self.spec.regime is Regime.STANDARD:
            raise ValueError("the fractional transform needs H != 1/2")


@dataclass(frozen=True, eq=False)
class FractionalPath:
    """A velocity path together with its transform on the same grid."""

    base: Path
    transformed: Path

    def __post_init__(self):
        if self.base.grid != self.transformed.grid:
            raise ValueError("base and transformed paths must share a grid")


def phi(config: FractionalConfig, t: float) -> float:
    """Power-law normalization A * t^(1/2 - H), defined for t > 0."""
    if not t > 0:
        raise ValueError("phi is defined for positive times only")
    return config.amplitude * t ** (0.5 - config.spec.hurst)


def _phi_values(config: FractionalConfig, times: np.ndarray) -> np.ndarray:
    return config.amplitude * times ** (0.5 - config.spec.hurst)


def _midpoint_values(v: Path) -> np.ndarray:
    # linear interpolation of the discrete path at the cell midpoints
    return 0.5 * (v.values[:-1] + v.values[1:])


def fractional_velocity(config: FractionalConfig, v: Path) -> FractionalPath:
    """Transform a velocity path: V_0 + phi(t_i) * <weights(t_i), V at nodes>."""
    vmid = _midpoint_values(v)
    w = weight_matrix(config.spec, v.grid)
    history = w @ vmid
    values = np.empty_like(v.values)
    values[0] = v.values[0]
    values[1:] = v.values[0] + _phi_values(config, v.grid.points[1:]) * history
    return FractionalPath(v, Path(v.grid, values))


def expected_fractional_velocity(config: FractionalConfig, params: LangevinParams,
                                 t: float, n: int) -> float:
    """E V^H_t = E V_0 (1 + phi(t) int_0^t K(t,s) e^(-(b/m)s) ds).

    The integral is evaluated with the kernel weights on an n-cell
    uniform subgrid of [0, t].
    """
    if not t > 0:
        raise ValueError("time must be positive")
    if int(n) < 16:
        raise ValueError("need at least 16 quadrature cells")
    rule = kernel_weights(config.spec, t, uniform_grid(t, int(n)))
    integral = rule.apply(np.exp(-params.rate * rule.nodes))
    return params.v0 * (1.0 + phi(config, t) * integral)


def _residual_pass(spec: KernelSpec, params: LangevinParams, grid: TimeGrid,
                   dv: np.ndarray, vmid: np.ndarray, db: np.ndarray):
    """Row-streamed residuals r(t_i) and kernel-sampled B^H(t_i).

    The column dimension batches independent paths; the kernel row at
    each t_i is computed once and shared by every column, which is what
    makes many-seed refinement studies affordable.
    """
    pts = grid.points
    mids = grid.midpoints
    widths = grid.widths
    n = grid.n_cells
    res = np.empty((n,) + dv.shape[1:])
    bh = np.empty_like(res)
    m, b, sig = params.mass, params.friction, params.sigma
    for i in range(1, n + 1):
        t = float(pts[i])
        kv = _kernel_values(spec, t, mids[:i])
        w = _weight_row(spec, t, mids[:i], widths[:i], kv)
        bh[i - 1] = kv @ db[:i]
        res[i - 1] = m * (kv @ dv[:i]) + b * (w @ vmid[:i]) - sig * bh[i - 1]
    return res, bh


def transformed_langevin_residual(spec: KernelSpec, params: LangevinParams,
                                  v: Path, brownian_increments) -> Path:
    """Pathwise residual of the kernel-transformed Langevin equation.

    ``v`` must be the Euler-Maruyama velocity driven by the very same
    increments; then r(t) = m sum K(t,.) dV + b <weights, V> - sigma B^H(t)
    vanishes up to discretization error, because the continuum identity
    is exact given a common driving Brownian path.
    """
    db = np.asarray(brownian_increments, dtype=float)
    if db.shape != (v.grid.n_cells,):
        raise ValueError("need exactly one Brownian increment per grid cell")
    res, _ = _residual_pass(spec, params, v.grid, np.diff(v.values),
                            _midpoint_values(v), db)
    return Path(v.grid, np.concatenate(([0.0], res)))


def normalized_residual_max(spec: KernelSpec, params: LangevinParams,
                            v: Path, brownian_increments) -> float:
    """max_t |r(t)| / (sigma * max_t |B^H_t|) for one driven path."""
    db = np.asarray(brownian_increments, dtype=float)
    if db.shape != (v.grid.n_cells,):
        raise ValueError("need exactly one Brownian increment per grid cell")
    res, bh = _residual_pass(spec, params, v.grid, np.diff(v.values),
                             _midpoint_values(v), db)
    return float(np.max(np.abs(res)) / (params.sigma * np.max(np.abs(bh))))


def _em_batch(params: LangevinParams, grid: TimeGrid, db: np.ndarray) -> np.ndarray:
    """Euler-Maruyama paths, one column per seed; returns (n+1, S)."""
    n, s = db.shape
    alpha = 1.0 - params.rate * grid.widths
    shocks = (params.sigma / params.mass) * db
    out = np.empty((n + 1, s))
    out[0] = params.v0
    for i in range(n):
        out[i + 1] = alpha[i] * out[i] + shocks[i]
    return out


def residual_refinement_study(spec: KernelSpec, params: LangevinParams,
                              horizon: float, cell_counts, n_seeds: int,
                              stream: NoiseStream) -> dict[int, np.ndarray]:
    """Normalized residual maxima per seed at several grid resolutions.

    One Brownian path per seed is generated at the finest resolution and
    block-summed onto the coarser grids, so each seed's residuals are
    compared on the same underlying noise.  Every cell count must divide
    the largest one.
    """
    counts = sorted(int(c) for c in cell_counts)
    n_max = counts[-1]
    if any(n_max % c for c in counts):
        raise ValueError("cell counts must divide the largest count")
    fine = uniform_grid(horizon, n_max)
    db_fine = np.column_stack([
        gaussian_increments(fine, stream.substream(k)) for k in range(int(n_seeds))
    ])
    out = {}
    for count in counts:
        grid = uniform_grid(horizon, count)
        db = db_fine.reshape(count, n_max // count, -1).sum(axis=1)
        paths = _em_batch(params, grid, db)
        vmid = 0.5 * (paths[:-1] + paths[1:])
        res, bh = _residual_pass(spec, params, grid, np.diff(paths, axis=0),
                                 vmid, db)
        out[count] = (np.abs(res).max(axis=0)
                      / (params.sigma * np.abs(bh).max(axis=0)))
    return out


def estimate_ah(spec: KernelSpec, observed: Path, v: Path) -> float:
    """Recover the amplitude from measured transform values.

    Averages t_i^(H-1/2) (V^H_i - V_0) / int_0^(t_i) K V over the
    positive grid times, with the denominators computed by the same
    kernel weights the forward transform uses, so a noiseless round
    trip returns the amplitude to floating-point accuracy.
    """
    if observed.grid != v.grid:
        raise ValueError("observed and velocity paths must share a grid")
    vmid = _midpoint_values(v)
    w = weight_matrix(spec, v.grid)
    denominators = w @ vmid
    times = v.grid.points[1:]
    scale = 1e-12 * max(1.0, float(np.max(np.abs(v.values))))
    bad = np.abs(denominators) < scale
    if bad.any():
        t_bad = float(times[int(np.argmax(bad))])
        raise DegenerateDenominatorError(
            f"kernel integral of the velocity vanishes at t={t_bad!r}")
    ratios = times ** (spec.hurst - 0.5) * (observed.values[1:] - v.values[0])
    ratios /= denominators
    return float(ratios.mean())
