"""Fractional Brownian motion synthesis, two independent ways.

The exact route factorizes the covariance matrix R(t_i, t_j) and maps
i.i.d. normals through the Cholesky factor: the finite-dimensional law
is exact, which makes it the reference oracle (at O(n^3) desk scale).
The kernel route discretizes B^H_t = int_0^t K(t,s) dB_s with midpoint
kernel values against raw Brownian increments; it is consistent as the
mesh shrinks and reduces to plain Bm partial sums at H = 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import NoiseStream, Path, TimeGrid
from .kernels import KernelSpec, Regime, kernel_matrix
from .noise import gaussian_increments

__all__ = [
    "CovMatrix",
    "DecompositionError",
    "covariance_matrix",
    "cholesky_factor",
    "sample_fbm_exact",
    "sample_fbm_kernel",
]


class DecompositionError(RuntimeError):
    """Covariance matrix was not numerically positive definite."""


@dataclass(frozen=True, eq=False)
class CovMatrix:
    """fBm covariance on the positive grid points (t = 0 is excluded:
    B^H_0 is pinned to zero and would make the matrix singular)."""

    grid: TimeGrid
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        k = self.grid.points.size - 1
        if m.shape != (k, k):
            raise ValueError("entries must be square over the positive grid points")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)


def covariance_matrix(hurst: float, grid: TimeGrid) -> CovMatrix:
    """Matrix M[i][j] = R(t_i, t_j) over the positive grid points."""
    if not (0.0 < hurst < 1.0):
        raise ValueError(f"Hurst index must lie in (0, 1); got {hurst!r}")
    pts = grid.points[1:]
    two_h = 2.0 * hurst
    p = pts**two_h
    m = 0.5 * (p[:, None] + p[None, :] - np.abs(pts[:, None] - pts[None, :]) ** two_h)
    return CovMatrix(grid, m)


def cholesky_factor(cov: CovMatrix) -> np.ndarray:
    """Lower-triangular L with L L^T = entries.

    Raises :class:`DecompositionError` when a pivot fails, i.e. the
    matrix is not numerically positive definite.
    """
    try:
        return np.linalg.cholesky(cov.entries)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"covariance is not positive definite: {exc}") from exc


@lru_cache(maxsize=4)
def _cholesky_cached(hurst: float, grid: TimeGrid) -> np.ndarray:
    ell = cholesky_factor(covariance_matrix(hurst, grid))
    ell.flags.writeable = False
    return ell


def sample_fbm_exact(hurst: float, grid: TimeGrid, stream: NoiseStream) -> Path:
    """Draw one fBm path with the exact finite-dimensional law N(0, R)."""
    ell = _cholesky_cached(float(hurst), grid)
    z = stream.generator().standard_normal(grid.n_cells)
    return Path(grid, np.concatenate(([0.0], ell @ z)))


def sample_fbm_kernel(spec: KernelSpec, grid: TimeGrid, stream: NoiseStream) -> Path:
    """Volterra-kernel synthesis from Brownian increments.

    B^H(t_i) ~= sum_{j < i} K(t_i, m_j) dB_j with the increments drawn
    from the stream; the standard regime returns the plain partial sums
    of the same increments (K == 1).
    """
    db = gaussian_increments(grid, stream)
    if spec.regime is Regime.STANDARD:
        return Path(grid, np.concatenate(([0.0], np.cumsum(db))))
    kmat = kernel_matrix(spec, grid)
    return Path(grid, np.concatenate(([0.0], kmat @ db)))
