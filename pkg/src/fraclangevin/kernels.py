"""Square-integrable Volterra kernels for both Hurst regimes.

The kernel K(t, s) turns Brownian increments into fractional Brownian
motion, B^H_t = int_0^t K(t,s) dB_s.  Its form changes at H = 1/2:

* H > 1/2:  K(t,s) = c_H s^(1/2-H) int_s^t (u-s)^(H-3/2) u^(H-1/2) du
* H < 1/2:  K(t,s) = c_H [ (t/s)^(H-1/2) (t-s)^(H-1/2)
                           - (H-1/2) s^(1/2-H) int_s^t u^(H-3/2) (u-s)^(H-1/2) du ]
* H = 1/2:  K == 1 (plain Brownian motion).

The inner integrals are weakly singular at u = s.  Substituting
x = (u-s)^p with p the singular exponent plus one turns the integrand
into the bounded function (s + x^(1/p))^g, which composite Gauss-
Legendre panels (geometrically graded toward the endpoints) integrate
well past the 1e-6 relative contract over the whole parameter range.
Everything here is vectorized over s so that building full kernel
matrices stays cheap.

Quadrature weights for integrals int_0^t K(t,s) f(s) ds use midpoint
nodes, never endpoints: K blows up at s = 0 in both regimes, and for
H < 1/2 also at s = t, where the leading (t-s)^(H-1/2) factor of the
final cell is integrated analytically instead.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .core import TimeGrid

__all__ = [
    "Regime",
    "KernelSpec",
    "QuadratureRule",
    "beta_fn",
    "make_kernel_spec",
    "kernel_value",
    "kernel_dt",
    "fbm_covariance",
    "kernel_weights",
    "verify_covariance_identity",
    "kernel_matrix",
    "weight_matrix",
]

# |H - 1/2| below this is treated as standard Bm: the c_H formulas are
# numerically explosive in that band (both divide by a vanishing factor).
HALF_GUARD = 1e-6


class Regime(enum.Enum):
    ABOVE_HALF = "above_half"
    BELOW_HALF = "below_half"
    STANDARD = "standard"


def beta_fn(a: float, b: float) -> float:
    """Euler Beta via log-Gamma, exp(lnG(a) + lnG(b) - lnG(a+b)).

    The log-Gamma route avoids the overflow/cancellation a direct
    Gamma quotient hits for small arguments; ``math.lgamma`` is the
    C library's Lanczos-type implementation.
    """
    if not (a > 0 and b > 0):
        raise ValueError("beta_fn requires positive arguments")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


@dataclass(frozen=True)
class KernelSpec:
    """Hurst index with its regime tag and normalizing constant.

    ``c_h`` is None exactly for the STANDARD regime (it is never used
    there and the defining formulas are singular at H = 1/2).
    """

    hurst: float
    regime: Regime
    c_h: float | None

    def __post_init__(self):
        if self.regime is Regime.STANDARD:
            if self.c_h is not None:
                raise ValueError("standard regime carries no c_h")
        elif not (self.c_h is not None and self.c_h > 0):
            raise ValueError("c_h must be positive outside the standard regime")


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Midpoint nodes in (0, t) and weights for int_0^t K(t,s) f(s) ds."""

    nodes: np.ndarray
    weights: np.ndarray
    target_time: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape:
            raise ValueError("nodes and weights must have equal length")
        if nodes.size and not ((nodes > 0) & (nodes < self.target_time)).all():
            raise ValueError("nodes must lie strictly inside (0, t)")
        if nodes.size > 1 and not (np.diff(nodes) > 0).all():
            raise ValueError("nodes must be strictly increasing")
        if not np.isfinite(weights).all():
            raise ValueError("weights must be finite")
        for arr in (nodes, weights):
            arr.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def apply(self, values_at_nodes: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values_at_nodes, dtype=float))


def make_kernel_spec(hurst: float) -> KernelSpec:
    """Classify H and compute the regime's normalizing constant."""
    if not (0.0 < hurst < 1.0):
        raise ValueError(f"Hurst index must lie in (0, 1); got {hurst!r}")
    if abs(hurst - 0.5) < HALF_GUARD:
        return KernelSpec(0.5, Regime.STANDARD, None)
    if hurst > 0.5:
        c = math.sqrt(hurst * (2 * hurst - 1) / beta_fn(2 - 2 * hurst, hurst - 0.5))
        return KernelSpec(hurst, Regime.ABOVE_HALF, c)
    c = math.sqrt(2 * hurst / ((1 - 2 * hurst) * beta_fn(1 - 2 * hurst, hurst + 0.5)))
    return KernelSpec(hurst, Regime.BELOW_HALF, c)


# ---------------------------------------------------------------------------
# graded composite Gauss-Legendre machinery for the regularized inner integral
# ---------------------------------------------------------------------------

_GL_ORDER = 12
_GL_PANELS = 10
_GL_DECAY = 0.2  # geometric grading ratio of panel edges toward x = 0


@lru_cache(maxsize=None)
def _reference_rule(order: int, panels: int, decay: float, two_sided: bool):
    """Composite GL nodes/weights on [0, 1], panels graded toward 0.

    With ``two_sided`` the grading is mirrored about 1/2 so that sharp
    transitions near either endpoint are resolved (the above-half
    integrand steepens near x = 1 as H approaches 1/2).
    """
    x, w = leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    if two_sided:
        half = 0.5 * decay ** np.arange(panels // 2 - 1, -1, -1, dtype=float)
        edges = np.concatenate(([0.0], half, (1.0 - half)[::-1][1:], [1.0]))
    else:
        edges = np.concatenate(
            ([0.0], decay ** np.arange(panels - 1, -1, -1, dtype=float)))
    nodes = (edges[:-1, None] + np.diff(edges)[:, None] * x[None, :]).ravel()
    weights = (np.diff(edges)[:, None] * w[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=64)
def _inner_rule(hurst: float, regime: Regime):
    """Transformed rule for int_s^t of the regime's singular integrand.

    After x = (u-s)^p the integral becomes
        (1/p) * int_0^X (s + x^(1/p))^g dx,      X = (t-s)^p,
    with (p, g) = (H-1/2, H-1/2) above half and (H+1/2, H-3/2) below.
    Scaling the reference nodes by X gives (X*nu)^(1/p) = (t-s)*nu^(1/p),
    so only nu^(1/p) is precomputed here and a single power per node
    remains at evaluation time.
    """
    if regime is Regime.ABOVE_HALF:
        p = hurst - 0.5
        g = hurst - 0.5
        nodes, weights = _reference_rule(_GL_ORDER, _GL_PANELS, _GL_DECAY, True)
    else:
        p = hurst + 0.5
        g = hurst - 1.5
        nodes, weights = _reference_rule(_GL_ORDER, _GL_PANELS, _GL_DECAY, False)
    return nodes ** (1.0 / p), weights.copy(), p, g


def _kernel_values(spec: KernelSpec, t, s: np.ndarray) -> np.ndarray:
    """Vectorized K(t, s); ``t`` may be a scalar or an array matching s."""
    s = np.asarray(s, dtype=float)
    if spec.regime is Regime.STANDARD:
        return np.ones_like(s)
    h = spec.hurst
    u, w, p, g = _inner_rule(h, spec.regime)
    gap = t - s
    core = np.multiply.outer(u, gap)
    core += s
    np.power(core, g, out=core)
    inner = w @ core
    inner *= gap ** p / p
    s_pow = s ** (0.5 - h)  # s^(1/2-H)
    if spec.regime is Regime.ABOVE_HALF:
        return spec.c_h * s_pow * inner
    first = t ** (h - 0.5) * s_pow * gap ** (h - 0.5)
    inner *= (h - 0.5) * s_pow
    return spec.c_h * (first - inner)


def kernel_value(spec: KernelSpec, t: float, s: float) -> float:
    """K(t, s) for a single point, 0 < s < t."""
    if not (0.0 < s < t):
        raise ValueError("kernel_value requires 0 < s < t")
    return float(_kernel_values(spec, float(t), np.array([s]))[0])


def kernel_dt(spec: KernelSpec, t: float, s: float) -> float:
    """Closed-form time derivative of the kernel, 0 < s < t.

    c_H (t/s)^(H-1/2) (t-s)^(H-3/2), carrying an extra (H-1/2) factor
    below half; identically 0 in the standard regime.
    """
    if not (0.0 < s < t):
        raise ValueError("kernel_dt requires 0 < s < t (it diverges at s = t)")
    if spec.regime is Regime.STANDARD:
        return 0.0
    h = spec.hurst
    val = spec.c_h * (t / s) ** (h - 0.5) * (t - s) ** (h - 1.5)
    if spec.regime is Regime.BELOW_HALF:
        val *= h - 0.5
    return float(val)


def fbm_covariance(hurst: float, s: float, t: float) -> float:
    """R(t, s) = (t^2H + s^2H - |t-s|^2H) / 2, the fBm covariance."""
    if not (0.0 < hurst < 1.0):
        raise ValueError(f"Hurst index must lie in (0, 1); got {hurst!r}")
    if s < 0 or t < 0:
        raise ValueError("covariance arguments must be nonnegative")
    two_h = 2.0 * hurst
    return 0.5 * (t**two_h + s**two_h - abs(t - s) ** two_h)


# ---------------------------------------------------------------------------
# product quadrature on a grid
# ---------------------------------------------------------------------------


def _below_singular_split(spec: KernelSpec, t: float, m: float, k_at_m: float):
    """Split K(t, m) = a * (t-m)^(H-1/2) + r near the s = t singularity."""
    h = spec.hurst
    a = spec.c_h * (t / m) ** (h - 0.5)
    r = k_at_m - a * (t - m) ** (h - 0.5)
    return a, r


def _weight_row(spec: KernelSpec, t: float, mids: np.ndarray,
                widths: np.ndarray, kvals: np.ndarray) -> np.ndarray:
    """Midpoint weights K(t, m_j) * width_j with the singular-cell fix.

    Below half the final cell [t-delta, t] integrates the leading
    (t-s)^(H-1/2) factor exactly, delta^(H+1/2)/(H+1/2), against the
    smooth cofactor frozen at the cell midpoint.
    """
    weights = kvals * widths
    if spec.regime is Regime.BELOW_HALF:
        h = spec.hurst
        delta = widths[-1]
        a, r = _below_singular_split(spec, t, float(mids[-1]), float(kvals[-1]))
        weights[-1] = a * delta ** (h + 0.5) / (h + 0.5) + r * delta
    return weights


def kernel_weights(spec: KernelSpec, t: float, grid: TimeGrid) -> QuadratureRule:
    """Quadrature rule for int_0^t K(t,s) f(s) ds on the grid's cells.

    ``t`` must be a positive grid point; nodes are the midpoints of the
    grid cells inside [0, t].  The standard regime degenerates to the
    plain midpoint rule (K == 1).
    """
    i = grid.index_of(t)
    if i == 0:
        raise ValueError("t must be a positive grid point")
    mids = grid.midpoints[:i]
    widths = grid.widths[:i]
    if spec.regime is Regime.STANDARD:
        return QuadratureRule(mids, widths.copy(), float(t))
    kvals = _kernel_values(spec, float(t), mids)
    weights = _weight_row(spec, float(t), mids, widths, kvals)
    return QuadratureRule(mids, weights, float(t))


def kernel_matrix(spec: KernelSpec, grid: TimeGrid) -> np.ndarray:
    """Lower-triangular matrix M[i, j] = K(t_{i+1}, m_j) for j <= i.

    Row i discretizes integrals up to the positive grid point t_{i+1}
    against cell midpoints; the strict upper triangle is zero.  The
    returned array is cached and read-only: building it is the dominant
    cost of kernel-based sampling, so it is shared between callers.
    """
    return _kernel_matrix_cached(spec, grid)


@lru_cache(maxsize=4)
def _kernel_matrix_cached(spec: KernelSpec, grid: TimeGrid) -> np.ndarray:
    n = grid.n_cells
    mids = grid.midpoints
    out = np.zeros((n, n))
    if spec.regime is Regime.STANDARD:
        out[np.tril_indices(n)] = 1.0
    else:
        pts = grid.points
        for i in range(n):
            out[i, : i + 1] = _kernel_values(spec, float(pts[i + 1]), mids[: i + 1])
    out.flags.writeable = False
    return out


def weight_matrix(spec: KernelSpec, grid: TimeGrid) -> np.ndarray:
    """Stacked kernel_weights rows: W[i, j] weights f(m_j) for t_{i+1}.

    Cached and read-only, like :func:`kernel_matrix`.
    """
    return _weight_matrix_cached(spec, grid)


@lru_cache(maxsize=4)
def _weight_matrix_cached(spec: KernelSpec, grid: TimeGrid) -> np.ndarray:
    n = grid.n_cells
    mids = grid.midpoints
    widths = grid.widths
    kmat = _kernel_matrix_cached(spec, grid)
    out = kmat * widths[None, :]
    if spec.regime is Regime.BELOW_HALF:
        h = spec.hurst
        pts = grid.points[1:]
        diag = np.arange(n)
        a = spec.c_h * (pts / mids) ** (h - 0.5)
        r = kmat[diag, diag] - a * (pts - mids) ** (h - 0.5)
        out[diag, diag] = a * widths ** (h + 0.5) / (h + 0.5) + r * widths
    out.flags.writeable = False
    return out


def verify_covariance_identity(spec: KernelSpec, s: float, t: float, n: int) -> float:
    """Relative residual of int_0^(s^t) K(t,u) K(s,u) du against R(t,s).

    Uses an n-cell midpoint product quadrature on [0, min(s,t)] with the
    same singular-cell treatment as kernel_weights; the residual shrinks
    as n grows, which is the numerical witness that the kernels really
    reproduce the fBm covariance.
    """
    if spec.regime is Regime.STANDARD:
        raise ValueError("identity check applies to the fractional regimes only")
    if not (s > 0 and t > 0):
        raise ValueError("s and t must be positive")
    n = int(n)
    if n < 16:
        raise ValueError("need at least 16 quadrature cells")
    lo, hi = (s, t) if s <= t else (t, s)
    edges = np.linspace(0.0, lo, n + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    delta = lo / n
    k_lo = _kernel_values(spec, lo, mids)
    k_hi = k_lo if hi == lo else _kernel_values(spec, hi, mids)
    terms = k_lo * k_hi * delta
    if spec.regime is Regime.BELOW_HALF:
        h = spec.hurst
        m = float(mids[-1])
        a, r = _below_singular_split(spec, lo, m, float(k_lo[-1]))
        sing_cell = delta ** (h + 0.5) / (h + 0.5)
        if hi == lo:
            terms[-1] = (a * a * delta ** (2 * h) / (2 * h)
                         + 2 * a * r * sing_cell + r * r * delta)
        else:
            terms[-1] = float(k_hi[-1]) * (a * sing_cell + r * delta)
    quad = float(terms.sum())
    target = fbm_covariance(spec.hurst, s, t)
    return abs(quad - target) / target
