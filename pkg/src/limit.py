"""
The limiting process (W, Z).

W and Z are the n -> infinity limits of X(t/n) / n^{1/2} and
Y(t/n) / n^{1/2}. This module evaluates their covariance kernel, the
assembled covariance at a set of points, the quadratic-form identity
behind its positive definiteness, a spectral simulator and the
finite-n kernel error.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .gpoly import Component, exclusion_width
from .kacrice import MAX_COVARIANCE_ORDER, Coordinate, CovarianceMatrix, cov_finite

SERIES_CUTOFF = 1e-4
SERIES_TERMS = 6
MIN_SPECTRAL_NODES = 64

_QUARTER_COS = (1.0, 0.0, -1.0, 0.0)
_QUARTER_SIN = (0.0, 1.0, 0.0, -1.0)


class LimitComponent(str, Enum):
    """Limit of X (W) or Y (Z)."""

    W = "W"
    Z = "Z"


_PHASE = {LimitComponent.W: 0, LimitComponent.Z: -1}
_LIMIT_OF = {Component.X: LimitComponent.W, Component.Y: LimitComponent.Z}


@dataclass(frozen=True, eq=False)
class LimitSample:
    """Realizations of (W, Z) on a grid, one row per realization."""

    grid: np.ndarray
    w: np.ndarray
    z: np.ndarray
    seed: int


@lru_cache(maxsize=65536)
def _oscillatory_moments(degree: int, frequency: float) -> tuple[float, float]:
    """int_0^1 theta^d cos(u theta) and int_0^1 theta^d sin(u theta) for u > 0."""

    def power(theta: float) -> float:
        return theta**degree

    cos_moment, _ = integrate.quad(power, 0.0, 1.0, weight="cos", wvar=frequency, epsabs=1e-14, epsrel=1e-12, limit=200)
    sin_moment, _ = integrate.quad(power, 0.0, 1.0, weight="sin", wvar=frequency, epsabs=1e-14, epsrel=1e-12, limit=200)
    return cos_moment, sin_moment


def limit_cov(
    F: Union[LimitComponent, str],
    a: int,
    G: Union[LimitComponent, str],
    b: int,
    t: float,
    s: float,
) -> float:
    """
    Cov(F^(a)(t), G^(b)(s)) = 1/2 int_0^1 theta^{a+b} cos((t - s) theta + q pi/2) dtheta.

    q is (phase F + a) - (phase G + b) with W at phase 0 and Z at -1, so
    Cov(W(t), W(s)) = sin(t - s) / (2(t - s)) and
    Cov(Z(t), W(s)) = (1 - cos(t - s)) / (2(t - s)).
    Below |t - s| = 1e-4 the integral is replaced by its Taylor series.
    """
    for order in (a, b):
        if not 0 <= order <= MAX_COVARIANCE_ORDER:
            raise ValueError(f"Derivative order must be in [0, {MAX_COVARIANCE_ORDER}], got {order}")
    quarter = (_PHASE[LimitComponent(F)] + a) - (_PHASE[LimitComponent(G)] + b)
    degree = a + b
    u = t - s

    if abs(u) < SERIES_CUTOFF:
        total = 0.0
        term = 1.0
        for m in range(SERIES_TERMS):
            total += term * _QUARTER_COS[(quarter + m) % 4] / (degree + m + 1)
            term *= u / (m + 1)
        return 0.5 * total

    cos_moment, sin_moment = _oscillatory_moments(degree, abs(u))
    sin_moment = np.sign(u) * sin_moment
    return 0.5 * (_QUARTER_COS[quarter % 4] * cos_moment - _QUARTER_SIN[quarter % 4] * sin_moment)


def _limit_rows(zs: Sequence[float], s: int) -> list[Coordinate]:
    return [
        Coordinate(component.value, order, float(z))
        for component in (LimitComponent.W, LimitComponent.Z)
        for z in zs
        for order in range(s + 1)
    ]


def limit_covariance_block(zs: Sequence[float], s: int) -> CovarianceMatrix:
    """Covariance of W^(b)(z_a) then Z^(b)(z_a), (a, b) row-major, b = 0..s."""
    if s < 0:
        raise ValueError(f"Maximum order must be non-negative, got {s}")
    if len(set(zs)) != len(zs):
        raise ValueError("Points must be distinct")
    rows = _limit_rows(zs, s)
    dim = len(rows)
    entries = np.empty((dim, dim))
    for i, (fi, ai, ti) in enumerate(rows):
        for j in range(i, dim):
            fj, aj, tj = rows[j]
            entries[i, j] = entries[j, i] = limit_cov(fi, ai, fj, aj, ti, tj)
    return CovarianceMatrix(entries=entries, labels=tuple(rows))


def _spectral_functions(zs: Sequence[float], s: int, theta: np.ndarray) -> np.ndarray:
    """
    phi_r(theta) for every row, so that v^T Sigma v = 1/2 int |sum v_r phi_r|^2.

    W^(b)(z) contributes (i theta)^b e^{i z theta}, Z^(b)(z) the same times -i.
    """
    theta = np.asarray(theta, dtype=float)
    columns = []
    for factor in (1.0, -1j):
        for z in zs:
            wave = np.exp(1j * z * theta)
            for order in range(s + 1):
                columns.append(factor * (1j * theta) ** order * wave)
    return np.stack(columns, axis=-1)


def quadratic_form_integral(zs: Sequence[float], s: int, v: Sequence[float]) -> tuple[float, float]:
    """
    Both sides of v^T Sigma v = 1/2 int_0^1 |G_v(theta)|^2 dtheta.

    G_v(theta) = sum_{a,b} (x_ab - i y_ab) (i theta)^b e^{i z_a theta}, with
    v = (x_ab then y_ab) in the row order of limit_covariance_block.

    Returns:
        (lhs from the assembled covariance, rhs by adaptive quadrature)
    """
    vector = np.asarray(v, dtype=float)
    expected = 2 * len(zs) * (s + 1)
    if vector.shape != (expected,):
        raise ValueError(f"Coefficient vector must have length {expected}, got {vector.size}")
    if not np.any(vector):
        return 0.0, 0.0

    covariance = np.asarray(limit_covariance_block(zs, s).entries)
    lhs = float(vector @ covariance @ vector)

    def modulus_squared(theta: float) -> float:
        value = _spectral_functions(zs, s, np.array([theta]))[0] @ vector
        return float(abs(value) ** 2)

    span = float(np.ptp(zs)) if len(zs) > 1 else 0.0
    rhs, _ = integrate.quad(modulus_squared, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200 + int(span) * 4)
    return lhs, 0.5 * rhs


def min_eig_limit(zs: Sequence[float], s: int, method: str = "eigh") -> float:
    """
    Smallest eigenvalue of the limit covariance at zs with orders 0..s.

    'eigh' diagonalizes the assembled matrix. 'svd' squares the smallest
    singular value of a Gauss-Legendre factor A with A^T A = Sigma, which
    keeps relative accuracy when the eigenvalue is tiny.
    """
    if method == "eigh":
        return float(np.linalg.eigvalsh(np.asarray(limit_covariance_block(zs, s).entries))[0])
    if method != "svd":
        raise ValueError(f"Unknown eigenvalue method: {method}")

    span = float(np.ptp(zs)) if len(zs) > 1 else 0.0
    nodes, weights = leggauss(64 + int(span) + 4 * s)
    theta = 0.5 * (nodes + 1.0)
    scale = np.sqrt(0.5 * weights / 2.0)[:, None]
    phi = _spectral_functions(zs, s, theta)
    factor = np.vstack([scale * phi.real, scale * phi.imag])
    singular_values = np.linalg.svd(factor, compute_uv=False)
    return float(singular_values[-1] ** 2)


def simulate_limit_process(
    grid: Sequence[float],
    spectral_nodes: int = MIN_SPECTRAL_NODES,
    seed: int = 0,
    realizations: int = 1,
) -> LimitSample:
    """
    Sample (W, Z) on a grid from a Gauss-Legendre spectral sum.

    W(t) = sum w_j [cos(t theta_j) xi_j + sin(t theta_j) xi'_j] / sqrt 2 and
    Z(t) = sum w_j [sin(t theta_j) xi_j - cos(t theta_j) xi'_j] / sqrt 2,
    with theta_j the nodes on [0, 1] and w_j the square roots of the weights.

    Raises:
        ValueError: If spectral_nodes is below 64 or realizations below 1
    """
    if spectral_nodes < MIN_SPECTRAL_NODES:
        raise ValueError(f"Need at least {MIN_SPECTRAL_NODES} spectral nodes, got {spectral_nodes}")
    if realizations < 1:
        raise ValueError(f"Realizations must be at least 1, got {realizations}")

    points = np.asarray(grid, dtype=float)
    nodes, weights = leggauss(spectral_nodes)
    theta = 0.5 * (nodes + 1.0)
    amplitude = np.sqrt(0.5 * weights)

    phase = np.outer(points, theta)
    cos_part = np.cos(phase) * amplitude
    sin_part = np.sin(phase) * amplitude

    rng = np.random.default_rng(seed)
    xi = rng.standard_normal((realizations, spectral_nodes))
    xi_prime = rng.standard_normal((realizations, spectral_nodes))
    w = (xi @ cos_part.T + xi_prime @ sin_part.T) / np.sqrt(2.0)
    z = (xi @ sin_part.T - xi_prime @ cos_part.T) / np.sqrt(2.0)
    return LimitSample(grid=points, w=w, z=z, seed=seed)


def boundary_grid(n: int, dense: int = 24, interior: int = 4, exclusion_multiplier: float = 1.0) -> np.ndarray:
    """
    Angles in the circle window for kernel error scans.

    Dense points spaced 0.37/n start just inside the lower window edge,
    where the x + y part of the finite kernel is largest; a few interior
    points follow.
    """
    delta = exclusion_width(n, exclusion_multiplier)
    near_edge = 1.05 * delta + 0.37 * np.arange(dense) / n
    middle = np.linspace(delta, np.pi - delta, interior + 2)[1:-1]
    return np.unique(np.concatenate([near_edge, middle]))


def kernel_error_table(n: int, grid: Sequence[float], orders: Sequence[int] = (0, 1)) -> float:
    """
    Max |cov_finite / n^{a+b+1} - limit_cov at (nx, ny)| over the grid.

    Covers X and Y against W and Z for every pair of derivative orders.
    """
    points = [float(x) for x in grid]
    worst = 0.0
    for x in points:
        for y in points:
            for F in Component:
                for G in Component:
                    for a in orders:
                        for b in orders:
                            finite = cov_finite(n, F, a, G, b, x, y) / float(n) ** (a + b + 1)
                            limit = limit_cov(_LIMIT_OF[F], a, _LIMIT_OF[G], b, n * x, n * y)
                            worst = max(worst, abs(finite - limit))
    return worst
