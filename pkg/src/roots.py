"""
Root finding for polynomial draws.

Provides Aberth-Ehrlich simultaneous iteration for all complex roots,
annulus extraction at scale n^-2, and bracketed refinement of the zeros
of X and Y on the circle.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial.distance import pdist

from .gpoly import (
    CircleSample,
    CoefficientVector,
    Component,
    eval_complex,
    eval_trig,
    from_coefficients,
    in_circle_window,
)

REAL_AXIS_TOLERANCE = 1e-12
BISECTION_WIDTH = 1e-14

# fractional part of the golden ratio, keeps starting arguments off any symmetry
_START_OFFSET = (np.sqrt(5.0) - 1.0) / 2.0
_REPULSION_CHUNK = 1024


@dataclass(frozen=True, eq=False)
class RootSet:
    """All complex roots of one draw with residual metadata."""

    roots: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class CircleZeroSet:
    """Zeros of X or Y inside the circle window, with derivatives there."""

    zeros: np.ndarray
    derivative_at_zero: np.ndarray
    which: Component
    suspected_double: list = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.zeros.size)


def deflate_origin(f: CoefficientVector) -> tuple[CoefficientVector, int]:
    """
    Strip roots at the origin.

    Returns:
        (deflated polynomial, number of zero roots removed)
    """
    nonzero = np.flatnonzero(f.coeffs)
    if nonzero.size == 0:
        raise ValueError("The zero polynomial has no isolated roots")
    removed = int(nonzero[0])
    return from_coefficients(f.coeffs[removed:], law=f.law, seed=f.seed), removed


def find_all_roots(f: CoefficientVector, tol: float = 1e-10, max_sweeps: int = 500) -> RootSet:
    """
    All n complex roots by Aberth-Ehrlich iteration.

    Starts from n points on the circle of radius (|eps_0|/|eps_n|)^{1/n}
    with equispaced, irrationally offset arguments. Converged roots are
    frozen; the sweep stops once every correction is below tol (relative
    to max(1, |z|)). Each root then gets two Newton polishing steps.

    Args:
        f: Polynomial with eps_n != 0
        tol: Relative correction tolerance
        max_sweeps: Sweep budget; hitting it leaves converged=False

    Raises:
        ValueError: If eps_n == 0, the degree is 0 or tol is not positive
    """
    coeffs = f.coeffs
    n = f.n
    if n < 1:
        raise ValueError("A constant polynomial has no roots")
    if coeffs[-1] == 0:
        raise ValueError("Leading coefficient is zero; trim it before root finding")
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")

    radius = (abs(coeffs[0]) / abs(coeffs[-1])) ** (1.0 / n) if coeffs[0] != 0 else 1.0
    angles = 2.0 * np.pi * (np.arange(n) + _START_OFFSET) / n
    z = radius * np.exp(1j * angles)

    active = np.ones(n, dtype=bool)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        idx = np.flatnonzero(active)
        ratio = _newton_ratio(coeffs, z[idx])
        repulsion = _repulsion(z, idx)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            correction = ratio / (1.0 - ratio * repulsion)
        correction[~np.isfinite(correction)] = 0.0

        z[idx] -= correction
        done = np.abs(correction) <= tol * np.maximum(1.0, np.abs(z[idx]))
        done &= np.isfinite(ratio)
        active[idx[done]] = False
        if not active.any():
            break

    converged = not active.any()
    z = _polish(coeffs, z, tol)

    order = np.lexsort((z.imag, z.real))
    z = z[order]
    return RootSet(
        roots=z,
        residuals=np.abs(eval_complex(f, z)),
        iterations=sweeps,
        converged=converged,
    )


def companion_roots(f: CoefficientVector) -> np.ndarray:
    """Eigenvalues of the companion matrix; a cross-check for small degrees."""
    return npoly.polyroots(f.coeffs)


def _newton_ratio(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z), using the reversed polynomial outside the unit disc."""
    n = coeffs.size - 1
    ratio = np.empty(z.shape, dtype=complex)
    inside = np.abs(z) <= 1.0

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        zi = z[inside]
        ratio[inside] = npoly.polyval(zi, coeffs) / npoly.polyval(zi, npoly.polyder(coeffs))

        # p(z) = z^n r(1/z), so p/p' = z r(w) / (n r(w) - w r'(w)) with w = 1/z
        zo = z[~inside]
        w = 1.0 / zo
        reversed_coeffs = coeffs[::-1]
        r = npoly.polyval(w, reversed_coeffs)
        dr = npoly.polyval(w, npoly.polyder(reversed_coeffs))
        ratio[~inside] = zo * r / (n * r - w * dr)
    return ratio


def _repulsion(z: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """sum_{j != i} 1/(z_i - z_j) for each i in idx, in row chunks."""
    total = np.empty(idx.size, dtype=complex)
    for start in range(0, idx.size, _REPULSION_CHUNK):
        rows = idx[start : start + _REPULSION_CHUNK]
        diff = z[rows, None] - z[None, :]
        diff[np.arange(rows.size), rows] = np.inf
        with np.errstate(divide="ignore"):
            total[start : start + rows.size] = (1.0 / diff).sum(axis=1)
    return total


def _polish(coeffs: np.ndarray, z: np.ndarray, tol: float) -> np.ndarray:
    """Two Newton steps; a step is kept only if it stays local to the root."""
    for _ in range(2):
        step = _newton_ratio(coeffs, z)
        local = np.isfinite(step) & (np.abs(step) <= 100.0 * tol * np.maximum(1.0, np.abs(z)))
        z = z - np.where(local, step, 0.0)
    return z


def annulus_roots(rs: RootSet, n: int, window: tuple[float, float]) -> list[tuple[float, float]]:
    """
    Upper-half roots with scaled distance (|z| - 1) n^2 inside the open window.

    Roots with |Im| <= 1e-12 are real and taken once, with argument 0 or pi.

    Returns:
        List of (scaled_distance, arg) sorted by argument
    """
    lo, hi = window
    points = []
    for zeta in rs.roots:
        if zeta.imag < -REAL_AXIS_TOLERANCE:
            continue
        if abs(zeta.imag) <= REAL_AXIS_TOLERANCE:
            arg = 0.0 if zeta.real > 0 else float(np.pi)
        else:
            arg = float(np.angle(zeta))
        distance = (abs(zeta) - 1.0) * n**2
        if lo < distance < hi:
            points.append((float(distance), arg))
    points.sort(key=lambda point: (point[1], point[0]))
    return points


def min_root_gap(rs: RootSet, n: int, window: tuple[float, float]) -> float:
    """
    Smallest pairwise distance among roots in the annulus window, times n^2.

    Both half-planes count, so a conjugate pair near the circle has gap
    twice its imaginary part. Returns inf with fewer than two roots.
    """
    lo, hi = window
    distance = (np.abs(rs.roots) - 1.0) * n**2
    selected = rs.roots[(distance > lo) & (distance < hi)]
    if selected.size < 2:
        return float("inf")
    points = np.column_stack([selected.real, selected.imag])
    return float(pdist(points).min() * n**2)


def trig_zeros(
    sample: CircleSample,
    which: Union[Component, str],
    n: int,
    exclusion_multiplier: float = 1.0,
) -> CircleZeroSet:
    """
    Zeros of X or Y in the circle window, refined from grid sign changes.

    Each bracket is bisected to width 1e-14 and finished by one Newton
    step. Grid points with a tiny value that are local minima of |F|
    without a sign change are listed as suspected double zeros.

    Raises:
        ValueError: If the grid is coarser than 8(n + 1) or the target is identically zero
    """
    component = Component(which)
    if sample.m < 8 * (n + 1):
        raise ValueError(f"Grid size {sample.m} is too coarse for degree {n}; need at least {8 * (n + 1)}")

    poly = sample.poly
    significant = poly.coeffs if component is Component.X else poly.coeffs[1:]
    if not np.any(significant):
        raise ValueError(f"{component.value} is identically zero; its zeros are not isolated")

    values = sample.x_values if component is Component.X else sample.y_values
    half = int(np.searchsorted(sample.angles, np.pi, side="right"))
    upper = min(half + 1, sample.m)
    angles = np.append(sample.angles[:upper], 2.0 * np.pi) if upper == sample.m else sample.angles[:upper]
    vals = np.append(values[:upper], values[0]) if upper == sample.m else values[:upper]

    exact = np.flatnonzero(vals == 0.0)
    brackets = np.flatnonzero(vals[:-1] * vals[1:] < 0.0)
    refined = _bisect(poly, component, angles[brackets], angles[brackets + 1], vals[brackets])
    candidates = np.concatenate([angles[exact], refined])
    candidates = np.unique(candidates[(candidates >= 0.0) & (candidates <= np.pi)])
    if candidates.size > 1:
        keep = np.concatenate([[True], np.diff(candidates) > 1e-13])
        candidates = candidates[keep]

    zeros = candidates[in_circle_window(candidates, n, exclusion_multiplier)]
    derivative = _component(eval_trig(poly, zeros, 1), component) if zeros.size else np.empty(0)

    return CircleZeroSet(
        zeros=zeros,
        derivative_at_zero=derivative,
        which=component,
        suspected_double=_suspected_double_zeros(angles, vals, n),
    )


def _component(pair: tuple[np.ndarray, np.ndarray], component: Component) -> np.ndarray:
    return pair[0] if component is Component.X else pair[1]


def _bisect(poly: CoefficientVector, component: Component, lo, hi, f_lo) -> np.ndarray:
    """Vectorized bisection over all brackets, then one Newton step each."""
    if lo.size == 0:
        return np.empty(0)
    lo = lo.copy()
    hi = hi.copy()
    sign_lo = np.sign(f_lo)

    for _ in range(200):
        if np.max(hi - lo) <= BISECTION_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        f_mid = _component(eval_trig(poly, mid, 0), component)
        same = np.sign(f_mid) == sign_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)

    x = 0.5 * (lo + hi)
    value = _component(eval_trig(poly, x, 0), component)
    slope = _component(eval_trig(poly, x, 1), component)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = value / slope
    step = np.where(np.isfinite(step) & (np.abs(step) <= 1e-10), step, 0.0)
    return x - step


def _suspected_double_zeros(angles: np.ndarray, vals: np.ndarray, n: int) -> list[float]:
    """Grid points where |F| dips below 1e-9 n^{1/2} between same-sign neighbours."""
    floor = 1e-9 * np.sqrt(n)
    inner = np.arange(1, vals.size - 1)
    if inner.size == 0:
        return []
    centre = vals[inner]
    left = vals[inner - 1]
    right = vals[inner + 1]
    mask = (
        (np.abs(centre) < floor)
        & (centre != 0.0)
        & (left * centre > 0)
        & (right * centre > 0)
        & (np.abs(centre) <= np.abs(left))
        & (np.abs(centre) <= np.abs(right))
    )
    return [float(a) for a in angles[inner[mask]]]


def interlace_histogram(zx: CircleZeroSet, zy: CircleZeroSet) -> dict[int, int]:
    """How many zeros of Y fall strictly between consecutive zeros of X."""
    if len(zx) < 2:
        return {}
    left = np.searchsorted(zy.zeros, zx.zeros[:-1], side="right")
    right = np.searchsorted(zy.zeros, zx.zeros[1:], side="left")
    return dict(sorted(Counter((right - left).tolist()).items()))
