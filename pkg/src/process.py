"""
The annulus and circle-pair point processes.

Provides nu (complex roots mapped to scaled distances) and mu (nearby
zeros of X and Y paired through the collision statistic gamma), their
agreement check, and the linearized predictors between roots and pairs.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .roots import CircleZeroSet, RootSet, annulus_roots

_EVERYWHERE = (-np.inf, np.inf)


@dataclass(frozen=True)
class NuMeasure:
    """Upper-half roots as (scaled_distance, arg) points."""

    points: tuple
    n: int

    def count(self, window: tuple[float, float]) -> int:
        """Number of points with scaled distance in the open window."""
        lo, hi = window
        return sum(1 for distance, _ in self.points if lo < distance < hi)


@dataclass(frozen=True)
class CirclePair:
    """A zero x of X and a zero y of Y closer than the proximity cutoff."""

    x: float
    y: float
    gamma: float
    x_derivative: float
    y_derivative: float
    regular: bool


@dataclass(frozen=True)
class MuMeasure:
    """All close (x, y) pairs of one draw."""

    pairs: tuple
    n: int
    window_exponent: float

    def count(self, window: tuple[float, float], regular_only: bool = False) -> int:
        """Number of pairs with gamma in the open window."""
        lo, hi = window
        return sum(1 for pair in self.pairs if lo < pair.gamma < hi and (pair.regular or not regular_only))


@dataclass
class PairingReport:
    """Comparison of nu(I) and mu(I) for one draw."""

    interval: tuple
    nu_count: int
    mu_count: int
    agreed: bool
    unmatched_roots: list = field(default_factory=list)
    unmatched_pairs: list = field(default_factory=list)


def proximity_cutoff(n: int, multiplier: float = 1.0) -> float:
    """multiplier * n^-2 (log n)^4, the largest |x - y| a pair may have."""
    return multiplier * np.log(n) ** 4 / n**2


def derivative_floor(n: int) -> float:
    """n^{3/2} / log n, below which a derivative makes a pair irregular."""
    return n**1.5 / np.log(n)


def pair_gamma(x: float, y: float, x_derivative: float, y_derivative: float, n: int) -> float:
    """Collision statistic (x - y) X'(x) Y'(y) n^2 / (X'(x)^2 + Y'(y)^2)."""
    denominator = x_derivative**2 + y_derivative**2
    if denominator == 0:
        return 0.0
    return (x - y) * x_derivative * y_derivative * n**2 / denominator


def nu_measure(rs: RootSet, n: int) -> NuMeasure:
    """All upper-half roots, no window truncation."""
    return NuMeasure(points=tuple(annulus_roots(rs, n, _EVERYWHERE)), n=n)


def mu_measure(zx: CircleZeroSet, zy: CircleZeroSet, n: int, cutoff_multiplier: float = 1.0) -> MuMeasure:
    """
    Enumerate every (x, y) with |x - y| within the proximity cutoff.

    Both zero lists are sorted, so each x scans a contiguous block of y
    found by binary search. Duplicate partners are kept.
    """
    cutoff = proximity_cutoff(n, cutoff_multiplier)
    floor = derivative_floor(n) if n > 1 else np.inf
    lower = np.searchsorted(zy.zeros, zx.zeros - cutoff, side="left")
    upper = np.searchsorted(zy.zeros, zx.zeros + cutoff, side="right")

    pairs = []
    for i, x in enumerate(zx.zeros):
        dx = float(zx.derivative_at_zero[i])
        for j in range(lower[i], upper[i]):
            y = float(zy.zeros[j])
            if abs(x - y) > cutoff:
                continue
            dy = float(zy.derivative_at_zero[j])
            pairs.append(
                CirclePair(
                    x=float(x),
                    y=y,
                    gamma=pair_gamma(float(x), y, dx, dy, n),
                    x_derivative=dx,
                    y_derivative=dy,
                    regular=abs(dx) > floor and abs(dy) > floor,
                )
            )
    return MuMeasure(pairs=tuple(pairs), n=n, window_exponent=cutoff)


def pairing_check(nu: NuMeasure, mu: MuMeasure, interval: tuple[float, float]) -> PairingReport:
    """
    Compare nu(I) with mu(I); on disagreement, match roots to pairs by angle.

    The matching minimizes total circular distance between arg(zeta) and
    x. Whatever stays unmatched is reported with the distance to its
    nearest counterpart.
    """
    lo, hi = interval
    roots = [(distance, arg) for distance, arg in nu.points if lo < distance < hi]
    pairs = [pair for pair in mu.pairs if lo < pair.gamma < hi]
    report = PairingReport(
        interval=tuple(interval),
        nu_count=len(roots),
        mu_count=len(pairs),
        agreed=len(roots) == len(pairs),
    )
    if report.agreed:
        return report

    root_args = np.array([arg for _, arg in roots])
    pair_args = np.array([pair.x for pair in pairs])
    if root_args.size and pair_args.size:
        delta = np.abs(root_args[:, None] - pair_args[None, :]) % (2.0 * np.pi)
        cost = np.minimum(delta, 2.0 * np.pi - delta)
        matched_rows, matched_cols = linear_sum_assignment(cost)
    else:
        cost = np.zeros((root_args.size, pair_args.size))
        matched_rows = matched_cols = np.array([], dtype=int)

    for i in sorted(set(range(root_args.size)) - set(matched_rows.tolist())):
        nearest = float(cost[i].min()) if pair_args.size else float("inf")
        report.unmatched_roots.append((roots[i][0], roots[i][1], nearest))
    for j in sorted(set(range(pair_args.size)) - set(matched_cols.tolist())):
        nearest = float(cost[:, j].min()) if root_args.size else float("inf")
        report.unmatched_pairs.append((pairs[j].x, pairs[j].gamma, nearest))
    return report


def predict_root_from_pair(x: float, y: float, x_derivative: float, y_derivative: float, n: int) -> complex:
    """
    Root location implied by a regular pair.

    Uses the derivative-weighted mean angle
    theta = (X'^2 x + Y'^2 y) / (X'^2 + Y'^2) and radius 1 + gamma / n^2.

    Raises:
        ValueError: If either derivative is at or below n^{3/2} / log n
    """
    _check_floor(x_derivative, y_derivative, n)
    wx = x_derivative**2
    wy = y_derivative**2
    theta = (wx * x + wy * y) / (wx + wy)
    gamma = pair_gamma(x, y, x_derivative, y_derivative, n)
    return complex((1.0 + gamma / n**2) * np.exp(1j * theta))


def predict_pair_from_root(zeta: complex, x_derivative: float, y_derivative: float, n: int) -> tuple[float, float]:
    """
    Zeros of X and Y on the circle implied by a root near it.

    With theta = arg zeta and gamma = (|zeta| - 1) n^2:
    x = theta + (gamma / n^2) Y'/X' and y = theta - (gamma / n^2) X'/Y',
    derivatives taken at theta.

    Raises:
        ValueError: If either derivative is at or below n^{3/2} / log n
    """
    _check_floor(x_derivative, y_derivative, n)
    theta = float(np.angle(zeta))
    rho = abs(zeta) - 1.0
    return (
        theta + rho * y_derivative / x_derivative,
        theta - rho * x_derivative / y_derivative,
    )


def min_scaled_distance(nu: NuMeasure) -> float:
    """Smallest |scaled distance|, inf when there are no points."""
    if not nu.points:
        return float("inf")
    return float(min(abs(distance) for distance, _ in nu.points))


def near_axis_scan(rs: RootSet, n: int, M: float, eps: float) -> int:
    """Annulus roots in (-M, M) whose argument is within n^-eps of 0 or pi."""
    if M <= 0:
        raise ValueError(f"M must be positive, got {M}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    reach = n ** (-eps)
    return sum(1 for _, arg in annulus_roots(rs, n, (-M, M)) if arg <= reach or arg >= np.pi - reach)


def root_gap_fraction(gaps, threshold: float) -> float:
    """Share of trials whose scaled minimum root gap is at most threshold."""
    values = np.asarray(list(gaps), dtype=float)
    if values.size == 0:
        return 0.0
    return float(np.mean(values <= threshold))


def _check_floor(x_derivative: float, y_derivative: float, n: int) -> None:
    floor = derivative_floor(n)
    if abs(x_derivative) <= floor or abs(y_derivative) <= floor:
        raise ValueError(
            f"Derivatives ({x_derivative:.4g}, {y_derivative:.4g}) do not clear the floor {floor:.4g}"
        )
