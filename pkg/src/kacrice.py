"""
Finite-n covariance kernels and Kac-Rice densities.

Provides exact covariances of X, Y and their derivatives, Gaussian
conditioning on pinned zeros, the pair densities p1 and p_k, their
integrals (expected pair counts and expected zero counts) and the
empirical bound monitors for determinants, numerators and densities.
"""

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy import integrate, linalg

from .gpoly import Component, exclusion_width, in_circle_window
from .process import proximity_cutoff
from .stats import RunningMoments

MAX_DIRICHLET_ORDER = 12
MAX_COVARIANCE_ORDER = 6
SYMMETRY_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-9
PIVOT_TOLERANCE = 1e-12
IDEALIZED_CONDITIONAL_VARIANCE = 1.0 / 24.0

# X^(a) = sum eps_k k^a cos(kx + (a + phase) pi/2)
_PHASE = {Component.X: 0, Component.Y: -1}
_ARC_NODES, _ARC_WEIGHTS = leggauss(24)
_MC_CHUNK = 10_000

Intervals = Optional[Sequence[tuple[float, float]]]


class DensityMethod(str, Enum):
    """How the conditional expectation in a density was evaluated."""

    CLOSED_FORM = "closed_form_expectation"
    GAUSS_HERMITE = "gauss_hermite"
    MONTE_CARLO = "monte_carlo"


class Coordinate(NamedTuple):
    """One row of a covariance matrix: a derivative of X, Y, W or Z at a point."""

    component: str
    order: int
    location: float

    @property
    def label(self) -> str:
        return f"{self.component}^({self.order})({self.location:.6g})"


class SingularConditioningError(ValueError):
    """The block being conditioned on is numerically singular."""


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Dense symmetric PSD covariance with a label per row."""

    entries: np.ndarray
    labels: tuple

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"Covariance must be square, got shape {entries.shape}")
        if entries.shape[0] != len(self.labels):
            raise ValueError(f"{len(self.labels)} labels for a {entries.shape[0]}-dimensional covariance")
        if entries.size:
            scale = max(np.max(np.abs(entries)), np.finfo(float).tiny)
            if np.max(np.abs(entries - entries.T)) > SYMMETRY_TOLERANCE * scale:
                raise ValueError("Covariance is not symmetric")
            floor = -PSD_TOLERANCE * max(np.max(np.diag(entries)), 0.0)
            if np.linalg.eigvalsh(entries)[0] < floor:
                raise ValueError("Covariance is not positive semidefinite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class ConditionedGaussian:
    """A covariance with some coordinates pinned to zero, and the Schur complement left over."""

    base: CovarianceMatrix
    conditioned_indices: tuple
    reduced: CovarianceMatrix
    log_det_pinned: float


@dataclass(frozen=True)
class DensityEval:
    """A Kac-Rice density value with the parts it was built from."""

    value: float
    numerator: float
    det_sigma: float
    method: DensityMethod
    rel_error_estimate: float
    k: int = 1
    degenerate: bool = False

    @classmethod
    def build(
        cls,
        numerator: float,
        det_sigma: float,
        method: DensityMethod,
        rel_error_estimate: float,
        k: int = 1,
    ) -> "DensityEval":
        """Compute value = numerator / ((2 pi)^k sqrt(det_sigma))."""
        value = numerator / ((2.0 * np.pi) ** k * np.sqrt(det_sigma))
        return cls(value, numerator, det_sigma, method, rel_error_estimate, k)

    @classmethod
    def degenerate_point(cls, method: DensityMethod, k: int) -> "DensityEval":
        """Coincident points carry density zero."""
        return cls(0.0, 0.0, 0.0, method, 0.0, k, degenerate=True)


@dataclass(frozen=True)
class IntegralEstimate:
    """A quadrature result with its error estimate."""

    value: float
    abs_error: float
    converged: bool


# --- kernels ---------------------------------------------------------------


def dirichlet_sum(n: int, d: int, x):
    """
    D_{n,d}(x) = sum k^d cos(kx) and S_{n,d}(x) = sum k^d sin(kx), k = 0..n.

    Accepts a scalar or an array of angles. S is evaluated at |x| and
    its sign restored, so both sums are exactly even and odd in x.
    """
    if not 0 <= d <= MAX_DIRICHLET_ORDER:
        raise ValueError(f"Order must be in [0, {MAX_DIRICHLET_ORDER}], got {d}")
    angles = np.asarray(x, dtype=float)
    k = np.arange(n + 1, dtype=float)
    weights = k**d
    phase = np.multiply.outer(np.abs(angles), k)
    cos_sum = np.cos(phase) @ weights
    sin_sum = np.sign(angles) * (np.sin(phase) @ weights)
    if angles.ndim == 0:
        return float(cos_sum), float(sin_sum)
    return cos_sum, sin_sum


def _quarter_turn(cos_sum, sin_sum, quarter: int):
    """sum k^d cos(ku + q pi/2) from the two Dirichlet sums at u."""
    return (cos_sum, -sin_sum, -cos_sum, sin_sum)[quarter % 4]


def cov_finite(
    n: int,
    F: Union[Component, str],
    a: int,
    G: Union[Component, str],
    b: int,
    x: float,
    y: float,
) -> float:
    """
    Cov(F^(a)(x), G^(b)(y)) for F, G in {X, Y}, exact at degree n.

    Product-to-sum gives
    1/2 [sum k^d cos(k(x-y) + (alpha-beta) pi/2) + sum k^d cos(k(x+y) + (alpha+beta) pi/2)]
    with d = a + b and alpha, beta the quarter-turn phases of the two rows.
    """
    for order in (a, b):
        if not 0 <= order <= MAX_COVARIANCE_ORDER:
            raise ValueError(f"Derivative order must be in [0, {MAX_COVARIANCE_ORDER}], got {order}")
    alpha = _PHASE[Component(F)] + a
    beta = _PHASE[Component(G)] + b
    d = a + b
    diff_cos, diff_sin = dirichlet_sum(n, d, x - y)
    sum_cos, sum_sin = dirichlet_sum(n, d, x + y)
    return 0.5 * (_quarter_turn(diff_cos, diff_sin, alpha - beta) + _quarter_turn(sum_cos, sum_sin, alpha + beta))


def covariance_block(n: int, rows: Sequence, normalize: bool = False) -> CovarianceMatrix:
    """
    Covariance of the listed (component, order, location) rows.

    Args:
        n: Degree
        rows: Sequence of (component, order, location) triples over X and Y
        normalize: Divide each row by n^{order + 1/2}

    Raises:
        ValueError: If a row is repeated
    """
    coords = [Coordinate(Component(c).value, int(o), float(loc)) for c, o, loc in rows]
    if len(set(coords)) != len(coords):
        raise ValueError("Duplicate covariance rows make the matrix singular")

    dim = len(coords)
    entries = np.empty((dim, dim))
    for i, (fi, ai, xi) in enumerate(coords):
        for j in range(i, dim):
            fj, aj, xj = coords[j]
            entries[i, j] = entries[j, i] = cov_finite(n, fi, ai, fj, aj, xi, xj)

    if normalize:
        scale = np.array([float(n) ** (c.order + 0.5) for c in coords])
        entries = entries / np.outer(scale, scale)
    return CovarianceMatrix(entries=entries, labels=tuple(coords))


def condition_on_zeros(block: CovarianceMatrix, pinned: Sequence[int]) -> ConditionedGaussian:
    """
    Condition on the pinned coordinates being zero (Schur complement A - B C^-1 B^T).

    Raises:
        SingularConditioningError: If the pinned block is numerically singular
    """
    pinned = [int(i) for i in pinned]
    keep = [i for i in range(block.dim) if i not in set(pinned)]
    entries = block.entries

    pinned_block = entries[np.ix_(pinned, pinned)]
    if pinned:
        diagonal = np.max(np.diag(pinned_block))
        if np.linalg.eigvalsh(pinned_block)[0] <= PIVOT_TOLERANCE * diagonal:
            labels = ", ".join(block.labels[i].label for i in pinned)
            raise SingularConditioningError(f"Pinned rows are nearly dependent: {labels}")
        factor = linalg.cho_factor(pinned_block, lower=True)
        log_det = float(2.0 * np.sum(np.log(np.diag(factor[0]))))
    else:
        log_det = 0.0

    free_block = entries[np.ix_(keep, keep)]
    if pinned and keep:
        cross = entries[np.ix_(keep, pinned)]
        free_block = free_block - cross @ linalg.cho_solve(factor, cross.T)
        free_block = 0.5 * (free_block + free_block.T)

    reduced = CovarianceMatrix(entries=free_block, labels=tuple(block.labels[i] for i in keep))
    return ConditionedGaussian(
        base=block,
        conditioned_indices=tuple(pinned),
        reduced=reduced,
        log_det_pinned=log_det,
    )


def early_approx_block(n: int, x: float, y: float) -> CovarianceMatrix:
    """Normalized covariance of (X'(x), Y(y), Y'(y), X(x))."""
    rows = [(Component.X, 1, x), (Component.Y, 0, y), (Component.Y, 1, y), (Component.X, 0, x)]
    return covariance_block(n, rows, normalize=True)


def conditional_derivative_variance(n: int, x: float, y: float) -> float:
    """Var(X'(x) / n^{3/2} | X(x) = Y(y) = 0)."""
    rows = [(Component.X, 0, x), (Component.Y, 0, y), (Component.X, 1, x)]
    conditioned = condition_on_zeros(covariance_block(n, rows, normalize=True), [0, 1])
    return float(conditioned.reduced.entries[0, 0])


# --- densities -------------------------------------------------------------


def p1_density(
    n: int,
    x: float,
    y: float,
    U: Intervals = None,
    method: Union[DensityMethod, str] = DensityMethod.GAUSS_HERMITE,
    nodes: int = 64,
    idealized: bool = False,
    cutoff_multiplier: float = 1.0,
) -> DensityEval:
    """
    Pair density p1(x, y, U) for a zero x of X and a zero y of Y.

    The numerator is n^3 E[|W1 W2| 1(n^2 (x - y) W1 W2 / (W1^2 + W2^2) in U)]
    with (W1, W2) the normalized (X'(x), Y'(y)) conditioned on X(x) = Y(y) = 0.
    'gauss_hermite' uses a tensor rule with nodes^2 and (2 nodes)^2 points,
    the difference giving the error estimate. 'closed_form_expectation'
    reduces the expectation to an exact one-dimensional angular integral.

    Args:
        n: Degree
        x, y: Angles in the circle window
        U: Union of open intervals for gamma, None for the whole line, empty for no gamma at all
        method: Evaluation method for the conditional expectation
        nodes: Gauss-Hermite nodes per axis for the coarse rule
        idealized: Replace the conditioned covariance by I/24
        cutoff_multiplier: Scales the n^-2 (log n)^4 support of the pair density
    """
    method = DensityMethod(method)
    if method is DensityMethod.MONTE_CARLO:
        raise ValueError("p1_density evaluates by quadrature; use pk_density for Monte Carlo")
    intervals = _as_intervals(U)

    rows = [(Component.X, 0, x), (Component.Y, 0, y), (Component.X, 1, x), (Component.Y, 1, y)]
    try:
        conditioned = condition_on_zeros(covariance_block(n, rows, normalize=True), [0, 1])
    except SingularConditioningError:
        return DensityEval.degenerate_point(method, 1)
    det_sigma = float(np.exp(conditioned.log_det_pinned) * n**2)

    if intervals == () or abs(x - y) > proximity_cutoff(n, cutoff_multiplier):
        return DensityEval.build(0.0, det_sigma, method, 0.0)

    covariance = (
        IDEALIZED_CONDITIONAL_VARIANCE * np.eye(2) if idealized else np.asarray(conditioned.reduced.entries)
    )
    scale = n**2 * (x - y)
    if method is DensityMethod.CLOSED_FORM:
        expectation, error = _angular_expectation(covariance, scale, intervals), 0.0
    else:
        expectation, error = _gauss_hermite_expectation(covariance, scale, intervals, nodes)
    return DensityEval.build(n**3 * expectation, det_sigma, method, error)


def pk_density(
    n: int,
    xs: Sequence[float],
    ys: Sequence[float],
    samples: int = 100_000,
    seed: int = 0,
    exclusion_multiplier: float = 1.0,
) -> DensityEval:
    """
    k-point density p_k(xs, ys) with a Monte Carlo numerator.

    The numerator E[prod |X'(x_j)| |Y'(y_j)| | all X(x_i) = Y(y_i) = 0] is
    averaged over samples draws from the conditioned 2k-dimensional
    Gaussian; the determinant is exact. Coincident points give zero with
    the degenerate flag set.

    Raises:
        ValueError: If k is not 1..3, the lists differ in length or a point leaves the circle window
    """
    k = _check_configuration(n, xs, ys, max_k=3, exclusion_multiplier=exclusion_multiplier)
    if len(set(xs)) < k or len(set(ys)) < k:
        return DensityEval.degenerate_point(DensityMethod.MONTE_CARLO, k)
    try:
        mean, standard_error, log_det = _conditioned_derivative_moment(n, xs, ys, samples, seed)
    except SingularConditioningError:
        return DensityEval.degenerate_point(DensityMethod.MONTE_CARLO, k)

    det_sigma = float(np.exp(log_det + 2 * k * np.log(n)))
    rel_error = standard_error / mean if mean > 0 else 0.0
    return DensityEval.build(mean * float(n) ** (3 * k), det_sigma, DensityMethod.MONTE_CARLO, rel_error, k)


def _conditioned_derivative_moment(n: int, xs, ys, samples: int, seed: int) -> tuple[float, float, float]:
    """
    Monte Carlo mean of prod |normalized derivatives| given the zeros.

    Returns:
        (mean, standard error, log det of the normalized pinned block)
    """
    k = len(xs)
    rows = (
        [(Component.X, 0, x) for x in xs]
        + [(Component.Y, 0, y) for y in ys]
        + [(Component.X, 1, x) for x in xs]
        + [(Component.Y, 1, y) for y in ys]
    )
    conditioned = condition_on_zeros(covariance_block(n, rows, normalize=True), range(2 * k))
    factor = _psd_factor(np.asarray(conditioned.reduced.entries))

    rng = np.random.default_rng(seed)
    moments = RunningMoments()
    remaining = samples
    while remaining > 0:
        size = min(_MC_CHUNK, remaining)
        draws = rng.standard_normal((size, 2 * k)) @ factor.T
        moments.push(np.prod(np.abs(draws), axis=1))
        remaining -= size
    return moments.mean, moments.standard_error, conditioned.log_det_pinned


def _as_intervals(U) -> Optional[tuple]:
    if U is None:
        return None
    items = list(U)
    if len(items) == 2 and all(np.isscalar(v) for v in items):
        items = [tuple(items)]
    return tuple((float(lo), float(hi)) for lo, hi in items)


def _in_union(values: np.ndarray, intervals) -> np.ndarray:
    if intervals is None:
        return np.ones(np.shape(values), dtype=bool)
    inside = np.zeros(np.shape(values), dtype=bool)
    for lo, hi in intervals:
        inside |= (values > lo) & (values < hi)
    return inside


def _psd_factor(covariance: np.ndarray) -> np.ndarray:
    """A with covariance = A A^T, tolerant of rank deficiency."""
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def _quadratic_form_zeros(form: np.ndarray) -> list[float]:
    """Angles phi in [0, pi) where (cos phi, sin phi) form (cos phi, sin phi)^T = 0."""
    m11, m12, m22 = form[0, 0], form[0, 1], form[1, 1]
    scale = max(abs(m11), abs(m12), abs(m22))
    if scale == 0:
        return []
    angles = []
    if abs(m22) <= 1e-15 * scale:
        angles.append(np.pi / 2)
    for root in np.roots([m22, 2.0 * m12, m11]):
        if abs(root.imag) <= 1e-12 * (1.0 + abs(root.real)):
            angles.append(float(np.arctan(root.real) % np.pi))
    return angles


def _angular_expectation(covariance: np.ndarray, scale: float, intervals) -> float:
    """
    E[|W1 W2| 1(scale W1 W2 / (W1^2 + W2^2) in U)] for W ~ N(0, covariance).

    Writing W = A (r cos phi, r sin phi) the ratio depends on phi only and
    E r^2 = 2, so the expectation is (2/pi) times an integral over
    phi in [0, pi). The integrand is smooth between the zeros of W1 W2 and
    the angles where the ratio crosses an endpoint of U.
    """
    factor = _psd_factor(covariance)
    first, second = factor[0], factor[1]
    product_form = 0.5 * (np.outer(first, second) + np.outer(second, first))
    norm_form = np.outer(first, first) + np.outer(second, second)

    breaks = [0.0, np.pi] + _quadratic_form_zeros(product_form)
    if intervals is not None and scale != 0:
        for lo, hi in intervals:
            for endpoint in (lo, hi):
                if np.isfinite(endpoint):
                    breaks += _quadratic_form_zeros(scale * product_form - endpoint * norm_form)
    breaks = np.unique(np.clip(breaks, 0.0, np.pi))

    total = 0.0
    for start, stop in zip(breaks[:-1], breaks[1:]):
        if stop - start < 1e-15:
            continue
        mid = 0.5 * (start + stop)
        direction = np.array([np.cos(mid), np.sin(mid)])
        norm = direction @ norm_form @ direction
        if norm <= 0:
            continue
        ratio = scale * (direction @ product_form @ direction) / norm
        if not _in_union(np.array(ratio), intervals):
            continue
        phi = start + 0.5 * (stop - start) * (_ARC_NODES + 1.0)
        c, s = np.cos(phi), np.sin(phi)
        values = np.abs(product_form[0, 0] * c * c + 2.0 * product_form[0, 1] * c * s + product_form[1, 1] * s * s)
        total += 0.5 * (stop - start) * float(_ARC_WEIGHTS @ values)
    return 2.0 / np.pi * total


def _gauss_hermite_expectation(covariance: np.ndarray, scale: float, intervals, nodes: int) -> tuple[float, float]:
    """Tensor Gauss-Hermite estimate with nodes and 2*nodes; returns (fine value, relative change)."""
    factor = _psd_factor(covariance)

    def estimate(count: int) -> float:
        points, weights = hermgauss(count)
        z = np.sqrt(2.0) * points
        z1, z2 = np.meshgrid(z, z, indexing="ij")
        w1 = factor[0, 0] * z1 + factor[0, 1] * z2
        w2 = factor[1, 0] * z1 + factor[1, 1] * z2
        product = w1 * w2
        norm = w1 * w1 + w2 * w2
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(norm > 0, scale * product / norm, 0.0)
        integrand = np.abs(product) * _in_union(ratio, intervals)
        return float(np.outer(weights, weights).ravel() @ integrand.ravel() / np.pi)

    coarse = estimate(nodes)
    fine = estimate(2 * nodes)
    error = abs(fine - coarse) / abs(fine) if fine != 0 else abs(coarse)
    return fine, error


# --- integrals -------------------------------------------------------------


def mean_mu_integral(
    n: int,
    U: Intervals,
    x_panels: int = 32,
    cutoff_multiplier: float = 1.0,
    exclusion_multiplier: float = 1.0,
    method: Union[DensityMethod, str] = DensityMethod.CLOSED_FORM,
) -> IntegralEstimate:
    """
    Expected number of circle pairs with gamma in U.

    Integrates p1 over x in the circle window (midpoint panels) and
    r = x - y in (-eta, eta), eta = n^-2 (log n)^4 (adaptive quadrature,
    split at r = 0 where the indicator jumps).

    Raises:
        ValueError: If U is unbounded
    """
    intervals = _as_intervals(U)
    if intervals is None or any(not (np.isfinite(lo) and np.isfinite(hi)) for lo, hi in intervals):
        raise ValueError("U must be a bounded union of intervals")
    if not intervals:
        return IntegralEstimate(0.0, 0.0, True)

    delta = exclusion_width(n, exclusion_multiplier)
    edges = np.linspace(delta, np.pi - delta, x_panels + 1)
    width = edges[1] - edges[0]
    eta = proximity_cutoff(n, cutoff_multiplier)

    total = 0.0
    error = 0.0
    converged = True
    for x in 0.5 * (edges[:-1] + edges[1:]):

        def integrand(r: float, x: float = x) -> float:
            return p1_density(n, x, x - r, intervals, method=method, cutoff_multiplier=cutoff_multiplier).value

        result = integrate.quad(integrand, -eta, eta, points=[0.0], limit=200, epsrel=1e-6, full_output=1)
        total += width * result[0]
        error += width * result[1]
        converged = converged and len(result) == 3
    return IntegralEstimate(float(total), float(error), converged)


def _check_window_interval(n: int, interval: tuple[float, float], exclusion_multiplier: float) -> None:
    delta = exclusion_width(n, exclusion_multiplier)
    lo, hi = interval
    if lo < delta * (1.0 - 1e-12) or hi > (np.pi - delta) * (1.0 + 1e-12):
        raise ValueError(
            f"Interval ({lo:.6g}, {hi:.6g}) is not inside the circle window ({delta:.6g}, {np.pi - delta:.6g})"
        )


def zero_intensity(n: int, which: Union[Component, str], x: float) -> float:
    """One-dimensional Kac-Rice intensity sqrt(Var F Var F' - Cov(F, F')^2) / (pi Var F)."""
    component = Component(which)
    var0 = cov_finite(n, component, 0, component, 0, x, x)
    var1 = cov_finite(n, component, 1, component, 1, x, x)
    cross = cov_finite(n, component, 0, component, 1, x, x)
    return float(np.sqrt(max(var0 * var1 - cross * cross, 0.0)) / (np.pi * var0))


def kacrice_zero_count(
    n: int,
    which: Union[Component, str],
    interval: tuple[float, float],
    exclusion_multiplier: float = 1.0,
) -> float:
    """
    Expected number of zeros of X or Y in an interval inside the circle window.

    Raises:
        ValueError: If the interval leaves the circle window
    """
    lo, hi = interval
    if hi <= lo:
        return 0.0
    _check_window_interval(n, interval, exclusion_multiplier)
    value, _ = integrate.quad(lambda x: zero_intensity(n, which, x), lo, hi, limit=200, epsrel=1e-8)
    return float(value)


def kacrice_zero_count_full(n: int, which: Union[Component, str], exclusion_multiplier: float = 1.0) -> float:
    """Expected zeros on [0, pi], extrapolated from the circle window by length."""
    delta = exclusion_width(n, exclusion_multiplier)
    inner = kacrice_zero_count(n, which, (delta, np.pi - delta), exclusion_multiplier)
    return inner * np.pi / (np.pi - 2.0 * delta)


def _annulus_density(n: int, radius: float, theta: float) -> float:
    """
    Complex Kac-Rice density of roots at radius e^{i theta}, per unit area, times n^-2.

    E[|f'|^2 | f = 0] is the trace of the Schur complement of
    (Re f', Im f') given (Re f, Im f).
    """
    k = np.arange(n + 1, dtype=float)
    powers = radius**k
    derivative_powers = k * radius ** np.maximum(k - 1.0, 0.0)
    rows = np.vstack(
        [
            powers * np.cos(k * theta) / np.sqrt(n),
            powers * np.sin(k * theta) / np.sqrt(n),
            derivative_powers * np.cos((k - 1.0) * theta) / n**1.5,
            derivative_powers * np.sin((k - 1.0) * theta) / n**1.5,
        ]
    )
    covariance = rows @ rows.T
    value_block = covariance[:2, :2]
    cross = covariance[2:, :2]
    derivative_block = covariance[2:, 2:] - cross @ np.linalg.solve(value_block, cross.T)
    return float(np.trace(derivative_block) / (2.0 * np.pi * np.sqrt(np.linalg.det(value_block))))


def kacrice_annulus_count(
    n: int,
    window: tuple[float, float],
    arc: Optional[tuple[float, float]] = None,
    exclusion_multiplier: float = 1.0,
) -> float:
    """
    Expected number of roots with (|z| - 1) n^2 in window and argument in arc.

    Defaults the arc to the circle window. In scaled coordinates
    z = (1 + s/n^2) e^{i theta} the area element is (1 + s/n^2) ds dtheta / n^2.
    """
    if arc is None:
        delta = exclusion_width(n, exclusion_multiplier)
        arc = (delta, np.pi - delta)
    lo, hi = window
    if hi <= lo or arc[1] <= arc[0]:
        return 0.0

    def integrand(s: float, theta: float) -> float:
        radius = 1.0 + s / n**2
        return _annulus_density(n, radius, theta) * radius

    value, _ = integrate.dblquad(integrand, arc[0], arc[1], lo, hi, epsrel=1e-6)
    return float(value)


# --- bound monitors --------------------------------------------------------


def _check_configuration(n: int, xs, ys, max_k: int, exclusion_multiplier: float = 1.0) -> int:
    k = len(xs)
    if len(ys) != k:
        raise ValueError(f"xs and ys must have the same length, got {len(xs)} and {len(ys)}")
    if not 1 <= k <= max_k:
        raise ValueError(f"Configuration size must be in [1, {max_k}], got {k}")
    points = np.concatenate([np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)])
    if not np.all(in_circle_window(points, n, exclusion_multiplier)):
        raise ValueError("All points must lie in the circle window")
    return k


def _log_gap_product(points, n: int) -> float:
    """sum over pairs of 2 log min(|p_i - p_j|, 1/n)."""
    values = np.asarray(points, dtype=float)
    total = 0.0
    for i in range(values.size):
        for j in range(i + 1, values.size):
            total += 2.0 * np.log(min(abs(values[i] - values[j]), 1.0 / n))
    return total


def det_lower_bound_monitor(n: int, xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """
    det Sigma_k and its ratio to n^{2k^2} prod min(|x_j - x_i|, 1/n)^2 min(|y_j - y_i|, 1/n)^2.

    Everything is carried in log space.
    """
    k = _check_configuration(n, xs, ys, max_k=3)
    rows = [(Component.X, 0, x) for x in xs] + [(Component.Y, 0, y) for y in ys]
    sign, log_det = np.linalg.slogdet(np.asarray(covariance_block(n, rows).entries))
    if sign <= 0:
        return 0.0, 0.0
    log_bound = 2 * k * k * np.log(n) + _log_gap_product(xs, n) + _log_gap_product(ys, n)
    return float(np.exp(log_det)), float(np.exp(log_det - log_bound))


def numerator_bound_monitor(
    n: int,
    xs: Sequence[float],
    ys: Sequence[float],
    samples: int = 100_000,
    seed: int = 0,
) -> float:
    """alpha_k / (n^{2k^2 + k} prod min(...)^2) with alpha_k estimated by conditioned Monte Carlo."""
    k = _check_configuration(n, xs, ys, max_k=2)
    mean, _, _ = _conditioned_derivative_moment(n, xs, ys, samples, seed)
    if mean <= 0:
        return 0.0
    log_alpha = np.log(mean) + 3 * k * np.log(n)
    log_bound = (2 * k * k + k) * np.log(n) + _log_gap_product(xs, n) + _log_gap_product(ys, n)
    return float(np.exp(log_alpha - log_bound))


def density_sup_monitor(
    n: int,
    configurations: Sequence[tuple[Sequence[float], Sequence[float]]],
    samples: int = 100_000,
    seed: int = 0,
) -> tuple[float, list[float]]:
    """
    Empirical sup of p_k n^{-2k} over configurations.

    Returns:
        (sup, per-configuration values; degenerate ones are left out)
    """
    values = []
    for index, (xs, ys) in enumerate(configurations):
        density = pk_density(n, xs, ys, samples=samples, seed=seed + index)
        if not density.degenerate:
            values.append(density.value / float(n) ** (2 * density.k))
    return (max(values) if values else 0.0), values
