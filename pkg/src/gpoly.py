"""
Random polynomial sampling and evaluation on the unit circle.

Provides the Gaussian and Rademacher coefficient ensembles, Horner
evaluation of f, and evaluation of X = Re f(e^{ix}), Y = Im f(e^{ix})
and their derivatives, both on uniform grids (FFT) and pointwise.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import fft, optimize

MAX_DERIVATIVE_ORDER = 6

# cos and sin of j quarter turns, indexed by j mod 4
_QUARTER_COS = (1.0, 0.0, -1.0, 0.0)
_QUARTER_SIN = (0.0, 1.0, 0.0, -1.0)


class CoefficientLaw(str, Enum):
    """Distribution of the iid coefficients."""

    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


class Component(str, Enum):
    """Real or imaginary part of f on the circle."""

    X = "X"
    Y = "Y"


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """The coefficients eps_0..eps_n of one polynomial draw."""

    coeffs: np.ndarray
    law: CoefficientLaw = CoefficientLaw.GAUSSIAN
    seed: int = 0

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("Coefficients must be a non-empty one-dimensional sequence")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Coefficients must be finite")
        law = CoefficientLaw(self.law)
        if law is CoefficientLaw.RADEMACHER and not np.all(np.abs(coeffs) == 1.0):
            raise ValueError("Rademacher coefficients must all be -1 or +1")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "law", law)

    @property
    def n(self) -> int:
        """Degree (index of the last coefficient)."""
        return self.coeffs.size - 1


@dataclass(frozen=True, eq=False)
class CircleSample:
    """X and Y (and derivatives) of one draw on a uniform grid of the circle."""

    m: int
    angles: np.ndarray
    x_values: np.ndarray
    y_values: np.ndarray
    derivative_orders: dict = field(default_factory=dict)
    poly: CoefficientVector = None

    def values(self, which: Union[Component, str], order: int = 0) -> np.ndarray:
        """Grid values of X^(order) or Y^(order)."""
        component = Component(which)
        x_vals, y_vals = self.derivative_orders[order]
        return x_vals if component is Component.X else y_vals


def from_coefficients(
    coeffs, law: Union[CoefficientLaw, str] = CoefficientLaw.GAUSSIAN, seed: int = 0
) -> CoefficientVector:
    """Wrap a hand-built coefficient sequence (constants allowed)."""
    return CoefficientVector(coeffs=np.asarray(coeffs, dtype=float), law=CoefficientLaw(law), seed=seed)


def sample_polynomial(
    n: int, seed: int, law: Union[CoefficientLaw, str] = CoefficientLaw.GAUSSIAN
) -> CoefficientVector:
    """
    Draw eps_0..eps_n iid from the requested law.

    Args:
        n: Degree, at least 1
        seed: Non-negative integer seed; the same (n, seed, law) always gives the same draw
        law: 'gaussian' (standard normal) or 'rademacher' (uniform on {-1, +1})

    Returns:
        CoefficientVector of length n + 1

    Raises:
        ValueError: If n < 1 or the seed is negative
    """
    if n < 1:
        raise ValueError(f"Degree must be at least 1, got {n}")
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")

    law = CoefficientLaw(law)
    rng = np.random.default_rng(seed)
    if law is CoefficientLaw.GAUSSIAN:
        coeffs = rng.standard_normal(n + 1)
    else:
        coeffs = rng.choice(np.array([-1.0, 1.0]), size=n + 1)
    return CoefficientVector(coeffs=coeffs, law=law, seed=seed)


def scaled(f: CoefficientVector, factor: float) -> CoefficientVector:
    """Multiply every coefficient by a nonzero constant."""
    if factor == 0:
        raise ValueError("Scale factor must be nonzero")
    law = f.law if abs(factor) == 1.0 else CoefficientLaw.GAUSSIAN
    return CoefficientVector(coeffs=f.coeffs * factor, law=law, seed=f.seed)


def eval_complex(f: CoefficientVector, z):
    """Horner evaluation of sum eps_k z^k at a point or an array of points."""
    return npoly.polyval(z, f.coeffs)


def eval_circle_grid(f: CoefficientVector, m: int, max_order: int = 0) -> CircleSample:
    """
    Evaluate X, Y and derivatives up to max_order on m uniform angles.

    Each order is one inverse FFT of the zero-padded sequence eps_k (ik)^j.

    Raises:
        ValueError: If m is below 2(n + 1) or max_order is out of range
    """
    n = f.n
    if m < 2 * (n + 1):
        raise ValueError(f"Grid size {m} is below the Nyquist margin {2 * (n + 1)}")
    _check_order(max_order)

    k = np.arange(n + 1)
    derivative_orders = {}
    for order in range(max_order + 1):
        padded = np.zeros(m, dtype=complex)
        padded[: n + 1] = f.coeffs * (1j * k) ** order
        values = fft.ifft(padded) * m
        derivative_orders[order] = (values.real.copy(), values.imag.copy())

    x_values, y_values = derivative_orders[0]
    return CircleSample(
        m=m,
        angles=2.0 * np.pi * np.arange(m) / m,
        x_values=x_values,
        y_values=y_values,
        derivative_orders=derivative_orders,
        poly=f,
    )


def eval_trig(f: CoefficientVector, x, order: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """
    X^(order)(x) and Y^(order)(x) by direct summation at one or many angles.

    Uses X^(j)(x) = sum eps_k k^j cos(kx + j pi/2), with the quarter-turn
    phase applied exactly.
    """
    _check_order(order)
    angles = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(f.n + 1, dtype=float)
    weights = f.coeffs * k**order

    phase = np.outer(angles, k)
    cos_sum = np.cos(phase) @ weights
    sin_sum = np.sin(phase) @ weights

    quarter = order % 4
    x_vals = _QUARTER_COS[quarter] * cos_sum - _QUARTER_SIN[quarter] * sin_sum
    y_vals = _QUARTER_SIN[quarter] * cos_sum + _QUARTER_COS[quarter] * sin_sum
    return x_vals, y_vals


def eval_derivatives(f: CoefficientVector, x: float, max_order: int) -> list[tuple[float, float]]:
    """(X^(j)(x), Y^(j)(x)) for j = 0..max_order, unnormalized."""
    _check_order(max_order)
    result = []
    for order in range(max_order + 1):
        x_vals, y_vals = eval_trig(f, x, order)
        result.append((float(x_vals[0]), float(y_vals[0])))
    return result


def sup_norm_circle(f: CoefficientVector) -> float:
    """
    max |f(e^{ix})| over the circle.

    Scans a grid of 16(n + 1) points, then refines near the grid argmax by
    golden-section search.
    """
    if f.n == 0:
        return float(abs(f.coeffs[0]))

    m = 16 * (f.n + 1)
    sample = eval_circle_grid(f, m)
    moduli = np.hypot(sample.x_values, sample.y_values)
    best = int(np.argmax(moduli))
    grid_max = float(moduli[best])

    step = 2.0 * np.pi / m
    center = sample.angles[best]

    def negative_modulus(t: float) -> float:
        return -abs(eval_complex(f, np.exp(1j * t)))

    try:
        result = optimize.minimize_scalar(
            negative_modulus,
            bracket=(center - step, center, center + step),
            method="golden",
            options={"xtol": 1e-12},
        )
    except ValueError:
        # flat neighbourhood, no valid bracket
        return grid_max
    return max(grid_max, float(-result.fun))


def exclusion_width(n: int, multiplier: float = 1.0) -> float:
    """Half-width multiplier * n^{-1/2} of the zones removed around 0 and pi."""
    return multiplier / np.sqrt(n)


def in_circle_window(x, n: int, multiplier: float = 1.0):
    """True where x lies in [0, pi] at distance more than the exclusion width from 0 and pi."""
    delta = exclusion_width(n, multiplier)
    angles = np.asarray(x, dtype=float)
    return (angles > delta) & (angles < np.pi - delta)


def _check_order(order: int) -> None:
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"Derivative order must be in [0, {MAX_DERIVATIVE_ORDER}], got {order}")
