"""
Trial aggregation and statistical checks.

Folds per-trial records into the exponential fit of the closest root,
Poisson window moments, disjoint-window independence and argument
uniformity. Every check returns a TestReport.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.stats import kstwo

from .gpoly import exclusion_width

POISSON_INTENSITY = 1.0 / 12.0
EXP_MEAN = 6.0


@dataclass
class RunningMoments:
    """Streaming count, mean and sum of squared deviations."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, values) -> "RunningMoments":
        """Fold a batch of values in."""
        batch = np.asarray(values, dtype=float).ravel()
        if batch.size == 0:
            return self
        batch_mean = float(batch.mean())
        other = RunningMoments(batch.size, batch_mean, float(np.sum((batch - batch_mean) ** 2)))
        return self.merge(other)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        """Chan's pairwise update, in place."""
        if other.count == 0:
            return self
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return self
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total
        return self

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else 0.0


@dataclass
class TrialRecord:
    """What one trial contributes to the statistics."""

    trial: int
    n: int
    seed: int
    min_scaled: float
    window_counts: dict = field(default_factory=dict)
    pairing_agreed: Optional[bool] = None
    args: list = field(default_factory=list)
    arg_distances: list = field(default_factory=list)
    min_gap: float = float("inf")
    roots_converged: Optional[bool] = None

    def __post_init__(self):
        if self.min_scaled < 0:
            raise ValueError(f"min_scaled must be non-negative, got {self.min_scaled}")
        for key, count in self.window_counts.items():
            if count < 0:
                raise ValueError(f"Window {key} has a negative count {count}")
        if len(self.args) != len(self.arg_distances):
            raise ValueError("args and arg_distances must have the same length")

    def to_dict(self) -> dict:
        """Plain JSON-ready mapping; infinities become None."""
        data = asdict(self)
        for key in ("min_scaled", "min_gap"):
            if math.isinf(data[key]):
                data[key] = None
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "TrialRecord":
        values = dict(data)
        for key in ("min_scaled", "min_gap"):
            if values.get(key) is None:
                values[key] = float("inf")
        return cls(**values)


@dataclass
class TestReport:
    """Outcome of one statistical check."""

    __test__ = False

    name: str
    statistic: float
    threshold: float
    passed: bool
    sample_size: int
    notes: str = ""
    details: dict = field(default_factory=dict)

    @classmethod
    def evaluate(
        cls,
        name: str,
        statistic: float,
        threshold: float,
        sample_size: int,
        notes: str = "",
        details: Optional[dict] = None,
    ) -> "TestReport":
        """Build a report whose passed flag is statistic <= threshold."""
        return cls(
            name=name,
            statistic=float(statistic),
            threshold=float(threshold),
            passed=bool(statistic <= threshold),
            sample_size=int(sample_size),
            notes=notes,
            details=details or {},
        )


def window_key(window: Sequence[float]) -> str:
    """Key used for a window in TrialRecord.window_counts."""
    lo, hi = window
    return f"{lo:g},{hi:g}"


def exp_cdf(t, mean: float = EXP_MEAN):
    """1 - exp(-t / mean), zero for t <= 0."""
    if mean <= 0:
        raise ValueError(f"Mean must be positive, got {mean}")
    values = np.clip(np.asarray(t, dtype=float), 0.0, None)
    result = -np.expm1(-values / mean)
    return float(result) if result.ndim == 0 else result


def ks_statistic(samples: Iterable[float], cdf: Callable) -> float:
    """
    Kolmogorov-Smirnov distance between the empirical law of samples and cdf.

    Raises:
        ValueError: If fewer than 2 samples are given
    """
    values = np.sort(np.asarray(list(samples), dtype=float))
    size = values.size
    if size < 2:
        raise ValueError(f"Need at least 2 samples, got {size}")
    reference = np.asarray(cdf(values), dtype=float)
    ranks = np.arange(1, size + 1)
    above = np.max(np.abs(ranks / size - reference))
    below = np.max(np.abs((ranks - 1) / size - reference))
    return float(max(above, below))


def ks_pvalue(statistic: float, size: int) -> float:
    """Exact two-sided p-value of a KS distance from size samples against a fully specified law."""
    if size < 1:
        raise ValueError(f"Sample size must be positive, got {size}")
    return float(kstwo.sf(statistic, size))


def factorial_moment(counts: Iterable[int], k: int) -> float:
    """
    Mean of count (count - 1) ... (count - k + 1) over trials.

    Raises:
        ValueError: If k < 1
    """
    if k < 1:
        raise ValueError(f"Order must be at least 1, got {k}")
    values = np.asarray(list(counts), dtype=np.int64)
    if values.size == 0:
        return 0.0
    return int(np.sum(_falling(values, k))) / values.size


def _falling(values: np.ndarray, k: int) -> np.ndarray:
    product = np.ones_like(values)
    for j in range(k):
        product = product * (values - j)
    return product


def _mean_and_error(values: np.ndarray) -> tuple[float, float]:
    """Mean and standard error from exact integer sums."""
    size = values.size
    total = int(np.sum(values))
    squares = int(np.sum(values * values))
    mean = total / size
    variance = (size * squares - total * total) / (size * (size - 1)) if size > 1 else 0.0
    return mean, math.sqrt(max(variance, 0.0) / size)


def _correlation(first: np.ndarray, second: np.ndarray) -> float:
    size = first.size
    sx, sy = int(np.sum(first)), int(np.sum(second))
    sxx, syy = int(np.sum(first * first)), int(np.sum(second * second))
    sxy = int(np.sum(first * second))
    cov = size * sxy - sx * sy
    vx = size * sxx - sx * sx
    vy = size * syy - sy * sy
    if vx == 0 or vy == 0:
        return 0.0
    return cov / math.sqrt(vx * vy)


def _disjoint(first: Sequence[float], second: Sequence[float]) -> bool:
    return first[1] <= second[0] or second[1] <= first[0]


def _ratio(deviation: float, allowed: float) -> float:
    if allowed > 0:
        return deviation / allowed
    return 0.0 if deviation == 0 else math.inf


def poisson_window_test(
    records: Sequence[TrialRecord],
    windows: Sequence[tuple[float, float]],
    intensity: float = POISSON_INTENSITY,
    slack: float = 0.1,
    sigmas: float = 3.0,
    min_trials: int = 500,
) -> TestReport:
    """
    Compare window counts with a homogeneous Poisson process.

    For each window U the first two factorial moments must lie within
    sigmas standard errors plus slack * target of (intensity |U|)^k, and
    every pair of disjoint windows must have count correlation within
    sigmas / sqrt(N) of 0. The statistic is the worst deviation as a
    fraction of its allowance, so the check passes at statistic <= 1.

    Raises:
        ValueError: If fewer than min_trials records are given
    """
    size = len(records)
    if size < min_trials:
        raise ValueError(f"Need at least {min_trials} trials, got {size}")

    counts = {}
    for window in windows:
        key = window_key(window)
        counts[key] = np.array([record.window_counts[key] for record in records], dtype=np.int64)

    moments = []
    worst = 0.0
    for window in windows:
        key = window_key(window)
        mean_count = intensity * (window[1] - window[0])
        for k in (1, 2):
            mean, error = _mean_and_error(_falling(counts[key], k))
            target = mean_count**k
            allowed = sigmas * error + slack * target
            ratio = _ratio(abs(mean - target), allowed)
            worst = max(worst, ratio)
            moments.append(
                {"window": key, "k": k, "value": mean, "target": target, "standard_error": error, "ratio": ratio}
            )

    correlations = []
    allowed = sigmas / math.sqrt(size)
    for i, first in enumerate(windows):
        for second in windows[i + 1 :]:
            if not _disjoint(first, second):
                continue
            rho = _correlation(counts[window_key(first)], counts[window_key(second)])
            ratio = _ratio(abs(rho), allowed)
            worst = max(worst, ratio)
            correlations.append(
                {"windows": [window_key(first), window_key(second)], "correlation": rho, "ratio": ratio}
            )

    notes = "" if correlations else "no disjoint window pairs; independence not checked"
    return TestReport.evaluate(
        "poisson_windows",
        worst,
        1.0,
        size,
        notes=notes,
        details={"moments": moments, "correlations": correlations},
    )


def arg_uniformity_test(
    records: Sequence[TrialRecord],
    window: tuple[float, float],
    constant: float = 1.95,
    min_trials: int = 500,
) -> TestReport:
    """
    KS test of pooled root arguments against the uniform law on the circle window.

    Only roots whose scaled distance lies in window count. Each record's
    arguments are restricted to its circle window and mapped linearly to
    (0, 1). The threshold is constant / sqrt(N) for N pooled arguments.

    Raises:
        ValueError: If fewer than min_trials records are given
    """
    if len(records) < min_trials:
        raise ValueError(f"Need at least {min_trials} trials, got {len(records)}")
    lo, hi = window
    pooled = []
    for record in records:
        delta = exclusion_width(record.n)
        for arg, distance in zip(record.args, record.arg_distances):
            if lo < distance < hi and delta < arg < np.pi - delta:
                pooled.append((arg - delta) / (np.pi - 2.0 * delta))

    if len(pooled) < 2:
        return TestReport(
            name="arg_uniformity",
            statistic=math.inf,
            threshold=math.inf,
            passed=False,
            sample_size=len(pooled),
            notes="inconclusive: too few arguments in the window",
        )

    statistic = ks_statistic(pooled, lambda u: np.clip(u, 0.0, 1.0))
    return TestReport.evaluate(
        "arg_uniformity",
        statistic,
        constant / math.sqrt(len(pooled)),
        len(pooled),
        details={"window": window_key(window)},
    )


def summarize_min_scaled(
    records: Sequence[TrialRecord],
    mean: float = EXP_MEAN,
    ks_threshold: float = 0.05,
) -> tuple[float, float, TestReport]:
    """
    Sample mean, its standard error and a KS report against Exp with the given mean.

    Trials without any annulus root (infinite min_scaled) are left out.
    """
    values = np.array([r.min_scaled for r in records if math.isfinite(r.min_scaled)], dtype=float)
    if values.size < 2:
        report = TestReport(
            name="exp_fit",
            statistic=math.inf,
            threshold=ks_threshold,
            passed=False,
            sample_size=int(values.size),
            notes="inconclusive: too few finite minima",
        )
        return float(values.mean()) if values.size else math.nan, math.nan, report

    moments = RunningMoments().push(values)
    statistic = ks_statistic(values, lambda t: exp_cdf(t, mean))
    report = TestReport.evaluate(
        "exp_fit",
        statistic,
        ks_threshold,
        values.size,
        details={
            "sample_mean": moments.mean,
            "standard_error": moments.standard_error,
            "target_mean": mean,
            "p_value": ks_pvalue(statistic, int(values.size)),
        },
    )
    return moments.mean, moments.standard_error, report


def histogram(values: Iterable[float], bins: int, value_range: tuple[float, float]) -> list[tuple[float, float, int]]:
    """(bin_lo, bin_hi, count) rows over value_range."""
    data = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
    counts, edges = np.histogram(data, bins=bins, range=value_range)
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]
