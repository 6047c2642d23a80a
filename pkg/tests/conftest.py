"""
Pytest fixtures and configuration for circle Poisson lab tests.
"""

import numpy as np
import pytest
from src.config import RunConfig
from src.gpoly import from_coefficients, sample_polynomial
from src.stats import TrialRecord, window_key


@pytest.fixture
def linear_poly():
    """f(z) = 1 + z, a single root at -1."""
    return from_coefficients([1.0, 1.0])


@pytest.fixture
def cyclotomic_poly():
    """f(z) = 1 + z + z^2 + z^3, roots at -1 and +-i."""
    return from_coefficients([1.0, 1.0, 1.0, 1.0])


@pytest.fixture
def gaussian_draw():
    """A seeded Gaussian draw of degree 40."""
    return sample_polynomial(40, seed=11)


@pytest.fixture
def small_config(tmp_path):
    """A fast run config writing into a temporary directory."""
    return RunConfig(
        n=20,
        trials=6,
        base_seed=3,
        windows=[(-20.0, 20.0), (0.0, 12.0)],
        source="nu",
        output_path=str(tmp_path / "results"),
        arg_window=(-50.0, 50.0),
    )


def make_records(counts_by_window: dict, n: int = 500, args=None, distances=None) -> list[TrialRecord]:
    """Synthetic TrialRecords with the given per-window counts (same length lists)."""
    size = len(next(iter(counts_by_window.values())))
    records = []
    for t in range(size):
        records.append(
            TrialRecord(
                trial=t,
                n=n,
                seed=t,
                min_scaled=1.0,
                window_counts={window_key(w): int(c[t]) for w, c in counts_by_window.items()},
                args=list(args[t]) if args is not None else [],
                arg_distances=list(distances[t]) if distances is not None else [],
            )
        )
    return records


@pytest.fixture
def poisson_records():
    """2000 records whose window counts are Poisson with mean |U|/12."""
    rng = np.random.default_rng(2024)
    size = 2000
    left = rng.poisson(0.5, size)
    right = rng.poisson(0.5, size)
    wide = rng.poisson(2.0, size)
    return make_records({(-6.0, 0.0): left, (0.0, 6.0): right, (0.0, 24.0): wide})


@pytest.fixture
def output_dir(tmp_path):
    """Create a temporary output directory."""
    directory = tmp_path / "out"
    directory.mkdir()
    return directory


@pytest.fixture
def record_factory():
    """Build synthetic TrialRecords from per-window count lists."""
    return make_records
