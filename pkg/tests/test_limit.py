"""
Tests for the limiting process (W, Z).
"""

import numpy as np
import pytest
from src.gpoly import exclusion_width
from src.limit import (
    LimitComponent,
    boundary_grid,
    kernel_error_table,
    limit_cov,
    limit_covariance_block,
    min_eig_limit,
    quadratic_form_integral,
    simulate_limit_process,
)


class TestLimitCov:
    """Tests for limit_cov function."""

    def test_closed_forms(self):
        """Order 0 kernels should match sin u / 2u and (1 - cos u) / 2u."""
        t, s = 3.1, 0.8
        u = t - s
        assert limit_cov("W", 0, "W", 0, t, s) == pytest.approx(np.sin(u) / (2 * u), rel=1e-10)
        assert limit_cov("Z", 0, "Z", 0, t, s) == pytest.approx(np.sin(u) / (2 * u), rel=1e-10)
        assert limit_cov("Z", 0, "W", 0, t, s) == pytest.approx((1 - np.cos(u)) / (2 * u), rel=1e-10)
        assert limit_cov("W", 0, "Z", 0, t, s) == pytest.approx(-(1 - np.cos(u)) / (2 * u), rel=1e-10)

    def test_diagonal(self):
        """Variances of W and W' should be 1/2 and 1/6."""
        assert limit_cov(LimitComponent.W, 0, LimitComponent.W, 0, 1.0, 1.0) == pytest.approx(0.5)
        assert limit_cov(LimitComponent.W, 1, LimitComponent.W, 1, 1.0, 1.0) == pytest.approx(1.0 / 6.0)
        assert limit_cov(LimitComponent.Z, 0, LimitComponent.W, 0, 1.0, 1.0) == 0.0

    def test_series_switch_is_continuous(self):
        """Values on both sides of the series cutoff should agree."""
        for a, b in [(0, 0), (1, 0), (2, 1)]:
            below = limit_cov("Z", a, "W", b, 0.99e-4, 0.0)
            above = limit_cov("Z", a, "W", b, 1.01e-4, 0.0)
            assert below == pytest.approx(above, abs=1e-8)

    def test_exact_symmetry(self):
        """Swapping rows should give the identical value."""
        assert limit_cov("Z", 1, "W", 2, 2.5, 0.3) == limit_cov("W", 2, "Z", 1, 0.3, 2.5)

    def test_order_range(self):
        """Should reject orders above 6."""
        with pytest.raises(ValueError, match="Derivative order"):
            limit_cov("W", 7, "W", 0, 0.0, 1.0)


class TestLimitCovarianceBlock:
    """Tests for limit_covariance_block and the quadratic form identity."""

    def test_row_order(self):
        """Rows should list W then Z, each by point then order."""
        block = limit_covariance_block([0.0, 2.0], 1)
        labels = [(c.component, c.location, c.order) for c in block.labels]
        assert labels[:4] == [("W", 0.0, 0), ("W", 0.0, 1), ("W", 2.0, 0), ("W", 2.0, 1)]
        assert labels[4][0] == "Z"
        assert block.dim == 8

    def test_rejects_bad_input(self):
        """Should raise on repeated points or a negative order."""
        with pytest.raises(ValueError, match="distinct"):
            limit_covariance_block([1.0, 1.0], 0)
        with pytest.raises(ValueError, match="non-negative"):
            limit_covariance_block([1.0], -1)

    def test_quadratic_form(self):
        """v^T Sigma v should equal half the integral of |G_v|^2."""
        v = np.random.default_rng(3).standard_normal(12)
        lhs, rhs = quadratic_form_integral([0.0, 0.5, 2.0], 1, v)
        assert lhs > 0
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_quadratic_form_zero_vector(self):
        """The zero vector gives (0, 0)."""
        assert quadratic_form_integral([0.0, 1.0], 0, np.zeros(4)) == (0.0, 0.0)

    def test_quadratic_form_length(self):
        """Should check the vector length."""
        with pytest.raises(ValueError, match="length 4"):
            quadratic_form_integral([0.0, 1.0], 0, np.ones(3))


class TestMinEig:
    """Tests for min_eig_limit function."""

    def test_methods_agree(self):
        """eigh and svd should agree for separated points."""
        zs = [0.0, 3.0]
        assert min_eig_limit(zs, 1, "svd") == pytest.approx(min_eig_limit(zs, 1, "eigh"), rel=1e-6)

    def test_positive_and_decreasing(self):
        """Eigenvalues should be positive and shrink as points merge."""
        far = min_eig_limit([0.0, 1.0], 1, "svd")
        near = min_eig_limit([0.0, 0.5], 1, "svd")
        assert far > near > 0

    def test_far_points(self):
        """Far apart points decouple, so the smallest eigenvalue tends to 1/2."""
        assert min_eig_limit([0.0, 1000.0], 0) == pytest.approx(0.5, abs=1e-2)

    def test_unknown_method(self):
        """Should reject unknown methods."""
        with pytest.raises(ValueError, match="Unknown eigenvalue method"):
            min_eig_limit([0.0], 0, "qr")


class TestSimulation:
    """Tests for simulate_limit_process function."""

    def test_shapes(self):
        """Arrays should be realizations by grid points."""
        sample = simulate_limit_process([0.0, 1.0, np.pi], seed=1, realizations=5)
        assert sample.w.shape == (5, 3)
        assert sample.z.shape == (5, 3)
        assert sample.seed == 1

    def test_covariance(self):
        """Empirical covariances should match the kernel."""
        grid = [0.0, 1.0]
        sample = simulate_limit_process(grid, seed=7, realizations=20_000)
        w0, w1 = sample.w[:, 0], sample.w[:, 1]
        z1 = sample.z[:, 1]
        assert np.mean(w0 * w0) == pytest.approx(0.5, abs=0.03)
        assert np.mean(w1 * w0) == pytest.approx(limit_cov("W", 0, "W", 0, 1.0, 0.0), abs=0.03)
        assert np.mean(z1 * w0) == pytest.approx(limit_cov("Z", 0, "W", 0, 1.0, 0.0), abs=0.03)

    def test_reproducible(self):
        """Same seed, same sample."""
        first = simulate_limit_process([0.0, 2.0], seed=4, realizations=3)
        second = simulate_limit_process([0.0, 2.0], seed=4, realizations=3)
        np.testing.assert_array_equal(first.w, second.w)

    def test_validation(self):
        """Should reject too few nodes and zero realizations."""
        with pytest.raises(ValueError, match="spectral nodes"):
            simulate_limit_process([0.0], spectral_nodes=32)
        with pytest.raises(ValueError, match="Realizations"):
            simulate_limit_process([0.0], realizations=0)


class TestKernelError:
    """Tests for boundary_grid and kernel_error_table."""

    def test_grid_inside_window(self):
        """Grid points should be sorted and inside the circle window."""
        n = 100
        grid = boundary_grid(n, dense=8, interior=2)
        delta = exclusion_width(n)
        assert np.all(np.diff(grid) > 0)
        assert grid[0] > delta
        assert grid[-1] < np.pi - delta

    def test_error_decays(self):
        """The finite kernel should approach the limit as n grows."""
        coarse = kernel_error_table(100, boundary_grid(100, dense=8, interior=2))
        fine = kernel_error_table(400, boundary_grid(400, dense=8, interior=2))
        assert fine < coarse
