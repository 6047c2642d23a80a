"""
Tests for Monte Carlo trial execution.
"""

from dataclasses import replace
from unittest.mock import patch

import pytest
from src.gpoly import sample_polynomial
from src.stats import window_key
from src.trials import circle_pairs, run_trial, run_trials


class TestRunTrial:
    """Tests for run_trial function."""

    def test_deterministic(self, small_config):
        """Same config and index should give the same record."""
        assert run_trial(small_config, 2) == run_trial(small_config, 2)

    def test_root_source_fields(self, small_config):
        """Root-based records should carry every window and arguments in arg_window."""
        record = run_trial(small_config, 0)
        assert record.trial == 0
        assert set(record.window_counts) == {window_key(w) for w in small_config.windows}
        assert record.min_scaled >= 0
        assert record.pairing_agreed is None
        lo, hi = small_config.arg_window
        assert all(lo < d < hi for d in record.arg_distances)

    def test_pairing(self, small_config):
        """Pairing runs should record an agreement flag."""
        record = run_trial(small_config, 1, pairing=True)
        assert record.pairing_agreed in (True, False)

    def test_circle_pair_source(self, small_config):
        """Pair-based records should count circle pairs."""
        config = replace(small_config, source="mu")
        record = run_trial(config, 0)
        mu = circle_pairs(sample_polynomial(config.n, record.seed, config.law), config)
        assert record.window_counts[window_key((-20.0, 20.0))] == mu.count((-20.0, 20.0))
        assert record.roots_converged is None

    def test_converged_draw_marked(self, small_config):
        """Root-based records should say the root finder converged."""
        assert run_trial(small_config, 0).roots_converged is True

    def test_unconverged_draw_marked(self, small_config):
        """A one-sweep budget should leave the draw marked as not converged."""
        record = run_trial(replace(small_config, max_sweeps=1), 0)
        assert record.roots_converged is False
        assert record.to_dict()["roots_converged"] is False


class TestRunTrials:
    """Tests for run_trials function."""

    def test_records_in_order(self, small_config):
        """Should return one record per trial in trial order."""
        run = run_trials(small_config)
        assert run.complete
        assert [r.trial for r in run.records] == list(range(small_config.trials))

    def test_independent_of_workers(self, small_config):
        """Records should not depend on the worker count."""
        serial = run_trials(small_config)
        parallel = run_trials(replace(small_config, workers=2))
        assert serial.records == parallel.records

    def test_failure_keeps_earlier_records(self, small_config):
        """A failing trial should stop the fold and keep what came before."""

        def flaky(config, index, pairing=False):
            if index == 3:
                raise RuntimeError("boom")
            return run_trial(config, index, pairing)

        with patch("src.trials.run_trial", side_effect=flaky):
            run = run_trials(small_config)

        assert not run.complete
        assert len(run.records) == 3
        assert str(run.error) == "boom"

    def test_trial_seed_shift(self, small_config):
        """A different base seed should give different draws."""
        first = run_trials(small_config).records
        second = run_trials(replace(small_config, base_seed=4)).records
        assert [r.seed for r in first] != [r.seed for r in second]


@pytest.mark.slow
class TestLargerRuns:
    """Longer runs kept out of the default selection."""

    def test_mu_and_nu_mostly_agree(self, small_config):
        """At n = 500 roots and circle pairs should mostly agree on (0, 2)."""
        config = replace(small_config, n=500, trials=50, arg_window=(-10.0, 10.0))
        run = run_trials(config, pairing=True)
        agreed = sum(1 for r in run.records if r.pairing_agreed)
        assert agreed / len(run.records) >= 0.8
