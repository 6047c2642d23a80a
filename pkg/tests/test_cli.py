"""
Tests for CLI argument parsing, subcommand runs and main function.
"""

import json
from dataclasses import replace
from unittest.mock import patch

import pytest
from src.cli import SUBCOMMANDS, main, parse_args, run
from src.config import RunConfig, build_run_config
from src.gpoly import sample_polynomial
from src.trials import run_trial


def _summary(config, subcommand):
    prefix = subcommand.replace("-", "_")
    with open(f"{config.output_path}/{prefix}_summary.json", encoding="utf-8") as f:
        return json.load(f)


class TestCLIArguments:
    """Tests for command line argument parsing."""

    def test_subcommand_and_flags(self):
        """Flags should land in overrides under their config names."""
        args = parse_args(["verify-exp", "--n", "300", "--seed", "5", "--out", "/tmp/r"])
        assert args.subcommand == "verify-exp"
        assert args.overrides["n"] == 300
        assert args.overrides["base_seed"] == 5
        assert args.overrides["output_path"] == "/tmp/r"
        assert args.config_path is None

    def test_unset_flags_are_none(self):
        """Flags not given should stay None so lower layers win."""
        args = parse_args(["kacrice"])
        assert all(value is None for value in args.overrides.values())

    def test_repeated_interval(self):
        """--interval should collect parsed windows."""
        args = parse_args(["verify-poisson", "--interval", "0,12", "--interval", "-6,6"])
        assert args.overrides["windows"] == [(0.0, 12.0), (-6.0, 6.0)]

    def test_pairing_check_interval(self):
        """pairing-check should send --interval to the pairing interval, not the windows."""
        args = parse_args(["pairing-check", "--n", "500", "--trials", "1000", "--interval", "0,4"])
        assert args.overrides["pairing_interval"] == (0.0, 4.0)
        assert args.overrides["windows"] is None
        config = build_run_config(args.overrides, search_paths=[], environ={})
        assert config.pairing_interval == (0.0, 4.0)
        assert config.windows == RunConfig().windows

    def test_pairing_check_single_interval(self):
        """pairing-check should refuse more than one --interval."""
        with pytest.raises(SystemExit):
            parse_args(["pairing-check", "--interval", "0,2", "--interval", "0,4"])

    def test_interval_elsewhere_leaves_pairing_interval(self):
        """Other subcommands should keep --interval as windows."""
        args = parse_args(["verify-exp", "--interval", "0,4"])
        assert args.overrides["windows"] == [(0.0, 4.0)]
        assert args.overrides["pairing_interval"] is None

    def test_sweep_and_config(self):
        """--sweep should parse degrees and --config should become a path."""
        args = parse_args(["pairing-check", "--sweep", "250,500", "--config", "run.yaml"])
        assert args.overrides["sweep"] == [250, 500]
        assert str(args.config_path) == "run.yaml"

    @pytest.mark.parametrize("argv", [[], ["unknown"], ["sample", "--interval", "3,1"], ["sample", "--law", "cauchy"]])
    def test_invalid_arguments_exit(self, argv):
        """argparse should exit on bad input."""
        with pytest.raises(SystemExit):
            parse_args(argv)

    def test_all_subcommands_parse(self):
        """Every subcommand should be accepted."""
        for name in SUBCOMMANDS:
            assert parse_args([name]).subcommand == name


class TestRun:
    """Tests for run function."""

    def test_sample(self, small_config):
        """sample should write a summary with roots and circle zeros."""
        status = run("sample", small_config)
        summary = _summary(small_config, "sample")
        assert status == 0
        assert summary["pass_flags"] == {"roots_converged": True}
        assert len(summary["statistics"]["roots"]) == small_config.n
        assert len(summary["statistics"]["coefficients"]) == small_config.n + 1

    def test_sample_uses_seed_directly(self, small_config):
        """sample should draw with the base seed itself."""
        run("sample", small_config)
        statistics = _summary(small_config, "sample")["statistics"]
        expected = sample_polynomial(small_config.n, small_config.base_seed, small_config.law)
        assert statistics["seed"] == small_config.base_seed
        assert statistics["coefficients"] == expected.coeffs.tolist()

    def test_verify_exp_files(self, small_config):
        """verify-exp should write trials, summary and histogram files."""
        status = run("verify-exp", small_config)
        out = small_config.output_path
        with open(f"{out}/verify_exp_trials.jsonl", encoding="utf-8") as f:
            lines = f.read().splitlines()
        summary = _summary(small_config, "verify-exp")
        assert len(lines) == small_config.trials
        assert json.loads(lines[0])["trial"] == 0
        assert set(summary["pass_flags"]) == {"exp_fit", "mean_in_range", "roots_converged"}
        assert summary["statistics"]["unconverged_draws"] == 0
        assert status == (0 if all(summary["pass_flags"].values()) else 1)
        with open(f"{out}/verify_exp_hist.csv", encoding="utf-8") as f:
            assert f.readline().strip() == "bin_lo,bin_hi,count"

    def test_verify_poisson_needs_trials(self, small_config):
        """verify-poisson should refuse fewer than 500 trials."""
        with pytest.raises(ValueError, match="at least 500"):
            run("verify-poisson", small_config)

    def test_unknown_subcommand(self, small_config):
        """Should raise ValueError naming the subcommands."""
        with pytest.raises(ValueError, match="Unknown subcommand"):
            run("plot", small_config)

    def test_failed_trials(self, small_config):
        """A failing trial should keep earlier records, skip the summary and return 1."""

        def flaky(config, index, pairing=False):
            if index == 2:
                raise RuntimeError("boom")
            return run_trial(config, index, pairing)

        with patch("src.trials.run_trial", side_effect=flaky):
            status = run("verify-exp", small_config)

        out = small_config.output_path
        with open(f"{out}/verify_exp_trials.jsonl", encoding="utf-8") as f:
            assert len(f.read().splitlines()) == 2
        assert status == 1
        with pytest.raises(FileNotFoundError):
            _summary(small_config, "verify-exp")

    def test_pairing_check_sweep(self, small_config):
        """pairing-check should report agreement per swept degree."""
        config = replace(small_config, sweep=[20, 30], trials=3)
        run("pairing-check", config)
        summary = _summary(config, "pairing-check")
        assert set(summary["statistics"]["agreement"]) == {"20", "30"}
        assert set(summary["pass_flags"]) == {"agreement_floor", "agreement_trend", "roots_converged"}

    def test_unconverged_draws_fail_the_run(self, small_config):
        """Draws the root finder did not finish should be counted and fail the run."""
        config = replace(small_config, max_sweeps=1)
        status = run("verify-exp", config)
        summary = _summary(config, "verify-exp")
        with open(f"{config.output_path}/verify_exp_trials.jsonl", encoding="utf-8") as f:
            records = [json.loads(line) for line in f]
        assert status == 1
        assert summary["pass_flags"]["roots_converged"] is False
        assert summary["statistics"]["unconverged_draws"] == config.trials
        assert all(r["roots_converged"] is False for r in records)

    def test_bounds(self, small_config):
        """bounds should flag stability across degrees and sweep clustered gaps."""
        config = replace(small_config, sweep=[40, 60], trials=2, mc_samples=2000)
        run("bounds", config)
        summary = _summary(config, "bounds")
        flags = summary["pass_flags"]
        for k in (1, 2):
            assert f"numerator_stable_k{k}" in flags
            assert f"det_ratio_stable_k{k}" in flags
        assert {"det_ratio_floor_clustered", "numerator_clustered_40", "numerator_clustered_60"} <= set(flags)
        clustered = summary["statistics"]["degrees"]["40"]["clustered"]
        assert set(clustered["det_ratio_by_gap"]) == {"2", "1", "0.5", "0.25", "0.1"}
        assert clustered["det_ratio_floor"] == min(clustered["det_ratio_by_gap"].values())
        assert clustered["det_ratio_floor"] > 0
        assert clustered["numerator_ratio"] > 0

    def test_limit_proc(self, small_config):
        """limit-proc should compare the simulator with the kernel and scan eigenvalues."""
        config = replace(small_config, trials=500)
        run("limit-proc", config)
        summary = _summary(config, "limit-proc")
        assert len(summary["statistics"]["entries"]) == 27
        assert summary["pass_flags"]["eigenvalues_positive"] is True


class TestMain:
    """Tests for main function."""

    def test_main_success(self, tmp_path, monkeypatch):
        """main should exit 0 when every check passes."""
        monkeypatch.delenv("CP_SEED", raising=False)
        with pytest.raises(SystemExit) as exc_info:
            main(["sample", "--n", "5", "--seed", "1", "--out", str(tmp_path)])
        assert exc_info.value.code == 0
        assert (tmp_path / "sample_summary.json").exists()

    def test_main_invalid_config(self, tmp_path, monkeypatch):
        """main should exit 1 on an invalid config."""
        monkeypatch.delenv("CP_SEED", raising=False)
        with pytest.raises(SystemExit) as exc_info:
            main(["sample", "--n", "0", "--out", str(tmp_path)])
        assert exc_info.value.code == 1

    def test_main_seed_from_environment(self, tmp_path, monkeypatch):
        """CP_SEED should set the base seed when --seed is absent."""
        monkeypatch.setenv("CP_SEED", "9")
        with pytest.raises(SystemExit):
            main(["sample", "--n", "5", "--out", str(tmp_path)])
        summary = json.loads((tmp_path / "sample_summary.json").read_text())
        assert summary["config"]["base_seed"] == 9
