"""
Monte Carlo trial execution.

Each trial draws one polynomial from its own seed, builds the annulus
measure and/or the circle-pair measure, and reduces them to a
TrialRecord. Trials run serially or on a process pool and are folded in
trial order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Optional

from .config import RunConfig, resolve_source
from .gpoly import Component, eval_circle_grid, sample_polynomial
from .process import MuMeasure, NuMeasure, min_scaled_distance, mu_measure, nu_measure, pairing_check
from .roots import find_all_roots, min_root_gap, trig_zeros
from .stats import TrialRecord, window_key
from .utils import create_progress_bar, trial_seed

GRID_OVERSAMPLING = 8


@dataclass
class TrialRun:
    """Records folded so far and the error that stopped the run, if any."""

    records: list = field(default_factory=list)
    error: Optional[BaseException] = None

    @property
    def complete(self) -> bool:
        return self.error is None


def circle_pairs(f, config: RunConfig) -> MuMeasure:
    """Circle-pair measure of one draw from a grid of 8(n + 1) angles."""
    n = config.n
    sample = eval_circle_grid(f, GRID_OVERSAMPLING * (n + 1))
    zx = trig_zeros(sample, Component.X, n, config.exclusion_multiplier)
    zy = trig_zeros(sample, Component.Y, n, config.exclusion_multiplier)
    return mu_measure(zx, zy, n, config.cutoff_multiplier)


def _in_window(value: float, window) -> bool:
    return window[0] < value < window[1]


def _nu_fields(nu: NuMeasure, config: RunConfig) -> dict:
    points = [(d, a) for d, a in nu.points if _in_window(d, config.arg_window)]
    return {
        "min_scaled": min_scaled_distance(nu),
        "window_counts": {window_key(w): nu.count(w) for w in config.windows},
        "args": [a for _, a in points],
        "arg_distances": [d for d, _ in points],
    }


def _mu_fields(mu: MuMeasure, config: RunConfig) -> dict:
    points = [(p.gamma, p.x) for p in mu.pairs if _in_window(p.gamma, config.arg_window)]
    gammas = [abs(p.gamma) for p in mu.pairs]
    return {
        "min_scaled": float(min(gammas)) if gammas else float("inf"),
        "window_counts": {window_key(w): mu.count(w) for w in config.windows},
        "args": [a for _, a in points],
        "arg_distances": [d for d, _ in points],
    }


def run_trial(config: RunConfig, index: int, pairing: bool = False) -> TrialRecord:
    """
    One trial: sample, measure, reduce.

    With pairing set both measures are built and compared on
    config.pairing_interval; window counts still come from the configured
    source. A draw whose root finder ran out of sweeps is still measured
    and marked with roots_converged=False.
    """
    seed = trial_seed(config.base_seed, index)
    f = sample_polynomial(config.n, seed, config.law)
    source = resolve_source(config)

    nu = mu = None
    min_gap = float("inf")
    converged = None
    if source == "nu" or pairing:
        roots = find_all_roots(f, max_sweeps=config.max_sweeps)
        converged = roots.converged
        nu = nu_measure(roots, config.n)
        min_gap = min_root_gap(roots, config.n, config.arg_window)
    if source == "mu" or pairing:
        mu = circle_pairs(f, config)

    values = _nu_fields(nu, config) if source == "nu" else _mu_fields(mu, config)
    agreed = pairing_check(nu, mu, config.pairing_interval).agreed if pairing else None
    return TrialRecord(
        trial=index,
        n=config.n,
        seed=seed,
        pairing_agreed=agreed,
        min_gap=min_gap,
        roots_converged=converged,
        **values,
    )


def run_trials(config: RunConfig, pairing: bool = False, description: str = "Running trials") -> TrialRun:
    """
    Run config.trials trials and fold the records in trial order.

    Seeds depend on the trial index only, so the records do not depend on
    config.workers. A failing trial stops the fold; the records before it
    are kept.
    """
    run = TrialRun()
    task_fn = partial(run_trial, config, pairing=pairing)
    indices = range(config.trials)

    with create_progress_bar() as progress:
        task = progress.add_task(description, total=config.trials)
        try:
            if config.workers == 1:
                for index in indices:
                    run.records.append(task_fn(index))
                    progress.advance(task)
            else:
                chunk = max(1, config.trials // (4 * config.workers))
                with ProcessPoolExecutor(max_workers=config.workers) as pool:
                    for record in pool.map(task_fn, indices, chunksize=chunk):
                        run.records.append(record)
                        progress.advance(task)
        except Exception as e:  # noqa: BLE001
            run.error = e
    return run
