"""
Utility functions for the circle Poisson lab.

Provides console helpers, the trial progress bar, per-trial seed mixing
and the JSON, JSON-lines and CSV writers used for result files.
"""

import csv
import json
import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
)

console = Console()


def trial_seed(base_seed: int, trial: int) -> int:
    """
    Seed of trial t, a fixed 64-bit hash of (base_seed, t).

    Independent of how trials are split across workers.
    """
    if base_seed < 0 or trial < 0:
        raise ValueError(f"Seeds and trial indices must be non-negative, got ({base_seed}, {trial})")
    state = np.random.SeedSequence([base_seed, trial]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def to_jsonable(value):
    """Convert numpy scalars, arrays, tuples, enums and dataclasses; infinities and NaN become None."""
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


def write_json(path: Path, data) -> Path:
    """Write data as sorted, indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(data), f, sort_keys=True, indent=2)
        f.write("\n")
    return path


def write_jsonl(path: Path, rows: Iterable) -> Path:
    """Write one compact JSON object per line, in the order given."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(to_jsonable(row), sort_keys=True, separators=(",", ":")))
            f.write("\n")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write a CSV file with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def create_progress_bar() -> Progress:
    """Create a standard progress bar instance that clears itself when done."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
        transient=True,
    )
