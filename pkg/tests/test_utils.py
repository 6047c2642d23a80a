"""
Tests for utility functions.
"""

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import pytest
from rich.progress import Progress
from src.utils import create_progress_bar, to_jsonable, trial_seed, write_csv, write_json, write_jsonl


class Color(Enum):
    RED = "red"


@dataclass
class Point:
    x: float
    label: str


class TestTrialSeed:
    """Tests for trial_seed function."""

    def test_deterministic(self):
        """Same inputs should give the same seed."""
        assert trial_seed(0, 5) == trial_seed(0, 5)

    def test_distinct(self):
        """Different trials and bases should give different seeds."""
        seeds = {trial_seed(base, t) for base in range(3) for t in range(100)}
        assert len(seeds) == 300

    def test_range(self):
        """Seeds should be 64-bit unsigned."""
        assert 0 <= trial_seed(7, 3) < 2**64

    def test_negative_rejected(self):
        """Should raise ValueError on negative inputs."""
        with pytest.raises(ValueError, match="non-negative"):
            trial_seed(-1, 0)


class TestToJsonable:
    """Tests for to_jsonable function."""

    def test_numpy_values(self):
        """Should convert numpy scalars and arrays."""
        assert to_jsonable(np.float64(1.5)) == 1.5
        assert to_jsonable(np.int64(3)) == 3
        assert to_jsonable(np.array([1, 2])) == [1, 2]
        assert to_jsonable(np.bool_(True)) is True

    def test_non_finite_become_none(self):
        """inf and NaN should become None."""
        assert to_jsonable([float("inf"), float("nan"), -np.inf]) == [None, None, None]

    def test_structures(self):
        """Should walk dataclasses, enums, tuples, dicts and paths."""
        value = {"p": Point(1.0, "a"), "c": Color.RED, "t": (1, 2), "path": Path("/tmp/x"), 3: "k"}
        expected = {"p": {"x": 1.0, "label": "a"}, "c": "red", "t": [1, 2], "path": "/tmp/x", "3": "k"}
        assert to_jsonable(value) == expected


class TestWriters:
    """Tests for the result file writers."""

    def test_write_json(self, output_dir):
        """Should write sorted, indented JSON with a trailing newline."""
        path = write_json(output_dir / "summary.json", {"b": 1, "a": float("inf")})
        text = path.read_text()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": None, "b": 1}

    def test_write_jsonl(self, output_dir):
        """Should write one compact object per line in order."""
        path = write_jsonl(output_dir / "nested" / "rows.jsonl", [{"t": 1}, {"t": 0}])
        lines = path.read_text().splitlines()
        assert lines == ['{"t":1}', '{"t":0}']

    def test_write_csv(self, output_dir):
        """Should write the header and full-precision floats."""
        path = write_csv(output_dir / "hist.csv", ["lo", "hi", "count"], [(0.1, 0.2, 3)])
        lines = path.read_text().splitlines()
        assert lines == ["lo,hi,count", "0.1,0.2,3"]


class TestCreateProgressBar:
    """Tests for create_progress_bar function."""

    def test_returns_progress_instance(self):
        """Should return a transient rich Progress instance."""
        progress = create_progress_bar()
        assert isinstance(progress, Progress)
        assert progress.live.transient is True
