"""
Configuration handling for the circle Poisson lab.

Provides the RunConfig dataclass, defaults file discovery and loading,
interval parsing and the merge of defaults, environment and flags.
"""

import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping, Optional

import yaml
from rich.console import Console

from .gpoly import CoefficientLaw

console = Console()


# Default config file locations
CONFIG_PATHS = [
    Path(__file__).parent.parent / "config" / "defaults.yaml",
    Path.home() / ".config" / "circle-poisson" / "defaults.yaml",
    Path("/etc/circle-poisson/defaults.yaml"),
]

SEED_ENV = "CP_SEED"
SOURCES = ("auto", "nu", "mu")
# auto switches from the root finder to the grid pipeline above this degree
AUTO_SOURCE_MAX_NU = 1000

_INTERVAL_FIELDS = ("arg_window", "pairing_interval")


def parse_interval(text) -> tuple[float, float]:
    """
    Parse an interval given as 'lo,hi' (or a two-element sequence).

    Raises:
        ValueError: If the value is malformed or lo >= hi
    """
    if isinstance(text, str):
        parts = text.split(",")
    else:
        parts = list(text)
    if len(parts) != 2:
        raise ValueError(f"Invalid interval: '{text}'. Use the form lo,hi (e.g. 0,12)")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except (TypeError, ValueError):
        raise ValueError(f"Invalid interval: '{text}'. Both ends must be numbers") from None
    if not lo < hi:
        raise ValueError(f"Invalid interval: '{text}'. Lower end must be below upper end")
    return lo, hi


def parse_sweep(text) -> list[int]:
    """
    Parse a degree sweep given as 'n1,n2,...' (or a sequence).

    Raises:
        ValueError: If an entry is not a positive integer
    """
    parts = text.split(",") if isinstance(text, str) else list(text)
    degrees = []
    for part in parts:
        try:
            degree = int(str(part).strip())
        except ValueError:
            raise ValueError(f"Invalid sweep entry '{part}' in '{text}'") from None
        if degree < 1:
            raise ValueError(f"Sweep degrees must be positive, got {degree}")
        degrees.append(degree)
    return degrees


@dataclass
class RunConfig:
    """Everything a subcommand run depends on."""

    n: int = 500
    trials: int = 1000
    base_seed: int = 0
    law: str = "gaussian"
    windows: list = field(default_factory=lambda: [(0.0, 12.0), (-6.0, 6.0), (0.0, 24.0)])
    source: str = "auto"
    workers: int = 1
    output_path: str = "./results"
    cutoff_multiplier: float = 1.0
    sweep: list = field(default_factory=list)
    arg_window: tuple = (-10.0, 10.0)
    pairing_interval: tuple = (0.0, 2.0)
    exclusion_multiplier: float = 1.0
    x_panels: int = 32
    gh_nodes: int = 64
    mc_samples: int = 100_000
    max_sweeps: int = 500

    @classmethod
    def from_mapping(cls, data: Mapping) -> "RunConfig":
        """
        Build a config from a plain mapping (YAML file or merged flags).

        Raises:
            ValueError: On unknown keys or malformed values
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown config keys: {', '.join(unknown)}")

        values = dict(data)
        if "windows" in values:
            values["windows"] = [parse_interval(w) for w in values["windows"]]
        for name in _INTERVAL_FIELDS:
            if name in values:
                values[name] = parse_interval(values[name])
        if "sweep" in values:
            values["sweep"] = parse_sweep(values["sweep"]) if values["sweep"] else []
        for name in ("n", "trials", "base_seed", "workers", "x_panels", "gh_nodes", "mc_samples", "max_sweeps"):
            if name in values:
                values[name] = _as_int(name, values[name])
        for name in ("cutoff_multiplier", "exclusion_multiplier"):
            if name in values:
                values[name] = float(values[name])
        return cls(**values)

    def validate(self) -> None:
        """
        Check ranges and enumerations.

        Raises:
            ValueError: On the first invalid field
        """
        if self.n < 1:
            raise ValueError(f"Degree n must be at least 1, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"Trials must be at least 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"Workers must be at least 1, got {self.workers}")
        if self.base_seed < 0:
            raise ValueError(f"Seed must be non-negative, got {self.base_seed}")
        if self.law not in {law.value for law in CoefficientLaw}:
            raise ValueError(f"Unknown law '{self.law}'. Available: gaussian, rademacher")
        if self.source not in SOURCES:
            raise ValueError(f"Unknown source '{self.source}'. Available: {', '.join(SOURCES)}")
        if self.cutoff_multiplier <= 0:
            raise ValueError(f"Cutoff multiplier must be positive, got {self.cutoff_multiplier}")
        if self.exclusion_multiplier <= 0:
            raise ValueError(f"Exclusion multiplier must be positive, got {self.exclusion_multiplier}")
        if not self.windows:
            raise ValueError("At least one window is required")
        for window in [*self.windows, self.arg_window, self.pairing_interval]:
            parse_interval(window)
        if self.x_panels < 1 or self.gh_nodes < 1 or self.mc_samples < 1:
            raise ValueError("x_panels, gh_nodes and mc_samples must be positive")
        if self.max_sweeps < 1:
            raise ValueError(f"Root finder sweep budget must be at least 1, got {self.max_sweeps}")

    def to_dict(self) -> dict:
        """Plain mapping for the summary file."""
        data = asdict(self)
        data["windows"] = [list(w) for w in self.windows]
        data["arg_window"] = list(self.arg_window)
        data["pairing_interval"] = list(self.pairing_interval)
        return data


def _as_int(name: str, value) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be an integer, got '{value}'") from None
    if isinstance(value, float) and value != number:
        raise ValueError(f"{name} must be an integer, got '{value}'")
    return number


def resolve_source(config: RunConfig) -> str:
    """Map 'auto' to nu for n <= 1000 and to mu above."""
    if config.source != "auto":
        return config.source
    return "nu" if config.n <= AUTO_SOURCE_MAX_NU else "mu"


def _find_config_file(search_paths: list) -> Optional[Path]:
    """Find the first existing config file from the search paths."""
    for path in search_paths:
        if path and Path(path).exists():
            return Path(path)
    return None


def _read_yaml(path: Path) -> dict:
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {path} must contain a mapping")
    return data


def load_defaults(search_paths: Optional[list] = None) -> dict:
    """Load the first defaults file found, or an empty mapping."""
    config_file = _find_config_file(search_paths if search_paths is not None else CONFIG_PATHS)
    if not config_file:
        return {}
    console.print(f"[dim]Loaded defaults from {config_file}[/dim]")
    return _read_yaml(config_file)


def build_run_config(
    overrides: Mapping,
    config_path: Optional[Path] = None,
    search_paths: Optional[list] = None,
    environ: Optional[Mapping] = None,
) -> RunConfig:
    """
    Merge the config sources and validate.

    Precedence, lowest first: dataclass defaults, defaults file, CP_SEED,
    the --config file, flags. Flags set to None are ignored.

    Raises:
        ValueError: If a source is malformed or the merged config is invalid
    """
    environ = os.environ if environ is None else environ
    data = dict(load_defaults(search_paths))

    seed = environ.get(SEED_ENV)
    if seed is not None and seed.strip():
        data["base_seed"] = _as_int(SEED_ENV, seed.strip())

    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise ValueError(f"Config file not found: {path}")
        data.update(_read_yaml(path))

    data.update({key: value for key, value in overrides.items() if value is not None})
    config = RunConfig.from_mapping(data)
    config.validate()
    return config
