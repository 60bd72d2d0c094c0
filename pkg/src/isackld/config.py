"""Experiment configuration: JSON parsing with strict keys, defaults, echo.

A config document looks like:

    {
      "scenario": {"tx_power_dbm": 30.0, "mod_order": 16, "seed": 7, ...},
      "constellation_source": {"type": "optimized"},
      "eta1_grid": [0.0, 0.5, 1.0],
      "eta2_grid": [0.0, 0.25, 0.5, 0.75, 1.0],
      "detector": {"p_fa": 1e-5, ...},
      "optimizer": {"restarts": 8, ...},
      "mc": {"n_symbols": 100000, "n_trials": 200},
      "baselines": ["psk", "qam", "apsk"],
      "output_dir": "out",
      "format": "csv"
    }

Every section is optional and falls back to defaults; unknown keys are
rejected everywhere. The fully resolved config is echoed into each output
directory so a run is reproducible from its artifacts alone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .constellation import OptimizerOptions
from .scenario import ScenarioParams
from .simulate import DetectorSpec

SOURCE_TYPES = ("psk", "qam", "apsk", "optimized", "file")
BASELINE_NAMES = ("psk", "qam", "apsk")


def _from_dict_strict(cls, data: dict, where: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown {where} fields: {sorted(unknown)}")
    return cls(**data)


@dataclass
class ConstellationSource:
    """Where the evaluated constellation comes from."""

    type: str = "optimized"
    eta1: float | None = None
    path: str | None = None
    rings: list | None = None

    def __post_init__(self):
        if self.type not in SOURCE_TYPES:
            raise ValueError(f"constellation source must be one of {SOURCE_TYPES}")
        if self.type == "file" and not self.path:
            raise ValueError("file constellation source requires a path")
        if self.eta1 is not None and not 0.0 <= self.eta1 <= 1.0:
            raise ValueError("eta1 must lie in [0, 1]")


@dataclass
class MonteCarloConfig:
    n_symbols: int = 100000
    n_trials: int = 200

    def __post_init__(self):
        if self.n_symbols < 1 or self.n_trials < 1:
            raise ValueError("Monte-Carlo sizes must be >= 1")


@dataclass
class ExperimentConfig:
    """Fully resolved description of one experiment run."""

    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    constellation_source: ConstellationSource = field(default_factory=ConstellationSource)
    eta1_grid: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    eta2_grid: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    mc: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    baselines: list = field(default_factory=list)
    output_dir: str = "out"
    format: str = "csv"

    def __post_init__(self):
        for grid in (self.eta1_grid, self.eta2_grid):
            if any(not 0.0 <= v <= 1.0 for v in grid):
                raise ValueError("grid values must lie in [0, 1]")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        for b in self.baselines:
            if b not in BASELINE_NAMES:
                raise ValueError(f"unknown baseline {b!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = dict(data)
        if "scenario" in kwargs:
            kwargs["scenario"] = ScenarioParams.from_dict(kwargs["scenario"])
        if "constellation_source" in kwargs:
            kwargs["constellation_source"] = _from_dict_strict(
                ConstellationSource, kwargs["constellation_source"], "constellation_source")
        if "detector" in kwargs:
            kwargs["detector"] = _from_dict_strict(DetectorSpec, kwargs["detector"], "detector")
        if "optimizer" in kwargs:
            kwargs["optimizer"] = _from_dict_strict(OptimizerOptions, kwargs["optimizer"], "optimizer")
        if "mc" in kwargs:
            kwargs["mc"] = _from_dict_strict(MonteCarloConfig, kwargs["mc"], "mc")
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        return asdict(self)

    def echo(self, path) -> None:
        """Write the fully resolved config (defaults materialized)."""
        with open(path, "w", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")
