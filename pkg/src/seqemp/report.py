"""Test reports shared by the threshold and changepoint tests."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = "1.0"


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


@dataclass
class TestReport:
    """Outcome of one hypothesis test.

    ``decisions[name]`` is True for rejection and equals
    ``statistics[name] > critical_values[name]``.
    """

    __test__ = False  # not a pytest class

    test: str
    statistics: dict
    critical_values: dict
    p_values: dict
    n: int
    level: float
    sigma2: float = None
    locator: dict = field(default_factory=dict)
    seed: object = None
    config: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, p in self.p_values.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p-value {k}={p} outside [0, 1]")

    @property
    def decisions(self) -> dict:
        return {k: bool(self.statistics[k] > self.critical_values[k]) for k in self.critical_values}

    @property
    def rejected(self) -> bool:
        return any(self.decisions.values())

    def to_dict(self):
        return jsonable(
            {
                "schema_version": SCHEMA_VERSION,
                "test": self.test,
                "n": self.n,
                "level": self.level,
                "statistics": self.statistics,
                "critical_values": self.critical_values,
                "p_values": self.p_values,
                "decisions": {k: ("reject" if v else "retain") for k, v in self.decisions.items()},
                "sigma2": self.sigma2,
                "locator": self.locator,
                "seed": self.seed,
                "config": self.config,
                "warnings": self.warnings,
                "diagnostics": self.diagnostics,
            }
        )
