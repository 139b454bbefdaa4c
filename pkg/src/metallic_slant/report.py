"""Verification reports: named residual checks with tolerances, serializable to JSON."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

SIGNIFICANT_DIGITS = 12


def _round(x):
    """Round a float to 12 significant digits for stable serialization."""
    x = float(x)
    if not math.isfinite(x) or x == 0.0:
        return x
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(obj)
    return obj


@dataclass
class Check:
    """One verified identity.

    ``identity`` is a short human-readable statement of what was checked;
    ``residual`` is the maximum violation seen over ``samples`` evaluations.
    """

    name: str
    identity: str
    residual: float
    tolerance: float
    samples: int = 1

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)

    def to_dict(self):
        return {
            "name": self.name,
            "identity": self.identity,
            "max_residual": _round(self.residual),
            "tolerance": _round(self.tolerance),
            "passed": self.passed,
            "samples": int(self.samples),
        }


@dataclass
class VerificationReport:
    """Aggregated checks plus free-form observations that never affect ``passed``."""

    scenario: str
    checks: list[Check] = field(default_factory=list)
    observations: dict = field(default_factory=dict)
    seed: int | None = None
    version: str = ""
    timestamp: str | None = None

    def add(self, name, identity, residual, tolerance, samples=1) -> Check:
        c = Check(name, identity, float(residual), float(tolerance), int(samples))
        self.checks.append(c)
        return c

    def observe(self, key, value):
        self.observations[key] = value

    def extend(self, other: "VerificationReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.identity, c.residual, c.tolerance, c.samples))
        for k, v in other.observations.items():
            self.observations[prefix + k] = v

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name):
        return any(c.name == name for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self, timestamp=True):
        d = {
            "schema": "metallic-slant/report/v1",
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "observations": _jsonable(self.observations),
            "environment": {"seed": self.seed, "version": self.version},
        }
        if timestamp:
            d["timestamp"] = self.timestamp or datetime.now(timezone.utc).isoformat()
        return d

    def to_json(self, timestamp=True, indent=2) -> str:
        return json.dumps(self.to_dict(timestamp=timestamp), indent=indent, sort_keys=False)

    def summary_lines(self):
        lines = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            lines.append(f"[{flag}] {c.name:<40s} residual={c.residual:.3e} tol={c.tolerance:.1e} n={c.samples}")
        for k, v in self.observations.items():
            lines.append(f"[INFO] {k} = {_jsonable(v)}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return lines
