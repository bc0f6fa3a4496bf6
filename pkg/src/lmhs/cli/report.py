"""Suite reports: one JSON format, with a plain-text table rendered from it."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ..hpnum import BigReal


def render_value(x):
    """JSON-safe, deterministic rendering of the numeric types used in the package."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, BigReal):
        return {"value": mpmath.nstr(x.value, 20), "err": mpmath.nstr(x.err, 3)}
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 20)
    if isinstance(x, dict):
        return {str(k): render_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [render_value(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


@dataclass
class Check:
    id: str
    anchor: str
    expected: object
    computed: object
    residual: object = None
    passed: bool = True
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "anchor": self.anchor,
            "expected": render_value(self.expected),
            "computed": render_value(self.computed),
            "residual": render_value(self.residual),
            "pass": bool(self.passed),
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)  # recorded numbers that are not asserted
    wall_time: float = 0.0  # kept out of the JSON so reports are byte-stable

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        out = {
            "suite": self.suite,
            "environment": render_value(self.environment),
            "checks": [c.to_json() for c in sorted(self.checks, key=lambda c: c.id)],
            "pass": self.passed,
        }
        if self.data:
            out["data"] = render_value(self.data)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        doc = self.to_json()
        rows = [(c["id"], "PASS" if c["pass"] else "FAIL", _short(c["residual"]), c["anchor"]) for c in doc["checks"]]
        widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(("check", "status", "residual"))]
        lines = [f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} ({self.wall_time:.1f} s)"]
        for r in rows:
            lines.append(f"  {r[0]:<{widths[0]}}  {r[1]:<{widths[1]}}  {r[2]:<{widths[2]}}  {r[3]}")
        for k, v in sorted(doc.get("data", {}).items()):
            text = _short(v)
            lines.append(f"  data {k}: {text if len(text) <= 100 else text[:97] + '...'}")
        return "\n".join(lines) + "\n"


def _short(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, dict) and "value" in v:
        return v["value"]
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def combine(reports: list) -> dict:
    return {"reports": [r.to_json() for r in reports], "pass": all(r.passed for r in reports)}
