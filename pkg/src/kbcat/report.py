"""Check lists with pass/fail/skip status, serialized as deterministic JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped-boundary"
UNDETERMINED = "undetermined"
STATUSES = (PASS, FAIL, SKIPPED, UNDETERMINED)


def jsonable(x: Any) -> Any:
    """Convert field elements, tuples and numpy scalars to JSON-safe values."""
    from fractions import Fraction

    import numpy as np

    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    return str(x)


@dataclass
class CheckResult:
    name: str
    status: str
    expected: Any = None
    computed: Any = None
    citation: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "expected": jsonable(self.expected),
            "computed": jsonable(self.computed),
            "citation": self.citation,
        }


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, name: str, ok: bool | None, expected=None, computed=None, citation: str = "", status: str | None = None):
        if status is None:
            status = UNDETERMINED if ok is None else (PASS if ok else FAIL)
        if status not in STATUSES:
            raise ValueError(f"bad status {status!r}")
        self.checks.append(CheckResult(name, status, expected, computed, citation))
        return self.checks[-1]

    def skip(self, name: str, citation: str = "", expected=None):
        return self.add(name, None, expected=expected, citation=citation, status=SKIPPED)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(CheckResult(prefix + c.name, c.status, c.expected, c.computed, c.citation))
        for k, v in other.extra.items():
            self.extra[prefix + k if prefix else k] = v

    @property
    def summary(self) -> dict:
        counts = {"pass": 0, "fail": 0, "skipped": 0, "undetermined": 0}
        for c in self.checks:
            if c.status == PASS:
                counts["pass"] += 1
            elif c.status == FAIL:
                counts["fail"] += 1
            elif c.status == SKIPPED:
                counts["skipped"] += 1
            else:
                counts["undetermined"] += 1
        return counts

    @property
    def ok(self) -> bool:
        return self.summary["fail"] == 0

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == FAIL]

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "inputs": jsonable(self.inputs),
            "checks": [c.to_json() for c in self.checks],
            "summary": self.summary,
        }
        if self.extra:
            out["results"] = jsonable(self.extra)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"
