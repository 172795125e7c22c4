"""Versioned report schema shared by the CLI and the experiment scripts."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from . import __version__

SCHEMA_VERSION = 1


def exact_json(x: Any) -> Any:
    """Fractions keep their exact form next to a float; numpy scalars become Python numbers."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator
        return {"fraction": f"{x.numerator}/{x.denominator}", "float": float(x)}
    if hasattr(x, "item") and not isinstance(x, (list, dict)):
        return x.item()
    if isinstance(x, (list, tuple)):
        return [exact_json(v) for v in x]
    if isinstance(x, dict):
        return {str(k): exact_json(v) for k, v in x.items()}
    return x


def _flat(x: Any) -> Any:
    if isinstance(x, Fraction):
        return float(x)
    if hasattr(x, "item"):
        return x.item()
    return x


@dataclass
class Check:
    name: str
    value: Any
    expected: Any = None
    tolerance: Any = 0
    passed: bool = True
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "value": exact_json(self.value),
            "expected": exact_json(self.expected),
            "tolerance": exact_json(self.tolerance),
            "pass": bool(self.passed),
        }
        if self.detail:
            out["detail"] = exact_json(self.detail)
        return out


@dataclass
class Report:
    config: dict
    results: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.results)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.results if not c.passed]

    def add(self, check: Check) -> Check:
        self.results.append(check)
        return check

    def extend(self, checks: Iterable[Check]) -> None:
        self.results.extend(checks)

    def to_json(self) -> dict:
        return {
            "tool_version": __version__,
            "schema_version": SCHEMA_VERSION,
            "config": exact_json(self.config),
            "results": [c.to_json() for c in self.results],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "value", "expected", "tolerance", "pass"])
        for c in self.results:
            w.writerow([c.name, _flat(c.value), _flat(c.expected), _flat(c.tolerance), int(bool(c.passed))])
        return buf.getvalue()

    def write(self, json_path: str | Path | None = None, csv_path: str | Path | None = None) -> None:
        if json_path:
            Path(json_path).write_text(self.dumps() + "\n")
            if csv_path is None:
                csv_path = Path(json_path).with_suffix(".csv")
        if csv_path:
            Path(csv_path).write_text(self.to_csv())


def within(name: str, value, expected, tolerance, relative: bool = False, **detail) -> Check:
    """|value - expected| <= tolerance (times |expected| when relative)."""
    bound = tolerance * abs(expected) if relative else tolerance
    return Check(name, value, expected, tolerance, abs(value - expected) <= bound, detail)


def at_least(name: str, value, bound, **detail) -> Check:
    return Check(name, value, f">= {float(bound):.6g}", 0, value >= bound, detail)


def at_most(name: str, value, bound, **detail) -> Check:
    return Check(name, value, f"<= {float(bound):.6g}", 0, value <= bound, detail)


def equals(name: str, value, expected, **detail) -> Check:
    return Check(name, value, expected, 0, value == expected, detail)
