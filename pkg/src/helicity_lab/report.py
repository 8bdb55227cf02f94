"""Run reports: thresholded checks, informational values, arrays and tables.

A report serialises to a JSON document (key/value pairs plus arrays) and its
tables to CSV.  Every numeric entry carries a provenance tag.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

PROVENANCES = ("closed-form", "enumerated", "quadrature")
_COMPARE = {
    "<=": lambda v, t: v <= t,
    ">=": lambda v, t: v >= t,
    "==": lambda v, t: v == t,
}


def _plain(x):
    """JSON-safe scalar: Fractions as strings, non-finite floats as strings."""
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, complex):
        return {"re": _plain(x.real), "im": _plain(x.imag)}
    if isinstance(x, int):
        return int(x)
    x = float(x)
    return x if math.isfinite(x) else repr(x)


@dataclass
class Check:
    suite: str
    name: str
    value: float
    threshold: float
    comparator: str
    provenance: str
    note: str = ""

    def __post_init__(self):
        if self.comparator not in _COMPARE:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def passed(self) -> bool:
        v = self.value
        if isinstance(v, float) and math.isnan(v):
            return False
        return bool(_COMPARE[self.comparator](v, self.threshold))

    def as_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "name": self.name,
            "value": _plain(self.value),
            "comparator": self.comparator,
            "threshold": _plain(self.threshold),
            "passed": self.passed,
            "provenance": self.provenance,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Table:
    columns: list[str]
    rows: list[list]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_plain(x) for x in row])
        return buf.getvalue()


@dataclass
class RunReport:
    command: str
    params: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    values: list[dict] = field(default_factory=list)
    arrays: dict = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    wall_time_ms: int = 0

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, suite: str, name: str, value, threshold, comparator: str = "<=",
              provenance: str = "enumerated", note: str = "") -> Check:
        c = Check(suite, name, value, threshold, comparator, provenance, note)
        self.checks.append(c)
        return c

    def value(self, suite: str, name: str, value, provenance: str) -> None:
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        self.values.append({"suite": suite, "name": name, "value": _plain(value), "provenance": provenance})

    def array(self, name: str, values, provenance: str) -> None:
        self.arrays[name] = {"provenance": provenance, "values": [_plain(v) for v in values]}

    def merge(self, other: "RunReport") -> None:
        self.checks.extend(other.checks)
        self.values.extend(other.values)
        self.arrays.update(other.arrays)
        self.tables.update(other.tables)
        self.notes.extend(other.notes)

    def checks_table(self) -> Table:
        cols = ["suite", "name", "value", "comparator", "threshold", "passed", "provenance"]
        rows = [[c.suite, c.name, c.value, c.comparator, c.threshold, c.passed, c.provenance] for c in self.checks]
        return Table(cols, rows)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": {k: _plain(v) for k, v in self.params.items()},
            "overall_pass": self.overall_pass,
            "checks": [c.as_dict() for c in self.checks],
            "values": self.values,
            "arrays": self.arrays,
            "tables": {k: {"columns": t.columns, "rows": [[_plain(x) for x in r] for r in t.rows]}
                       for k, t in self.tables.items()},
            "notes": self.notes,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_text(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"
