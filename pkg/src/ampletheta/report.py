"""Diagnostics report records and their JSON / text renderings.

Schema (version 1)::

    {"version": 1, "suite": str, "verdict": str, "backend": str,
     "config": {...},
     "checks": [{"name", "verdict", "mandatory", "tolerance", "paper_ref",
                 "residuals": [{"name", "value", "tolerance", "relation", "passed"}],
                 "witnesses": [{"kind", "tolerance", "data"}],
                 "info": {...}}],
     "wall_time_s": {"value", "tolerance": null, "relation": "measured"}}

Every measured number sits in a record next to the tolerance it is judged
against; ``info`` holds counts and tables that are not gated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SCHEMA_VERSION = 1
DIGITS = 12

PASS, FAIL, INCONCLUSIVE, INFO = "PASS", "FAIL", "INCONCLUSIVE", "INFO"
VERDICTS = (PASS, FAIL, INCONCLUSIVE, INFO)

_RELATIONS = {"<": lambda v, t: v < t, ">": lambda v, t: v > t,
              "<=": lambda v, t: v <= t, ">=": lambda v, t: v >= t,
              "==": lambda v, t: v == t}


def _round(x: float) -> float | None:
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{DIGITS}g}")


def clean(obj: Any) -> Any:
    """JSON-safe copy: floats to 12 significant digits, non-finite to null,
    complex numbers to ``[re, im]``."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, float):
        return _round(obj)
    if isinstance(obj, complex):
        return [_round(obj.real), _round(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return clean(obj.item())
    if hasattr(obj, "tolist"):
        return clean(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Residual:
    name: str
    value: float
    tolerance: float | None
    relation: str = "<"

    @property
    def passed(self) -> bool | None:
        if self.tolerance is None:
            return None
        if self.value is None or not math.isfinite(self.value):
            return False
        return bool(_RELATIONS[self.relation](self.value, self.tolerance))

    def to_json(self) -> dict:
        return {"name": self.name, "value": clean(self.value), "tolerance": clean(self.tolerance),
                "relation": self.relation, "passed": self.passed}


@dataclass
class Check:
    name: str
    verdict: str
    tolerance: dict[str, float]
    paper_ref: str
    residuals: list[Residual] = field(default_factory=list)
    witnesses: list[dict] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)
    mandatory: bool = True

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "mandatory": self.mandatory,
                "tolerance": clean(self.tolerance), "paper_ref": self.paper_ref,
                "residuals": [r.to_json() for r in self.residuals],
                "witnesses": clean(self.witnesses), "info": clean(self.info)}


@dataclass
class DiagnosticsReport:
    suite: str
    config: dict[str, Any]
    checks: list[Check] = field(default_factory=list)
    wall_time_s: float = 0.0
    backend: str = ""

    @property
    def verdict(self) -> str:
        """PASS iff every mandatory check passed (an empty report passes)."""
        return PASS if all(c.verdict == PASS for c in self.checks if c.mandatory) else FAIL

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict == PASS else 1

    def to_json(self) -> dict:
        return {"version": SCHEMA_VERSION, "suite": self.suite, "verdict": self.verdict,
                "backend": self.backend, "config": clean(self.config),
                "checks": [c.to_json() for c in self.checks],
                "wall_time_s": {"value": _round(self.wall_time_s), "tolerance": None,
                                "relation": "measured"}}

    def verdicts(self) -> list[tuple[str, str]]:
        return [(c.name, c.verdict) for c in self.checks]

    def to_text(self) -> str:
        lines = [f"suite {self.suite}: {self.verdict}  ({len(self.checks)} checks, "
                 f"{self.wall_time_s:.2f} s, backend {self.backend or '?'})"]
        for c in self.checks:
            tag = "" if c.mandatory else " (informational)"
            lines.append(f"  [{c.verdict}] {c.name}{tag}")
            for r in c.residuals:
                mark = {True: "ok", False: "violated", None: "-"}[r.passed]
                tol = "" if r.tolerance is None else f" {r.relation} {r.tolerance:.3g}"
                val = "nan" if r.value is None else f"{r.value:.6g}"
                lines.append(f"      {r.name} = {val}{tol}  {mark}")
            if c.witnesses:
                lines.append(f"      {len(c.witnesses)} witness(es) recorded")
            if "error" in c.info:
                lines.append(f"      error: {c.info['error']}")
        return "\n".join(lines) + "\n"


def emit_report(report: DiagnosticsReport, fmt: str = "json", path: str | Path | None = None
                ) -> str:
    """Render ``report``; write it to ``path`` when given.  Returns the text."""
    if fmt == "json":
        text = json.dumps(report.to_json(), indent=2, allow_nan=False) + "\n"
    elif fmt == "text":
        text = report.to_text()
    else:
        raise ValueError(f"format must be json or text, got {fmt!r}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
