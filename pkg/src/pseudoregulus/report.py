"""Verification reports: per-check records, verdicts, JSON and text output."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class CheckRecord:
    id: str
    anchor: str
    expected: object
    observed: object
    passed: bool
    ms: float | None = None
    skipped: str | None = None  # reason when a budget stopped the check

    def to_dict(self) -> dict:
        d = {"id": self.id, "anchor": self.anchor, "expected": self.expected,
             "observed": self.observed, "pass": self.passed, "ms": self.ms}
        if self.skipped is not None:
            d["skipped"] = self.skipped
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CheckRecord":
        return cls(d["id"], d["anchor"], d["expected"], d["observed"], d["pass"], d.get("ms"), d.get("skipped"))


@dataclass
class Report:
    suite: str
    scenario: dict  # {p, h, t, n}
    seed: int
    checks: list = dc_field(default_factory=list)

    @property
    def verdict(self) -> str:
        if not self.checks:
            return "vacuous"
        if any(not c.passed and c.skipped is None for c in self.checks):
            return "fail"
        if any(c.skipped is not None for c in self.checks):
            return "budget"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "vacuous": EXIT_FAIL, "budget": EXIT_BUDGET}[self.verdict]

    def to_dict(self) -> dict:
        return {"suite": self.suite, "scenario": self.scenario, "seed": self.seed,
                "checks": [c.to_dict() for c in self.checks], "verdict": self.verdict}

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(d["suite"], d["scenario"], d["seed"], [CheckRecord.from_dict(c) for c in d["checks"]])


def to_json(r: Report) -> str:
    return json.dumps(r.to_dict(), indent=2, sort_keys=True) + "\n"


def _short(x) -> str:
    s = json.dumps(x, sort_keys=True)
    return s if len(s) <= 40 else s[:37] + "..."


def to_text(r: Report) -> str:
    sc = " ".join(f"{k}={r.scenario[k]}" for k in ("p", "h", "t", "n"))
    lines = [f"suite {r.suite}  [{sc}]  seed={r.seed}"]
    w = max([len(c.id) for c in r.checks] + [5])
    lines.append(f"  {'check':<{w}}  {'status':<6}  {'expected':<40}  observed")
    for c in r.checks:
        st = "SKIP" if c.skipped is not None else ("PASS" if c.passed else "FAIL")
        row = f"  {c.id:<{w}}  {st:<6}  {_short(c.expected):<40}  {_short(c.observed)}"
        if c.ms is not None:
            row += f"  ({c.ms:.1f} ms)"
        if c.skipped is not None:
            row += f"  [{c.skipped}]"
        lines.append(row)
    lines.append(f"verdict: {r.verdict}")
    return "\n".join(lines) + "\n"


def emit_report(r: Report, fmt: str = "json", out=None) -> str:
    """Render the report; written to ``out`` when given."""
    if fmt not in ("json", "text"):
        raise ValueError(f"unknown format {fmt!r}")
    text = to_json(r) if fmt == "json" else to_text(r)
    if out is not None:
        Path(out).write_text(text)
    return text


def parse_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))
