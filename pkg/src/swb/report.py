"""Structured pass/fail records for identity checks and suite runs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from swb.poly import Poly, RationalFunction
from swb.symbolic import SymbolicNumber

PASS = "pass"
FAIL = "fail"
SKIPPED_BUDGET = "skipped-budget"


def render_value(x) -> str:
    """Exact textual rendering: rationals as a/b, never decimals."""
    if isinstance(x, (int, Fraction, Poly, RationalFunction, SymbolicNumber)):
        return str(x)
    if isinstance(x, (tuple, list)):
        return "[" + ", ".join(render_value(v) for v in x) + "]"
    if x is None:
        return ""
    return str(x)


@dataclass
class CaseResult:
    kind: str
    inputs: dict
    status: str
    lhs: str = ""
    rhs: str = ""
    note: str = ""

    @classmethod
    def check(cls, kind, inputs, lhs, rhs, note=""):
        status = PASS if lhs == rhs else FAIL
        return cls(kind, dict(inputs), status, render_value(lhs), render_value(rhs), note)

    @classmethod
    def of(cls, kind, inputs, passed, lhs="", rhs="", note=""):
        return cls(
            kind,
            dict(inputs),
            PASS if passed else FAIL,
            render_value(lhs),
            render_value(rhs),
            note,
        )

    @classmethod
    def skipped(cls, kind, inputs, note):
        return cls(kind, dict(inputs), SKIPPED_BUDGET, note=note)

    @property
    def passed(self):
        return self.status == PASS


@dataclass
class VerificationReport:
    suite: str
    config: dict = field(default_factory=dict)
    cases: list = field(default_factory=list)

    def add(self, case: CaseResult):
        self.cases.append(case)

    def extend(self, cases):
        self.cases.extend(cases)

    @property
    def summary(self):
        out = {"pass": 0, "fail": 0, "skipped-budget": 0}
        for c in self.cases:
            out[c.status] = out.get(c.status, 0) + 1
        return out

    @property
    def failed(self):
        return self.summary["fail"] > 0

    def to_json(self) -> str:
        payload = {
            "schema": "swb/1",
            "suite": self.suite,
            "config": {k: render_value(v) for k, v in self.config.items()},
            "cases": [
                {
                    "kind": c.kind,
                    "inputs": {k: render_value(v) for k, v in c.inputs.items()},
                    "status": c.status,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "note": c.note,
                }
                for c in self.cases
            ],
            "summary": self.summary,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}"]
        for k, v in self.config.items():
            lines.append(f"  {k} = {render_value(v)}")
        for c in self.cases:
            inputs = ", ".join(f"{k}={render_value(v)}" for k, v in c.inputs.items())
            line = f"[{c.status:>14}] {c.kind}({inputs})"
            if c.status == FAIL:
                line += f"  lhs={c.lhs}  rhs={c.rhs}"
            if c.note:
                line += f"  # {c.note}"
            lines.append(line)
        s = self.summary
        lines.append(
            f"summary: {s['pass']} pass, {s['fail']} fail, "
            f"{s['skipped-budget']} skipped-budget"
        )
        return "\n".join(lines)
