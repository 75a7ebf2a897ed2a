"""Structured run reports shared by scenarios and the acceptance suite."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class Check:
    name: str
    status: str
    details: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"name": self.name, "status": self.status, "details": self.details}


def check(name: str, ok: bool, details: str = "") -> Check:
    return Check(name, PASS if ok else FAIL, details)


@dataclass
class RunReport:
    scenario: str
    params: dict[str, Any]
    seed: int
    traceability: str = ""
    checks: list[Check] = field(default_factory=list)
    elapsed_ms: float = 0.0
    timings_ms: dict[str, float] = field(default_factory=dict)  # per check, when measured
    output: str | None = None  # command output printed instead of the check table

    @property
    def failed(self) -> bool:
        return any(c.status == FAIL for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self, include_time: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "scenario": self.scenario,
            "traceability": self.traceability,
            "params": self.params,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.output is not None:
            out["output"] = self.output
        if include_time:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
            if self.timings_ms:
                out["timings_ms"] = {k: round(v, 3) for k, v in self.timings_ms.items()}
        return out

    def to_json(self, include_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_time), indent=2, default=str)

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario}"]
        if self.traceability:
            lines.append(f"row: {self.traceability}")
        lines.append("params: " + ", ".join(f"{k}={v}" for k, v in self.params.items()))
        lines.append(f"seed: {self.seed}")
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            lines.append(f"  [{c.status.upper():>12}] {c.name:<{width}}  {c.details}")
        lines.append(f"elapsed_ms: {self.elapsed_ms:.1f}")
        return "\n".join(lines) + "\n"
