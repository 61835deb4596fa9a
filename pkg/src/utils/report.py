"""Structured check reports"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

try:
    from config.settings import STATUS_FAIL, STATUS_PASS
    from core.algebra import AssumptionSet
except ImportError:
    from src.config.settings import STATUS_FAIL, STATUS_PASS
    from src.core.algebra import AssumptionSet


class Witness(BaseModel):
    """Where a check failed and what was found there"""

    location: str
    expected: str = ""
    actual: str = ""
    note: str = ""


class Report(BaseModel):
    check: str
    status: str = STATUS_PASS
    witnesses: List[Witness] = Field(default_factory=list)
    assumptions: List[str] = Field(default_factory=list)
    counts: Dict[str, int] = Field(default_factory=dict)
    skipped: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    timing: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.status == STATUS_PASS

    def fail(self, location: str, expected: Any = "", actual: Any = "", note: str = "") -> None:
        self.status = STATUS_FAIL
        self.witnesses.append(Witness(location=location, expected=str(expected), actual=str(actual), note=note))

    def count(self, key: str, amount: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + amount

    def skip(self, reason: str) -> None:
        self.skipped.append(reason)

    def assume(self, assumptions: AssumptionSet) -> None:
        self.assumptions = sorted(set(self.assumptions) | set(assumptions.as_strings()))

    def absorb(self, other: "Report", prefix: str = "") -> "Report":
        """Fold a sub-report into this one"""
        if not other.passed:
            self.status = STATUS_FAIL
        for witness in other.witnesses:
            location = f"{prefix}{witness.location}" if prefix else witness.location
            self.witnesses.append(witness.model_copy(update={"location": location}))
        self.assumptions = sorted(set(self.assumptions) | set(other.assumptions))
        for key, value in other.counts.items():
            self.count(f"{prefix}{key}" if prefix else key, value)
        self.skipped.extend(f"{prefix}{s}" if prefix else s for s in other.skipped)
        return self

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
