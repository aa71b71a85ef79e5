"""Sampled-check reports shared by the axiom and contraction checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import Element

MAX_WITNESSES = 25


def jsonable(obj: Any) -> Any:
    """Convert elements, arrays and tuples into plain JSON values."""
    if isinstance(obj, Element):
        return [float(c) for c in obj.coords]
    if isinstance(obj, np.ndarray):
        return [float(c) for c in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


@dataclass
class Violation:
    axiom: str
    witness: dict[str, Any]
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"axiom": self.axiom, "witness": jsonable(self.witness), "detail": self.detail}


@dataclass
class Report:
    """Outcome of a sampled check.

    A clean report means *no violation found at recorded resolution*; it is
    never a proof.  Only the first ``MAX_WITNESSES`` witnesses are stored,
    ``n_violations`` counts all of them.
    """

    name: str
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    n_violations: int = 0
    notes: list[str] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.n_violations == 0

    def add(self, axiom: str, detail: str = "", **witness) -> None:
        self.n_violations += 1
        if len(self.violations) < MAX_WITNESSES:
            self.violations.append(Violation(axiom, witness, detail))

    def axioms_violated(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def merge(self, other: "Report") -> "Report":
        """Combine two partial reports of the same check (associative)."""
        out = Report(self.name, self.checked + other.checked)
        out.violations = (self.violations + other.violations)[:MAX_WITNESSES]
        out.n_violations = self.n_violations + other.n_violations
        out.notes = self.notes + [n for n in other.notes if n not in self.notes]
        out.extra = {**self.extra, **other.extra}
        return out

    @property
    def verdict(self) -> str:
        if self.checked == 0:
            return "no samples"
        if self.ok:
            return "no violation found at recorded resolution"
        return f"{self.n_violations} violation(s)"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "pass": self.ok,
            "verdict": self.verdict,
            "checked": self.checked,
            "n_violations": self.n_violations,
            "violations": [v.to_dict() for v in self.violations],
            "notes": list(self.notes),
            **({"extra": jsonable(self.extra)} if self.extra else {}),
        }
