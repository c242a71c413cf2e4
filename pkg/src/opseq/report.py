"""Outcome objects returned by the structural checkers."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    """The first failed law found by a checker.

    ``axiom`` is a short stable name (e.g. ``"d_squared"``, ``"condition_ii"``);
    ``where`` locates the failure (bidegrees, arities, slot, basis tuple).
    """

    axiom: str
    where: tuple = ()
    detail: str = ""

    def __str__(self):
        loc = ", ".join(str(w) for w in self.where)
        text = f"{self.axiom} violated"
        if loc:
            text += f" at {loc}"
        if self.detail:
            text += f": {self.detail}"
        return text


@dataclass(frozen=True)
class Report:
    """Truthy when no violation was found; ``checked`` counts tested instances."""

    violation: Violation | None = None
    checked: int = 0
    notes: tuple = field(default=())

    def __bool__(self):
        return self.violation is None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __str__(self):
        if self.violation is None:
            return f"ok ({self.checked} checks)"
        return str(self.violation)


class CheckFailed(Exception):
    """Raised by ``Report.raise_for`` style helpers when a law fails."""

    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


def first(reports) -> Report:
    """Combine reports lazily: the first failure wins, checks are summed."""
    total = 0
    for rep in reports:
        if not rep:
            return Report(rep.violation, total + rep.checked)
        total += rep.checked
    return Report(None, total)
