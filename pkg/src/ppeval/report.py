from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional


@dataclass(frozen=True)
class Violation:
    defect: str
    state: Optional[tuple[int, ...]] = None
    action: Optional[str] = None
    total: Optional[Fraction] = None


@dataclass
class ValidationReport:
    """Collected defects; ``ok`` iff there are none.

    ``sampled_only`` is set when a check could not cover the whole state
    space and fell back to a seeded sample.  ``reachable_only`` is set when
    that sample still contained every state reachable from the initial one.
    """

    violations: list[Violation] = field(default_factory=list)
    sampled_only: bool = False
    reachable_only: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, defect: str, state=None, action=None, total=None) -> None:
        self.violations.append(Violation(defect, state, action, total))

    def __str__(self) -> str:
        head = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        if self.reachable_only:
            head += " (reachable states only)"
        elif self.sampled_only:
            head += " (sampled only)"
        lines = [head]
        for v in self.violations:
            parts = [v.defect]
            if v.action is not None:
                parts.append(f"action={v.action}")
            if v.state is not None:
                parts.append("state=" + "".join(map(str, v.state)))
            if v.total is not None:
                parts.append(f"sum={v.total}")
            lines.append("  " + "  ".join(parts))
        return "\n".join(lines)
