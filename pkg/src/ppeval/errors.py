"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PPEvalError(Exception):
    """Base class for all errors raised by ppeval."""


class DomainError(PPEvalError):
    """Bad query against a planning domain (unknown action, wrong state width, ...)."""


class EnumerationCapError(PPEvalError):
    """An operation would need to enumerate more states than its cap allows."""


class PlanValidationError(PPEvalError):
    def __init__(self, report):
        self.report = report
        lines = "; ".join(v.defect for v in report.violations)
        super().__init__(f"plan failed validation: {lines}")


class SolverCapError(PPEvalError):
    """Reachable product space larger than the exact solver is allowed to build."""


class DslError(PPEvalError):
    """Parse or format error; carries a 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", col {column}" if column is not None else "")
            super().__init__(f"{where}: {message}")
        else:
            super().__init__(message)


class SpaceBoundError(PPEvalError):
    """A Turing machine moved its head outside the declared space bound."""
