"""DIMACS CNF reading and writing."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DslError
from ._text import content_lines

__all__ = ["CnfFormula", "parse_dimacs", "print_dimacs"]


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} invalid for {self.num_vars} variables")

    def satisfied_by(self, assignment) -> bool:
        """``assignment[i]`` is the truth value of variable ``i + 1``."""
        return all(any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in c) for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last_line = 1
    for no, col, line in content_lines(text.replace("\r", "")):
        last_line = no
        if line.startswith("c") and (len(line) == 1 or line[1].isspace()):
            continue
        if line.startswith("%"):
            break  # SATLIB end marker
        if line.startswith("p"):
            toks = line.split()
            if header is not None:
                raise DslError("second problem line", no, col)
            if len(toks) != 4 or toks[1] != "cnf" or not toks[2].isdigit() or not toks[3].isdigit():
                raise DslError("expected 'p cnf VARS CLAUSES'", no, col)
            header = (int(toks[2]), int(toks[3]))
            continue
        if header is None:
            raise DslError("clause before 'p cnf' header", no, col)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DslError(f"bad literal {tok!r}", no, col) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise DslError(f"literal {lit} exceeds declared {header[0]} variables", no, col)
            else:
                current.append(lit)
    if header is None:
        raise DslError("missing 'p cnf' header", 1, 1)
    if current:
        raise DslError("last clause is not terminated by 0", last_line, 1)
    if len(clauses) != header[1]:
        raise DslError(f"header declares {header[1]} clauses, body has {len(clauses)}", last_line, 1)
    return CnfFormula(header[0], tuple(clauses))


def print_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines += [" ".join(map(str, c)) + (" 0" if c else "0") for c in formula.clauses]
    return "\n".join(lines) + "\n"
