"""Domain files (.ppd).

::

    domain sandcastle
    vars moat castle
    init !moat !castle
    goal castle
    action dig-moat
      case true:
        1/2: {}
        1/2: {moat := 1}
    action erect-castle circuit erect-castle.ppc

An action is either a PSO decision list (``case`` blocks) or a reference
to a circuit file; one domain uses one kind throughout.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from ..circuit import TransitionCircuit
from ..core import CircuitBackend, FlatBackend, Outcome, PlanningDomain, PsoBackend, PsoCase, PsoOperator, parse_rational
from ..errors import DomainError, DslError
from ..formula import TRUE, format_formula, formula_vars, parse_formula
from ._text import content_lines, expect_name, split_keyword

__all__ = ["parse_domain", "print_domain", "load_domain", "write_domain"]

_OUTCOME_RE = re.compile(r"^(?P<p>[^:{}]+?)\s*:\s*\{(?P<body>[^{}]*)\}$")
_BITS = {"0": 0, "1": 1, "false": 0, "true": 1}

CircuitLoader = Callable[[str], TransitionCircuit]


class _PsoDraft:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.cases: list[tuple[int, object, list[Outcome]]] = []


def parse_domain(text: str, circuit_loader: Optional[CircuitLoader] = None) -> PlanningDomain:
    name = None
    variables: Optional[tuple[str, ...]] = None
    init_line = None
    goal = None
    pso: list[_PsoDraft] = []
    circuits: list[tuple[str, TransitionCircuit]] = []
    seen_actions: dict[str, int] = {}

    def need_vars(line, col):
        if variables is None:
            raise DslError("'vars' must come before this line", line, col)
        return variables

    for no, col, line in content_lines(text):
        kw, rest = split_keyword(line)
        rest_col = col + len(kw) + (len(line) - len(kw) - len(rest))
        if kw == "domain":
            if name is not None:
                raise DslError("second 'domain' header", no, col)
            name = expect_name(rest, "domain name", no, rest_col)
        elif kw == "vars":
            if variables is not None:
                raise DslError("second 'vars' line", no, col)
            toks = rest.split()
            for t in toks:
                expect_name(t, "variable name", no, rest_col)
            if len(set(toks)) != len(toks):
                raise DslError("duplicate variable name", no, rest_col)
            if {"true", "false"} & set(toks):
                raise DslError("'true'/'false' cannot be variable names", no, rest_col)
            variables = tuple(toks)
        elif kw == "init":
            init_line = (no, rest_col, rest)
        elif kw == "goal":
            goal = (no, parse_formula(rest, no, rest_col))
        elif kw == "action":
            parts = rest.split()
            if not parts:
                raise DslError("action needs a name", no, col)
            aname = expect_name(parts[0], "action name", no, rest_col)
            if aname in seen_actions:
                raise DslError(f"duplicate action {aname!r} (first declared on line {seen_actions[aname]})", no, rest_col)
            seen_actions[aname] = no
            if len(parts) == 1:
                if circuits:
                    raise DslError("cannot mix PSO and circuit actions in one domain", no, col)
                pso.append(_PsoDraft(aname, no))
            elif len(parts) == 3 and parts[1] == "circuit":
                if pso:
                    raise DslError("cannot mix PSO and circuit actions in one domain", no, col)
                if circuit_loader is None:
                    raise DslError("circuit action but no circuit loader available", no, col)
                circuits.append((aname, circuit_loader(parts[2])))
            else:
                raise DslError("expected 'action NAME' or 'action NAME circuit FILE'", no, col)
        elif kw == "case":
            if not pso:
                raise DslError("'case' outside a PSO action", no, col)
            if not rest.endswith(":"):
                raise DslError("case condition must end with ':'", no, col + len(line))
            cond = parse_formula(rest[:-1], no, rest_col)
            missing = formula_vars(cond) - set(need_vars(no, col))
            if missing:
                raise DslError(f"undeclared variable {sorted(missing)[0]!r}", no, rest_col)
            pso[-1].cases.append((no, cond, []))
        else:
            m = _OUTCOME_RE.match(line)
            if m is None:
                raise DslError(f"unrecognised line starting with {kw!r}", no, col)
            if not pso or not pso[-1].cases:
                raise DslError("outcome outside a case", no, col)
            try:
                p = parse_rational(m.group("p"))
            except ValueError as exc:
                raise DslError(str(exc), no, col) from None
            if not 0 <= p <= 1:
                raise DslError(f"probability {p} outside [0, 1]", no, col)
            effect = _parse_effect(m.group("body"), need_vars(no, col), no, col + m.start("body"))
            pso[-1].cases[-1][2].append(Outcome(p, effect))

    if name is None:
        raise DslError("missing 'domain NAME' header", 1, 1)
    if variables is None:
        raise DslError("missing 'vars' line", 1, 1)
    if goal is None:
        raise DslError("missing 'goal' line", 1, 1)
    missing = formula_vars(goal[1]) - set(variables)
    if missing:
        raise DslError(f"goal mentions undeclared variable {sorted(missing)[0]!r}", goal[0], 1)
    initial = _parse_init(init_line, variables)

    if circuits:
        backend = CircuitBackend(tuple(circuits))
    else:
        ops = []
        for draft in pso:
            if not draft.cases:
                raise DslError(f"action {draft.name!r} has no cases", draft.line, 1)
            cases = []
            for cno, cond, outs in draft.cases:
                total = sum((o.probability for o in outs), Fraction(0))
                if total != 1:
                    raise DslError(f"outcome probabilities of action {draft.name!r} sum to {total}, not 1", cno, 1)
                cases.append(PsoCase(cond, tuple(outs)))
            if cases[-1].condition != TRUE:
                raise DslError(f"last case of action {draft.name!r} must be 'case true:'", draft.cases[-1][0], 1)
            ops.append(PsoOperator(draft.name, tuple(cases)))
        backend = PsoBackend(tuple(ops))
    try:
        return PlanningDomain(name, variables, initial, goal[1], backend)
    except DomainError as exc:
        raise DslError(str(exc)) from None


def _parse_effect(body: str, variables, line: int, col: int) -> tuple[tuple[str, int], ...]:
    body = body.strip()
    if not body:
        return ()
    out = []
    seen = set()
    for item in body.split(","):
        lhs, sep, rhs = item.partition(":=")
        v, b = lhs.strip(), rhs.strip()
        if not sep or v not in variables or b not in _BITS:
            raise DslError(f"bad effect {item.strip()!r}; expected 'var := 0|1' over declared vars", line, col)
        if v in seen:
            raise DslError(f"variable {v!r} assigned twice in one effect", line, col)
        seen.add(v)
        out.append((v, _BITS[b]))
    return tuple(out)


def _parse_init(init_line, variables) -> tuple[int, ...]:
    bits = dict.fromkeys(variables, 0)
    if init_line is None:
        return tuple(bits.values())
    no, col, rest = init_line
    for tok in rest.split():
        neg = tok.startswith("!")
        v = tok[1:] if neg else tok
        if v not in bits:
            raise DslError(f"init mentions undeclared variable {v!r}", no, col)
        bits[v] = 0 if neg else 1
    return tuple(bits.values())


def _format_effect(effect) -> str:
    return "{" + ", ".join(f"{v} := {b}" for v, b in effect) + "}"


def print_domain(domain: PlanningDomain, circuit_files: Optional[dict[str, str]] = None) -> str:
    """Render ``domain``; circuit actions reference ``circuit_files[action]``
    (default ``<circuit name>.ppc``)."""
    lines = [f"domain {domain.name}", "vars " + " ".join(domain.variables)]
    lits = [v if b else f"!{v}" for v, b in zip(domain.variables, domain.initial)]
    lines.append(("init " + " ".join(lits)).rstrip())
    lines.append(f"goal {format_formula(domain.goal)}")
    backend = domain.backend
    if isinstance(backend, PsoBackend):
        for op in backend.operators:
            lines.append(f"action {op.name}")
            for case in op.cases:
                lines.append(f"  case {format_formula(case.condition)}:")
                for o in case.outcomes:
                    lines.append(f"    {o.probability}: {_format_effect(o.effect)}")
    elif isinstance(backend, CircuitBackend):
        files = circuit_files or {}
        for aname, c in backend.circuits:
            lines.append(f"action {aname} circuit {files.get(aname, c.name + '.ppc')}")
    elif isinstance(backend, FlatBackend):
        raise DslError("flat-table domains have no text form")
    return "\n".join(lines) + "\n"


def load_domain(path: os.PathLike | str) -> PlanningDomain:
    """Read a .ppd file, resolving circuit references relative to its directory."""
    from .netlist import load_circuit

    path = Path(path)
    return parse_domain(path.read_text(), lambda ref: load_circuit(path.parent / ref))


def write_domain(domain: PlanningDomain, directory: os.PathLike | str, stem: Optional[str] = None) -> list[Path]:
    """Write ``<stem>.ppd`` plus one ``.ppc`` per circuit action; returns the paths written."""
    from .netlist import print_circuit

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or domain.name
    written = []
    files = {}
    if isinstance(domain.backend, CircuitBackend):
        for aname, c in domain.backend.circuits:
            fname = f"{stem}.{aname}.ppc"
            (directory / fname).write_text(print_circuit(c))
            written.append(directory / fname)
            files[aname] = fname
    target = directory / f"{stem}.ppd"
    target.write_text(print_domain(domain, files))
    return [target] + written
