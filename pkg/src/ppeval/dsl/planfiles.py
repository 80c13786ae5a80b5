"""Plan files (.ppl).

The first line names the class; the body depends on it::

    total-order: dig-moat dig-moat erect-castle

    acyclic                     # or: looping
    labels moat no-moat
    obs moat -> moat            # first matching condition wins
    obs true -> no-moat
    start q1
    step q1 dig-moat
    edge q1 no-moat -> q2

    partial-order
    node D1 dig-moat
    before D1 D2

Only syntax is checked here; structure (cycles, dangling targets, totality
of ``obs``) is left to :func:`ppeval.plans.validate_plan`.
"""

from __future__ import annotations

import os
from pathlib import Path

from ..errors import DslError
from ..formula import format_formula, parse_formula
from ..plans import AcyclicPlan, LoopingPlan, PartialOrderPlan, Plan, TotalOrderPlan, _Controller
from ._text import content_lines, expect_name, split_keyword

__all__ = ["parse_plan", "print_plan", "load_plan", "PLAN_CLASSES"]

PLAN_CLASSES = ("total-order", "acyclic", "looping", "partial-order")


def parse_plan(text: str) -> Plan:
    lines = list(content_lines(text))
    if not lines:
        raise DslError("empty plan file", 1, 1)
    no, col, header = lines[0]
    kw, rest = split_keyword(header)
    cls = kw.rstrip(":")
    if cls not in PLAN_CLASSES:
        raise DslError(f"unknown plan class {cls!r}; expected one of {', '.join(PLAN_CLASSES)}", no, col)
    body = lines[1:]
    if cls == "total-order":
        toks = rest.split()
        for bno, bcol, line in body:
            toks.extend(line.split())
        for t in toks:
            expect_name(t, "action name", no, col)
        return TotalOrderPlan(tuple(toks))
    if rest:
        raise DslError(f"unexpected text after {cls!r} header", no, col + len(kw) + 1)
    if cls == "partial-order":
        return _parse_partial(body)
    return _parse_controller(body, AcyclicPlan if cls == "acyclic" else LoopingPlan)


def _parse_partial(body) -> PartialOrderPlan:
    nodes, before = [], []
    for no, col, line in body:
        kw, rest = split_keyword(line)
        toks = rest.split()
        if kw == "node" and len(toks) == 2:
            nodes.append((expect_name(toks[0], "node id", no, col), expect_name(toks[1], "action name", no, col)))
        elif kw == "before" and len(toks) == 2:
            before.append((toks[0], toks[1]))
        else:
            raise DslError("expected 'node ID ACTION' or 'before ID ID'", no, col)
    return PartialOrderPlan(tuple(nodes), tuple(before))


def _parse_controller(body, cls):
    steps, labels, obs, edges = [], [], [], []
    start = None
    for no, col, line in body:
        kw, rest = split_keyword(line)
        rest_col = col + len(line) - len(rest)
        toks = rest.split()
        if kw == "labels":
            labels.extend(expect_name(t, "label", no, rest_col) for t in toks)
        elif kw == "obs":
            cond, arrow, lab = rest.rpartition("->")
            if not arrow or not lab.strip():
                raise DslError("expected 'obs FORMULA -> LABEL'", no, col)
            obs.append((parse_formula(cond, no, rest_col), expect_name(lab.strip(), "label", no, rest_col)))
        elif kw == "step" and len(toks) == 2:
            steps.append((expect_name(toks[0], "step id", no, rest_col), expect_name(toks[1], "action name", no, rest_col)))
        elif kw == "edge":
            parts = rest.replace("->", " -> ").split()
            if len(parts) != 4 or parts[2] != "->":
                raise DslError("expected 'edge STEP LABEL -> STEP'", no, col)
            edges.append((parts[0], parts[1], parts[3]))
        elif kw == "start" and len(toks) == 1:
            if start is not None:
                raise DslError("second 'start' line", no, col)
            start = toks[0]
        else:
            raise DslError(f"unrecognised plan line starting with {kw!r}", no, col)
    if start is None and steps:
        start = steps[0][0]
    return cls(tuple(steps), start, tuple(labels), tuple(obs), tuple(edges))


def print_plan(plan: Plan) -> str:
    if isinstance(plan, TotalOrderPlan):
        return ("total-order: " + " ".join(plan.steps)).rstrip() + "\n"
    if isinstance(plan, PartialOrderPlan):
        lines = ["partial-order"]
        lines += [f"node {n} {a}" for n, a in plan.nodes]
        lines += [f"before {a} {b}" for a, b in plan.precedence]
        return "\n".join(lines) + "\n"
    if isinstance(plan, _Controller):
        lines = ["acyclic" if isinstance(plan, AcyclicPlan) else "looping"]
        if plan.labels:
            lines.append("labels " + " ".join(plan.labels))
        lines += [f"obs {format_formula(c)} -> {lab}" for c, lab in plan.observations]
        if plan.start is not None:
            lines.append(f"start {plan.start}")
        lines += [f"step {q} {a}" for q, a in plan.steps]
        lines += [f"edge {q} {lab} -> {q2}" for q, lab, q2 in plan.transitions]
        return "\n".join(lines) + "\n"
    raise TypeError(f"not a plan: {type(plan).__name__}")


def load_plan(path: os.PathLike | str) -> Plan:
    return parse_plan(Path(path).read_text())
