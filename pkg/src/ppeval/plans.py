"""Plan classes: totally ordered, acyclic, looping and partially ordered.

Acyclic and looping plans are finite-state controllers ⟨Q, q0, Σ, δ, π, ω⟩.
ω is an ordered list of (condition, label) pairs read with first-match
semantics over the state just entered; the last condition must be ``true``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Callable, Iterator, Optional, Sequence, Union

import networkx as nx

from .formula import TRUE, Formula, compile_formula, formula_vars
from .report import ValidationReport

if TYPE_CHECKING:
    from .core import PlanningDomain

__all__ = [
    "TotalOrderPlan",
    "AcyclicPlan",
    "LoopingPlan",
    "PartialOrderPlan",
    "Plan",
    "validate_plan",
    "linear_extensions",
    "extension_orders",
    "chain_acyclic",
    "chain_partial",
    "as_looping",
]


@dataclass(frozen=True)
class TotalOrderPlan:
    steps: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class _Controller:
    steps: tuple[tuple[str, str], ...]  # (plan step id, action), declaration order
    start: Optional[str]
    labels: tuple[str, ...]
    observations: tuple[tuple[Formula, str], ...]
    transitions: tuple[tuple[str, str, str], ...]  # (step, label, next step)

    @cached_property
    def action_of(self) -> dict[str, str]:
        return dict(self.steps)

    @cached_property
    def delta(self) -> dict[tuple[str, str], str]:
        return {(q, lab): q2 for q, lab, q2 in self.transitions}

    def observer(self, variables: Sequence[str]) -> Callable[[tuple[int, ...]], Optional[str]]:
        tests = [(compile_formula(cond, variables), lab) for cond, lab in self.observations]

        def omega(s):
            for test, lab in tests:
                if test(s):
                    return lab
            return None

        return omega

    @property
    def is_empty(self) -> bool:
        return not self.steps


class AcyclicPlan(_Controller):
    """δ must be cycle free; no step executes more than once."""


class LoopingPlan(_Controller):
    """Same shape as :class:`AcyclicPlan` with cycles allowed in δ."""


@dataclass(frozen=True)
class PartialOrderPlan:
    nodes: tuple[tuple[str, str], ...]  # (node id, action)
    precedence: tuple[tuple[str, str], ...]  # (earlier, later)

    @cached_property
    def action_of(self) -> dict[str, str]:
        return dict(self.nodes)


Plan = Union[TotalOrderPlan, AcyclicPlan, LoopingPlan, PartialOrderPlan]


def _check_actions(actions: Sequence[tuple[str, str]], domain, report: ValidationReport, what: str) -> None:
    if domain is None:
        return
    known = set(domain.actions)
    for ident, a in actions:
        if a not in known:
            report.add(f"{what} {ident!r} uses unknown action {a!r}", action=a)


def validate_plan(plan: Plan, domain: "Optional[PlanningDomain]" = None) -> ValidationReport:
    """Structural checks; action names are checked only when ``domain`` is given."""
    report = ValidationReport()
    if isinstance(plan, TotalOrderPlan):
        _check_actions([(str(i), a) for i, a in enumerate(plan.steps)], domain, report, "step")
    elif isinstance(plan, PartialOrderPlan):
        _validate_partial(plan, domain, report)
    elif isinstance(plan, _Controller):
        _validate_controller(plan, domain, report)
    else:
        report.add(f"not a plan: {type(plan).__name__}")
    return report


def _validate_partial(plan: PartialOrderPlan, domain, report: ValidationReport) -> None:
    ids = [n for n, _ in plan.nodes]
    seen = set()
    for n in ids:
        if n in seen:
            report.add(f"node {n!r} declared twice")
        seen.add(n)
    _check_actions(plan.nodes, domain, report, "node")
    g = nx.DiGraph()
    g.add_nodes_from(ids)
    for a, b in plan.precedence:
        for x in (a, b):
            if x not in seen:
                report.add(f"ordering constraint mentions undeclared node {x!r}")
        g.add_edge(a, b)
    if not nx.is_directed_acyclic_graph(g):
        cycle = nx.find_cycle(g)
        report.add("ordering constraints contain a cycle: " + " -> ".join(e[0] for e in cycle) + f" -> {cycle[0][0]}")


def _validate_controller(plan: _Controller, domain, report: ValidationReport) -> None:
    ids = [q for q, _ in plan.steps]
    qset = set(ids)
    if len(qset) != len(ids):
        report.add("plan step declared twice")
    _check_actions(plan.steps, domain, report, "step")
    if plan.steps and plan.start not in qset:
        report.add(f"start step {plan.start!r} is not a declared step")
    if not plan.steps and plan.start is not None:
        report.add(f"start step {plan.start!r} is not a declared step")
    labels = set(plan.labels)
    if len(labels) != len(plan.labels):
        report.add("label declared twice")
    for cond, lab in plan.observations:
        if lab not in labels:
            report.add(f"observation maps to undeclared label {lab!r}")
        if domain is not None:
            missing = formula_vars(cond) - set(domain.variables)
            if missing:
                report.add(f"observation condition mentions undeclared variable {sorted(missing)[0]!r}")
    if plan.steps and (not plan.observations or plan.observations[-1][0] != TRUE):
        report.add("observation map is not total: last condition must be 'true'")
    seen_pairs = set()
    g = nx.DiGraph()
    g.add_nodes_from(ids)
    for q, lab, q2 in plan.transitions:
        if (q, lab) in seen_pairs:
            report.add(f"transition from {q!r} on {lab!r} defined twice")
        seen_pairs.add((q, lab))
        if q not in qset:
            report.add(f"transition from undeclared step {q!r}")
        if q2 not in qset:
            report.add(f"transition from {q!r} on {lab!r} targets undeclared step {q2!r}")
        if lab not in labels:
            report.add(f"transition from {q!r} uses undeclared label {lab!r}")
        g.add_edge(q, q2)
    if isinstance(plan, AcyclicPlan) and not nx.is_directed_acyclic_graph(g):
        cycle = nx.find_cycle(g)
        report.add("acyclic plan has a cycle: " + " -> ".join(e[0] for e in cycle) + f" -> {cycle[0][0]}")


def extension_orders(plan: PartialOrderPlan) -> Iterator[tuple[str, ...]]:
    """Every linear extension as a tuple of node ids.

    Backtracks over the currently minimal nodes in ascending id order, so
    the sequence is lexicographic in node ids and identical across calls.
    """
    report = ValidationReport()
    _validate_partial(plan, None, report)
    if not report.ok:
        raise ValueError(str(report))
    ids = sorted(n for n, _ in plan.nodes)
    succ: dict[str, list[str]] = {n: [] for n in ids}
    indeg = {n: 0 for n in ids}
    for a, b in set(plan.precedence):
        succ[a].append(b)
        indeg[b] += 1
    order: list[str] = []
    placed: set[str] = set()
    k = len(ids)

    def rec():
        if len(order) == k:
            yield tuple(order)
            return
        for n in ids:
            if n in placed or indeg[n]:
                continue
            placed.add(n)
            order.append(n)
            for m in succ[n]:
                indeg[m] -= 1
            yield from rec()
            for m in succ[n]:
                indeg[m] += 1
            order.pop()
            placed.discard(n)

    yield from rec()


def linear_extensions(plan: PartialOrderPlan) -> Iterator[TotalOrderPlan]:
    act = plan.action_of
    for order in extension_orders(plan):
        yield TotalOrderPlan(tuple(act[n] for n in order))


def chain_partial(plan: TotalOrderPlan) -> PartialOrderPlan:
    ids = [f"n{i:04d}" for i in range(len(plan.steps))]
    return PartialOrderPlan(tuple(zip(ids, plan.steps)), tuple(zip(ids, ids[1:])))


def chain_acyclic(plan: TotalOrderPlan, label: str = "any") -> AcyclicPlan:
    """The one-label controller that runs ``plan`` step by step."""
    ids = [f"q{i + 1}" for i in range(len(plan.steps))]
    return AcyclicPlan(
        steps=tuple(zip(ids, plan.steps)),
        start=ids[0] if ids else None,
        labels=(label,),
        observations=((TRUE, label),),
        transitions=tuple((q, label, q2) for q, q2 in zip(ids, ids[1:])),
    )


def as_looping(plan: _Controller) -> LoopingPlan:
    return LoopingPlan(plan.steps, plan.start, plan.labels, plan.observations, plan.transitions)
