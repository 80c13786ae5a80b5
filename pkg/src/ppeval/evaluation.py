"""Exact plan evaluation.

Execution semantics shared by every plan class: a goal state is absorbing
(execution stops the moment one is entered, and mass that reached it is
never propagated again); a controller also stops when δ is undefined for
the current step and the label of the state just entered.  If the initial
state already satisfies the goal, every plan has value 1.

Looping plans are evaluated as an absorbing Markov chain on the reachable
(domain state, plan step) product space.  The chain is split into strongly
connected components and solved component by component, downstream first;
components that cannot reach a goal are pinned to 0, which makes every
remaining block ``I - T`` nonsingular.
"""

from __future__ import annotations

import enum
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence, Union

import networkx as nx

from .core import PlanningDomain, State, parse_rational
from .errors import PlanValidationError, SolverCapError
from .linalg import solve
from .plans import (
    AcyclicPlan,
    LoopingPlan,
    PartialOrderPlan,
    Plan,
    TotalOrderPlan,
    _Controller,
    extension_orders,
    validate_plan,
)

__all__ = [
    "Interpretation",
    "EvaluationResult",
    "DIVERGENT",
    "SOLVER_CAP",
    "EXTENSION_CAP",
    "eval_total_order",
    "eval_acyclic",
    "eval_looping",
    "eval_partial",
    "eval_truncated",
    "evaluate",
    "expected_action_count",
    "meets_threshold",
    "simulate",
    "format_value",
]

SOLVER_CAP = 1 << 16
EXTENSION_CAP = 10**6
DIVERGENT = "divergent"


class Interpretation(str, enum.Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"
    AVERAGE = "average"


@dataclass(frozen=True)
class EvaluationResult:
    value: Fraction
    witness: Optional[TotalOrderPlan] = None
    product_states: int = 0
    pivots: int = 0
    extensions: int = 0

    def __str__(self) -> str:
        return format_value(self.value)


def format_value(value: Fraction) -> str:
    """``p/q`` followed by a 6-place decimal rounded half-to-even."""
    scaled = round(value * 10**6)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    exact = f"{value.numerator}/{value.denominator}"
    return f"{exact} {sign}{scaled // 10**6}.{scaled % 10**6:06d}"


def _require_valid(plan: Plan, domain: PlanningDomain) -> None:
    report = validate_plan(plan, domain)
    if not report.ok:
        raise PlanValidationError(report)


def meets_threshold(value: Fraction, theta: Union[Fraction, int, str]) -> bool:
    """Exact ``value >= theta``; both must lie in [0, 1]."""
    theta = parse_rational(theta)
    value = Fraction(value)
    for name, x in (("value", value), ("threshold", theta)):
        if not 0 <= x <= 1:
            raise ValueError(f"{name} {x} outside [0, 1]")
    return value >= theta


def eval_total_order(domain: PlanningDomain, plan: TotalOrderPlan, check: bool = True) -> EvaluationResult:
    if check:
        _require_valid(plan, domain)
    if domain.goal_test(domain.initial):
        return EvaluationResult(Fraction(1))
    goal = Fraction(0)
    dist: dict[State, Fraction] = {domain.initial: Fraction(1)}
    visited = 1
    for a in plan.steps:
        nxt: dict[State, Fraction] = defaultdict(Fraction)
        for s, p in dist.items():
            for s2, r in domain.successors(s, a):
                if domain.goal_test(s2):
                    goal += p * r
                else:
                    nxt[s2] += p * r
        dist = nxt
        visited += len(dist)
        if not dist:
            break
    return EvaluationResult(goal, product_states=visited)


def _topo_steps(plan: _Controller) -> list[str]:
    g = nx.DiGraph()
    g.add_nodes_from(q for q, _ in plan.steps)
    g.add_edges_from((q, q2) for q, _, q2 in plan.transitions)
    return list(nx.topological_sort(g))


def _acyclic_masses(domain: PlanningDomain, plan: _Controller):
    """Propagate probability mass through the steps in topological order.

    Returns (goal mass, {step: {state: mass arriving there}}).
    """
    omega = plan.observer(domain.variables)
    act, delta = plan.action_of, plan.delta
    at: dict[str, dict[State, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    at[plan.start][domain.initial] = Fraction(1)
    goal = Fraction(0)
    for q in _topo_steps(plan):
        here = at.get(q)
        if not here:
            continue
        a = act[q]
        for s, p in here.items():
            for s2, r in domain.successors(s, a):
                if domain.goal_test(s2):
                    goal += p * r
                    continue
                q2 = delta.get((q, omega(s2)))
                if q2 is not None:
                    at[q2][s2] += p * r
    return goal, at


def eval_acyclic(domain: PlanningDomain, plan: AcyclicPlan, check: bool = True) -> EvaluationResult:
    if check:
        _require_valid(plan, domain)
    if domain.goal_test(domain.initial):
        return EvaluationResult(Fraction(1))
    if plan.is_empty:
        return EvaluationResult(Fraction(0))
    goal, at = _acyclic_masses(domain, plan)
    return EvaluationResult(goal, product_states=sum(len(v) for v in at.values()))


@dataclass
class _Chain:
    nodes: list[tuple[State, str]]
    rows: list[dict[int, Fraction]]
    goal: list[Fraction]
    graph: nx.DiGraph = field(repr=False, default=None)

    def components(self) -> tuple[nx.DiGraph, list[int]]:
        """Condensation and its components in topological order (sources first)."""
        if self.graph is None:
            g = nx.DiGraph()
            g.add_nodes_from(range(len(self.nodes)))
            for i, row in enumerate(self.rows):
                g.add_edges_from((i, j) for j in row)
            self.graph = g
        cond = nx.condensation(self.graph)
        order = list(nx.lexicographical_topological_sort(cond, key=lambda c: min(cond.nodes[c]["members"])))
        return cond, order


def _build_chain(domain: PlanningDomain, plan: _Controller, cap: int) -> _Chain:
    omega = plan.observer(domain.variables)
    act, delta = plan.action_of, plan.delta
    start = (domain.initial, plan.start)
    index = {start: 0}
    nodes = [start]
    rows: list[dict[int, Fraction]] = []
    goal: list[Fraction] = []
    i = 0
    while i < len(nodes):
        s, q = nodes[i]
        row: dict[int, Fraction] = {}
        g = Fraction(0)
        for s2, p in domain.successors(s, act[q]):
            if domain.goal_test(s2):
                g += p
                continue
            q2 = delta.get((q, omega(s2)))
            if q2 is None:
                continue
            key = (s2, q2)
            j = index.get(key)
            if j is None:
                if len(nodes) >= cap:
                    raise SolverCapError(f"reachable product space exceeds {cap} states")
                j = index[key] = len(nodes)
                nodes.append(key)
            row[j] = row.get(j, Fraction(0)) + p
        rows.append(row)
        goal.append(g)
        i += 1
    return _Chain(nodes, rows, goal)


def eval_looping(domain: PlanningDomain, plan: Union[LoopingPlan, AcyclicPlan],
                 cap: int = SOLVER_CAP, check: bool = True) -> EvaluationResult:
    """Goal-reach probability of a (possibly cyclic) controller, solved exactly."""
    if check:
        _require_valid(plan, domain)
    if domain.goal_test(domain.initial):
        return EvaluationResult(Fraction(1))
    if plan.is_empty:
        return EvaluationResult(Fraction(0))
    chain = _build_chain(domain, plan, cap)
    cond, order = chain.components()
    x = [Fraction(0)] * len(chain.nodes)
    reaches: dict[int, bool] = {}
    pivots = 0
    for c in reversed(order):
        members = sorted(cond.nodes[c]["members"])
        reaches[c] = any(chain.goal[i] for i in members) or any(reaches[d] for d in cond.successors(c))
        if not reaches[c]:
            continue
        inside = set(members)
        if len(members) == 1 and members[0] not in chain.rows[members[0]]:
            i = members[0]
            x[i] = chain.goal[i] + sum((p * x[j] for j, p in chain.rows[i].items()), Fraction(0))
            continue
        pos = {i: k for k, i in enumerate(members)}
        n = len(members)
        a = [[Fraction(0)] * n for _ in range(n)]
        b = []
        for i in members:
            r = pos[i]
            a[r][r] += 1
            rhs = chain.goal[i]
            for j, p in chain.rows[i].items():
                if j in inside:
                    a[r][pos[j]] -= p
                else:
                    rhs += p * x[j]
            b.append(rhs)
        for i, v in zip(members, solve(a, b)):
            x[i] = v
        pivots += n
    return EvaluationResult(x[0], product_states=len(chain.nodes), pivots=pivots)


def eval_truncated(domain: PlanningDomain, plan: Union[_Controller, TotalOrderPlan], horizon: int) -> Fraction:
    """Probability of reaching a goal within ``horizon`` executed actions."""
    if isinstance(plan, TotalOrderPlan):
        return eval_total_order(domain, TotalOrderPlan(plan.steps[:horizon])).value
    _require_valid(plan, domain)
    if domain.goal_test(domain.initial):
        return Fraction(1)
    if plan.is_empty:
        return Fraction(0)
    omega = plan.observer(domain.variables)
    act, delta = plan.action_of, plan.delta
    dist: dict[tuple[State, str], Fraction] = {(domain.initial, plan.start): Fraction(1)}
    goal = Fraction(0)
    for _ in range(horizon):
        nxt: dict[tuple[State, str], Fraction] = defaultdict(Fraction)
        for (s, q), p in dist.items():
            for s2, r in domain.successors(s, act[q]):
                if domain.goal_test(s2):
                    goal += p * r
                    continue
                q2 = delta.get((q, omega(s2)))
                if q2 is not None:
                    nxt[(s2, q2)] += p * r
        dist = nxt
        if not dist:
            break
    return goal


def eval_partial(domain: PlanningDomain, plan: PartialOrderPlan,
                 interp: Union[Interpretation, str] = Interpretation.AVERAGE,
                 cap: int = EXTENSION_CAP, check: bool = True) -> EvaluationResult:
    """Best / worst / mean value over all linear extensions.

    The mean counts every extension, so distinct extensions that induce the
    same action sequence each contribute.  Ties for best/worst go to the
    extension enumerated first.
    """
    interp = Interpretation(interp)
    if check:
        _require_valid(plan, domain)
    act = plan.action_of
    memo: dict[tuple[str, ...], Fraction] = {}
    count = 0
    total = Fraction(0)
    best: Optional[tuple[Fraction, tuple[str, ...]]] = None
    for order in extension_orders(plan):
        count += 1
        if count > cap:
            raise SolverCapError(f"more than {cap} linear extensions")
        seq = tuple(act[n] for n in order)
        v = memo.get(seq)
        if v is None:
            v = memo[seq] = eval_total_order(domain, TotalOrderPlan(seq), check=False).value
        total += v
        if best is None:
            best = (v, seq)
        elif interp is Interpretation.OPTIMISTIC and v > best[0]:
            best = (v, seq)
        elif interp is Interpretation.PESSIMISTIC and v < best[0]:
            best = (v, seq)
    if interp is Interpretation.AVERAGE:
        return EvaluationResult(total / count, extensions=count)
    return EvaluationResult(best[0], witness=TotalOrderPlan(best[1]), extensions=count)


def evaluate(domain: PlanningDomain, plan: Plan,
             interp: Union[Interpretation, str, None] = None) -> EvaluationResult:
    if isinstance(plan, TotalOrderPlan):
        return eval_total_order(domain, plan)
    if isinstance(plan, AcyclicPlan):
        return eval_acyclic(domain, plan)
    if isinstance(plan, LoopingPlan):
        return eval_looping(domain, plan)
    if isinstance(plan, PartialOrderPlan):
        return eval_partial(domain, plan, interp or Interpretation.AVERAGE)
    raise TypeError(f"not a plan: {type(plan).__name__}")


def expected_action_count(domain: PlanningDomain, plan: Union[TotalOrderPlan, AcyclicPlan, LoopingPlan],
                          action: str, cap: int = SOLVER_CAP) -> Union[Fraction, str]:
    """Expected number of times ``action`` executes before execution stops.

    Returns :data:`DIVERGENT` when, with positive probability, execution
    enters a goal-free recurrent class that keeps executing ``action``.
    """
    _require_valid(plan, domain)
    domain.check_action(action)
    if domain.goal_test(domain.initial):
        return Fraction(0)
    if isinstance(plan, TotalOrderPlan):
        alive: dict[State, Fraction] = {domain.initial: Fraction(1)}
        count = Fraction(0)
        for a in plan.steps:
            if a == action:
                count += sum(alive.values(), Fraction(0))
            nxt: dict[State, Fraction] = defaultdict(Fraction)
            for s, p in alive.items():
                for s2, r in domain.successors(s, a):
                    if not domain.goal_test(s2):
                        nxt[s2] += p * r
            alive = nxt
        return count
    if plan.is_empty:
        return Fraction(0)
    if isinstance(plan, AcyclicPlan):
        _, at = _acyclic_masses(domain, plan)
        return sum((sum(at[q].values(), Fraction(0)) for q in at if plan.action_of[q] == action), Fraction(0))
    return _looping_visits(domain, plan, action, cap)


def _looping_visits(domain, plan, action, cap):
    chain = _build_chain(domain, plan, cap)
    cond, order = chain.components()
    act = plan.action_of
    inflow = [Fraction(0)] * len(chain.nodes)
    inflow[0] = Fraction(1)
    total = Fraction(0)
    for c in order:
        members = sorted(cond.nodes[c]["members"])
        inside = set(members)
        closed = all(
            not chain.goal[i] and set(chain.rows[i]) <= inside and sum(chain.rows[i].values()) == 1
            for i in members
        )
        if closed:
            # recurrent class: every member is revisited forever once entered
            if any(inflow[i] for i in members) and any(act[chain.nodes[i][1]] == action for i in members):
                return DIVERGENT
            continue
        pos = {i: k for k, i in enumerate(members)}
        n = len(members)
        a = [[Fraction(0)] * n for _ in range(n)]
        for i in members:
            a[pos[i]][pos[i]] += 1
            for j, p in chain.rows[i].items():
                if j in inside:
                    a[pos[j]][pos[i]] -= p
        sol = solve(a, [inflow[i] for i in members])
        for i, v in zip(members, sol):
            if act[chain.nodes[i][1]] == action:
                total += v
            for j, p in chain.rows[i].items():
                if j not in inside:
                    inflow[j] += v * p
    return total


def _sample(rng: random.Random, dist: Sequence[tuple[State, Fraction]]) -> Optional[State]:
    """Exact draw: one uniform integer over the common denominator."""
    scale = lcm(*(p.denominator for _, p in dist))
    k = rng.randrange(scale)
    acc = 0
    for s, p in dist:
        acc += p.numerator * (scale // p.denominator)
        if k < acc:
            return s
    return None  # mass below 1: treated as a dead end


def simulate(domain: PlanningDomain, plan: Plan, runs: int, seed: int = 0,
             max_steps: int = 10_000) -> int:
    """Number of successful executions out of ``runs`` seeded random rollouts.

    Partially ordered plans draw one linear extension uniformly per run,
    matching the average interpretation.
    """
    rng = random.Random(seed)
    goal = domain.goal_test
    extensions = None
    if isinstance(plan, PartialOrderPlan):
        act = plan.action_of
        extensions = [tuple(act[n] for n in o) for o in extension_orders(plan)]
    omega = plan.observer(domain.variables) if isinstance(plan, _Controller) else None
    wins = 0
    for _ in range(runs):
        s = domain.initial
        if goal(s):
            wins += 1
            continue
        if isinstance(plan, _Controller):
            q = plan.start
            for _ in range(max_steps):
                if q is None:
                    break
                s = _sample(rng, domain.successors(s, plan.action_of[q]))
                if s is None:
                    break
                if goal(s):
                    wins += 1
                    break
                q = plan.delta.get((q, omega(s)))
        else:
            steps = plan.steps if extensions is None else extensions[rng.randrange(len(extensions))]
            for a in steps:
                s = _sample(rng, domain.successors(s, a))
                if s is None:
                    break
                if goal(s):
                    wins += 1
                    break
    return wins
