"""Bounded plan existence: enumerate candidate plans, evaluate each exactly.

All three searches return the first witness in a fixed canonical order, so
results are reproducible and do not depend on pruning.  Pruning uses the
finite-horizon optimum ``V_h`` (state-dependent action choice with goal
states pinned to 1), which upper-bounds any plan executing at most ``h``
more actions from a state.
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .core import ENUMERATION_CAP, PlanningDomain, State, all_states, parse_rational
from .evaluation import eval_acyclic, eval_looping
from .formula import Formula
from .plans import AcyclicPlan, LoopingPlan, Plan, TotalOrderPlan

__all__ = [
    "SearchBudget",
    "SearchOutcome",
    "optimal_value_bound",
    "exists_total_order",
    "exists_acyclic",
    "exists_looping",
    "goal_reachable",
]

NODE_CAP = 10 ** 7


@dataclass(frozen=True)
class SearchBudget:
    """``horizon`` bounds the sequence length (total order) or step count (controllers)."""

    horizon: int
    threshold: Fraction
    node_cap: int = NODE_CAP
    time_cap: Optional[float] = None  # seconds

    def __post_init__(self):
        object.__setattr__(self, "threshold", parse_rational(self.threshold))
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if not 0 <= self.threshold <= 1:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")


@dataclass
class SearchOutcome:
    found: bool
    witness: Optional[Plan] = None
    value: Optional[Fraction] = None  # witness value, or best value seen if none found
    nodes: int = 0
    exhausted: bool = True


class _Budget:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = None if budget.time_cap is None else time.monotonic() + budget.time_cap

    def tick(self) -> bool:
        """Count one node; False once a cap is hit."""
        self.nodes += 1
        if self.nodes > self.budget.node_cap:
            return False
        return self.deadline is None or self.nodes % 256 or time.monotonic() < self.deadline


def _reachable_within(domain: PlanningDomain, k: int) -> set[State]:
    goal = domain.goal_test
    seen = {domain.initial}
    frontier = [domain.initial]
    for _ in range(k):
        nxt = []
        for s in frontier:
            if goal(s):
                continue
            for a in domain.actions:
                for s2, _ in domain.successors(s, a):
                    if s2 not in seen:
                        seen.add(s2)
                        nxt.append(s2)
        frontier = nxt
    return seen


def _value_levels(domain: PlanningDomain, k: int, states: Optional[Sequence[State]] = None) -> list[dict[State, Fraction]]:
    if states is None:
        states = list(all_states(domain.width)) if domain.width <= ENUMERATION_CAP else _reachable_within(domain, k)
    goal = domain.goal_test
    one = Fraction(1)
    levels = [{s: one if goal(s) else Fraction(0) for s in states}]
    for _ in range(k):
        prev = levels[-1]
        cur = {}
        for s in states:
            if goal(s):
                cur[s] = one
                continue
            # states outside the table are only reached past the horizon; 1 keeps the bound admissible
            cur[s] = max((sum((p * prev.get(s2, one) for s2, p in domain.successors(s, a)), Fraction(0))
                          for a in domain.actions), default=Fraction(0))
        levels.append(cur)
    return levels


def optimal_value_bound(domain: PlanningDomain, k: int, states: Optional[Sequence[State]] = None) -> dict[State, Fraction]:
    """``V_k`` by backward induction over ``states``.

    Defaults to every state when the domain is within the enumeration cap,
    otherwise to the states reachable from s0 in at most ``k`` steps.
    """
    if k < 0:
        raise ValueError("horizon must be non-negative")
    return _value_levels(domain, k, states)[k]


def goal_reachable(domain: PlanningDomain) -> bool:
    """Whether any sequence of actions can reach a goal state from s0."""
    goal = domain.goal_test
    seen = {domain.initial}
    queue = deque(seen)
    while queue:
        s = queue.popleft()
        if goal(s):
            return True
        for a in domain.actions:
            for s2, _ in domain.successors(s, a):
                if s2 not in seen:
                    seen.add(s2)
                    queue.append(s2)
    return False


def _trivially_empty(domain: PlanningDomain, theta: Fraction) -> bool:
    return theta > 0 and not domain.goal_test(domain.initial) and not goal_reachable(domain)


def exists_total_order(domain: PlanningDomain, budget: SearchBudget, prune: bool = True) -> SearchOutcome:
    """Depth-first search over action sequences of length ≤ k in lexicographic order.

    Each node carries the exact state distribution after its prefix.  A
    subtree is cut when ``Σ p(s)·V_{k-d}(s)`` (goal states count 1) is below
    θ and no better than the best value already seen, so on exhaustion
    ``value`` is the exact optimum over all sequences.
    """
    theta, k = budget.threshold, budget.horizon
    meter = _Budget(budget)
    if _trivially_empty(domain, theta):
        return SearchOutcome(False, value=Fraction(0), nodes=0)
    levels = _value_levels(domain, k) if prune else None
    goal = domain.goal_test
    actions = sorted(domain.actions)
    best = Fraction(-1)
    capped = False

    def dfs(prefix: list[str], dist: dict[State, Fraction], reached: Fraction):
        nonlocal best, capped
        if not meter.tick():
            capped = True
            return None
        best = max(best, reached)
        if reached >= theta:
            return tuple(prefix), reached
        depth = len(prefix)
        if depth == k or not dist:
            return None
        if levels is not None:
            table = levels[k - depth]
            bound = reached + sum((p * table.get(s, Fraction(1)) for s, p in dist.items()), Fraction(0))
            if bound < theta and bound <= best:
                return None
        for a in actions:
            nxt: dict[State, Fraction] = defaultdict(Fraction)
            gained = Fraction(0)
            for s, p in dist.items():
                for s2, r in domain.successors(s, a):
                    if goal(s2):
                        gained += p * r
                    else:
                        nxt[s2] += p * r
            prefix.append(a)
            hit = dfs(prefix, nxt, reached + gained)
            prefix.pop()
            if hit is not None or capped:
                return hit
        return None

    start = domain.initial
    if goal(start):
        witness = dfs([], {}, Fraction(1))
    else:
        witness = dfs([], {start: Fraction(1)}, Fraction(0))
    if witness is not None:
        return SearchOutcome(True, TotalOrderPlan(witness[0]), witness[1], meter.nodes, True)
    return SearchOutcome(False, None, max(best, Fraction(0)), meter.nodes, not capped)


def _controllers(domain: PlanningDomain, size: int, labels: Sequence[str],
                 observations: Sequence[tuple[Formula, str]], looping: bool) -> Iterator[Plan]:
    """Canonical enumeration: π lexicographic over sorted actions, then δ
    by (step, label) with "undefined" before q1 < q2 < ... .

    Acyclic controllers only jump forward (qi → qj with j > i); every DAG
    over the steps is isomorphic to one of these.
    """
    ids = [f"q{i}" for i in range(1, size + 1)]
    cls = LoopingPlan if looping else AcyclicPlan
    slots = [(i, lab) for i in range(size) for lab in labels]
    choices = []
    for i, _ in slots:
        targets = ids if looping else ids[i + 1:]
        choices.append([None] + targets)
    for pi in itertools.product(sorted(domain.actions), repeat=size):
        steps = tuple(zip(ids, pi))
        for delta in itertools.product(*choices):
            edges = tuple((ids[i], lab, t) for (i, lab), t in zip(slots, delta) if t is not None)
            yield cls(steps, ids[0], tuple(labels), tuple(observations), edges)


def _exists_controller(domain: PlanningDomain, budget: SearchBudget, labels: Sequence[str],
                       observations: Sequence[tuple[Formula, str]], looping: bool) -> SearchOutcome:
    theta = budget.threshold
    meter = _Budget(budget)
    start_goal = domain.goal_test(domain.initial)
    cls = LoopingPlan if looping else AcyclicPlan
    empty = cls((), None, tuple(labels), tuple(observations), ())
    meter.tick()
    if start_goal or theta == 0:
        return SearchOutcome(True, empty, Fraction(1) if start_goal else Fraction(0), meter.nodes)
    if _trivially_empty(domain, theta):
        return SearchOutcome(False, value=Fraction(0), nodes=meter.nodes)
    if not looping:
        # an acyclic plan with k steps executes at most k actions
        bound = optimal_value_bound(domain, budget.horizon, _reachable_within(domain, budget.horizon))
        if bound[domain.initial] < theta:
            return SearchOutcome(False, value=None, nodes=meter.nodes)
    evaluate = eval_looping if looping else eval_acyclic
    best = Fraction(0)
    for size in range(1, budget.horizon + 1):
        for plan in _controllers(domain, size, labels, observations, looping):
            if not meter.tick():
                return SearchOutcome(False, None, best, meter.nodes, False)
            value = evaluate(domain, plan, check=False).value
            if value >= theta:
                return SearchOutcome(True, plan, value, meter.nodes)
            best = max(best, value)
    return SearchOutcome(False, None, best, meter.nodes)


def exists_acyclic(domain: PlanningDomain, budget: SearchBudget, labels: Sequence[str],
                   observations: Sequence[tuple[Formula, str]]) -> SearchOutcome:
    """Acyclic controllers with at most ``budget.horizon`` steps and the given ω."""
    return _exists_controller(domain, budget, labels, observations, looping=False)


def exists_looping(domain: PlanningDomain, budget: SearchBudget, labels: Sequence[str],
                   observations: Sequence[tuple[Formula, str]]) -> SearchOutcome:
    """Controllers with at most ``budget.horizon`` steps, cycles allowed, and the given ω."""
    return _exists_controller(domain, budget, labels, observations, looping=True)
