"""Planning domains ⟨S, s0, A, t, G⟩ over boolean state variables.

States are tuples of 0/1 ints, one entry per declared variable in
declaration order (entry 0 = first variable).  Probabilities are
:class:`fractions.Fraction` throughout; no float enters an evaluation path.

Three interchangeable backends supply t(s, a, s'):

* :class:`FlatBackend` -- explicit successor rows per (state, action)
* :class:`PsoBackend` -- probabilistic STRIPS-style operators
* :class:`CircuitBackend` -- one :class:`~ppeval.circuit.TransitionCircuit` per action
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from . import circuit as _circuit
from .circuit import TransitionCircuit
from .errors import DomainError, EnumerationCapError
from .formula import Formula, compile_formula, formula_vars
from .report import ValidationReport

__all__ = [
    "State",
    "ENUMERATION_CAP",
    "Outcome",
    "PsoCase",
    "PsoOperator",
    "FlatBackend",
    "PsoBackend",
    "CircuitBackend",
    "PlanningDomain",
    "transition_prob",
    "successor_distribution",
    "is_goal",
    "validate_domain",
    "all_states",
    "state_from_index",
    "state_index",
    "parse_rational",
]

State = tuple[int, ...]
Rational = Fraction

ENUMERATION_CAP = 20
CIRCUIT_ROW_LIMIT = 24  # widest circuit whose rows validate_domain will still enumerate
CIRCUIT_EXHAUSTIVE_CAP = 14  # exhaustive circuit validation costs about 4**width gate evaluations
REACHABLE_CAP = 1 << 16
VALIDATION_SAMPLE = 256
VALIDATION_SEED = 0


def state_from_index(k: int, width: int) -> State:
    return tuple((k >> i) & 1 for i in range(width))


def state_index(s: Sequence[int]) -> int:
    k = 0
    for i, b in enumerate(s):
        if b:
            k |= 1 << i
    return k


def all_states(width: int) -> Iterator[State]:
    for k in range(1 << width):
        yield state_from_index(k, width)


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Exact value from ``"p/q"``, an integer, or a finite decimal string."""
    if isinstance(text, float):
        raise TypeError("binary floats are not accepted as exact probabilities")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = text.strip()
    if not s or any(c in s for c in "eE_ ") or s.lower() in ("nan", "inf", "infinity"):
        raise ValueError(f"not an exact rational: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


@dataclass(frozen=True)
class Outcome:
    probability: Fraction
    effect: tuple[tuple[str, int], ...]  # partial assignment; unmentioned variables persist


@dataclass(frozen=True)
class PsoCase:
    condition: Formula
    outcomes: tuple[Outcome, ...]


@dataclass(frozen=True)
class PsoOperator:
    """Decision list of guarded outcome distributions; first matching case fires."""

    name: str
    cases: tuple[PsoCase, ...]


class _Backend:
    kind: str

    @property
    def actions(self) -> tuple[str, ...]:
        raise NotImplementedError

    def prob(self, domain: "PlanningDomain", s: State, a: str, s2: State) -> Fraction:
        raise NotImplementedError

    def successors(self, domain: "PlanningDomain", s: State, a: str, cap: int) -> list[tuple[State, Fraction]]:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class FlatBackend(_Backend):
    """Explicit table: ``rows[action][state]`` is a tuple of (successor, probability)."""

    rows: Mapping[str, Mapping[State, tuple[tuple[State, Fraction], ...]]]
    kind = "flat"

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(self.rows)

    def _row(self, s: State, a: str):
        try:
            return self.rows[a][s]
        except KeyError:
            raise DomainError(f"flat table has no row for action {a!r} in state {s}") from None

    def prob(self, domain, s, a, s2):
        return sum((p for t, p in self._row(s, a) if t == s2), Fraction(0))

    def successors(self, domain, s, a, cap):
        merged: dict[State, Fraction] = {}
        for t, p in self._row(s, a):
            merged[t] = merged.get(t, Fraction(0)) + p
        return [(t, p) for t, p in merged.items() if p]


@dataclass(frozen=True)
class PsoBackend(_Backend):
    operators: tuple[PsoOperator, ...]
    kind = "pso"

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(op.name for op in self.operators)

    @cached_property
    def _by_name(self) -> dict[str, PsoOperator]:
        return {op.name: op for op in self.operators}

    def _compiled(self, domain: "PlanningDomain"):
        cache = domain._cache.setdefault("pso", {})
        if not cache:
            idx = {v: i for i, v in enumerate(domain.variables)}
            for op in self.operators:
                cases = []
                for case in op.cases:
                    test = compile_formula(case.condition, domain.variables)
                    outs = [(o.probability, tuple((idx[v], b) for v, b in o.effect)) for o in case.outcomes]
                    cases.append((test, outs))
                cache[op.name] = cases
        return cache

    def successors(self, domain, s, a, cap):
        for test, outs in self._compiled(domain)[a]:
            if test(s):
                merged: dict[State, Fraction] = {}
                for p, effect in outs:
                    t = list(s)
                    for i, b in effect:
                        t[i] = b
                    t = tuple(t)
                    merged[t] = merged.get(t, Fraction(0)) + p
                return [(t, p) for t, p in merged.items() if p]
        return []  # no case fired: only possible for unvalidated operator lists

    def prob(self, domain, s, a, s2):
        for t, p in self.successors(domain, s, a, ENUMERATION_CAP):
            if t == s2:
                return p
        return Fraction(0)


@dataclass(frozen=True)
class CircuitBackend(_Backend):
    """One transition circuit per action, in declaration order."""

    circuits: tuple[tuple[str, TransitionCircuit], ...]
    kind = "circuit"

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.circuits)

    @cached_property
    def _by_name(self) -> dict[str, TransitionCircuit]:
        return dict(self.circuits)

    def prob(self, domain, s, a, s2):
        return _circuit.eval_circuit(self._by_name[a], s, s2)

    def successors(self, domain, s, a, cap):
        width = len(domain.variables)
        return [(state_from_index(k, width), p)
                for k, p in _circuit.successor_table(self._by_name[a], s, cap)]


Backend = Union[FlatBackend, PsoBackend, CircuitBackend]


@dataclass(frozen=True)
class PlanningDomain:
    name: str
    variables: tuple[str, ...]
    initial: State
    goal: Formula
    backend: Backend
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(self.initial) != len(self.variables):
            raise DomainError(
                f"initial state has width {len(self.initial)}, domain declares {len(self.variables)} variables")
        if len(set(self.variables)) != len(self.variables):
            raise DomainError("duplicate variable name")
        acts = self.backend.actions
        if len(set(acts)) != len(acts):
            dup = next(a for a in acts if acts.count(a) > 1)
            raise DomainError(f"duplicate action {dup!r}")
        try:
            compile_formula(self.goal, self.variables)
        except KeyError as exc:
            raise DomainError(f"goal mentions undeclared variable {exc.args[0]!r}") from None
        declared = set(self.variables)
        if isinstance(self.backend, PsoBackend):
            for op in self.backend.operators:
                for case in op.cases:
                    bad = formula_vars(case.condition) - declared
                    bad |= {v for o in case.outcomes for v, _ in o.effect} - declared
                    if bad:
                        raise DomainError(f"action {op.name!r} mentions undeclared variable {sorted(bad)[0]!r}")
        elif isinstance(self.backend, CircuitBackend):
            for name, c in self.backend.circuits:
                if c.before_width != self.width or c.after_width != self.width:
                    raise DomainError(
                        f"circuit for {name!r} has widths {c.before_width}/{c.after_width}, "
                        f"domain has {self.width} variables")

    @property
    def actions(self) -> tuple[str, ...]:
        return self.backend.actions

    @property
    def width(self) -> int:
        return len(self.variables)

    @cached_property
    def goal_test(self) -> Callable[[State], bool]:
        test = self._cache.get("goal")
        if test is None:
            test = self._cache["goal"] = compile_formula(self.goal, self.variables)
        return test

    def check_state(self, s: Sequence[int], what: str = "state") -> None:
        if len(s) != len(self.variables):
            raise DomainError(f"{what} has width {len(s)}, domain has {len(self.variables)} variables")

    def check_action(self, a: str) -> None:
        if a not in self.backend.actions:
            raise DomainError(f"unknown action {a!r}")

    def successors(self, s: State, a: str, cap: int = ENUMERATION_CAP) -> list[tuple[State, Fraction]]:
        """Memoised successor distribution; see :func:`successor_distribution`."""
        memo = self._cache.setdefault("succ", {})
        key = (s, a)
        hit = memo.get(key)
        if hit is None:
            hit = self.backend.successors(self, s, a, cap)
            memo[key] = hit
        return hit


def transition_prob(domain: PlanningDomain, s: State, a: str, s_next: State) -> Fraction:
    domain.check_action(a)
    domain.check_state(s)
    domain.check_state(s_next, "successor state")
    return domain.backend.prob(domain, tuple(s), a, tuple(s_next))


def successor_distribution(domain: PlanningDomain, s: State, a: str,
                           cap: int = ENUMERATION_CAP) -> list[tuple[State, Fraction]]:
    """All successors of ``s`` under ``a`` with nonzero probability.

    Circuit backends enumerate every candidate successor, so they refuse
    domains wider than ``cap`` variables.
    """
    domain.check_action(a)
    domain.check_state(s)
    if domain.backend.kind == "circuit" and domain.width > cap:
        raise EnumerationCapError(f"{domain.width} variables exceeds enumeration cap {cap}")
    return list(domain.successors(tuple(s), a, cap))


def is_goal(domain: PlanningDomain, s: State) -> bool:
    domain.check_state(s)
    return domain.goal_test(tuple(s))


def _row_check(domain: PlanningDomain, s: State, a: str, report: ValidationReport) -> None:
    if domain.backend.kind == "circuit":
        total, over = _circuit.row_sum(domain.backend._by_name[a], s, CIRCUIT_ROW_LIMIT)
        if over:
            report.add("probability above 1", s, a, total)
    else:
        try:
            dist = domain.backend.successors(domain, s, a, ENUMERATION_CAP)
        except DomainError as exc:
            report.add(str(exc), s, a, Fraction(0))
            return
        total = sum((p for _, p in dist), Fraction(0))
        for _, p in dist:
            if not 0 <= p <= 1:
                report.add(f"probability {p} outside [0, 1]", s, a, total)
                break
    if total != 1:
        report.add("successor probabilities do not sum to 1", s, a, total)


def _reachable(domain: PlanningDomain, limit: int) -> tuple[list[State], bool]:
    """States reachable from the initial state under any action, breadth first.

    Stops after ``limit`` states; the flag says whether the closure finished.
    Rows that fail to enumerate are left for the row check to report.
    """
    seen = {domain.initial: None}
    frontier = [domain.initial]
    while frontier:
        nxt = []
        for s in frontier:
            for a in domain.actions:
                try:
                    succ = domain.backend.successors(domain, s, a, CIRCUIT_ROW_LIMIT)
                except (DomainError, EnumerationCapError):
                    continue
                for t, _ in succ:
                    if t not in seen:
                        if len(seen) >= limit:
                            return list(seen), False
                        seen[t] = None
                        nxt.append(t)
        frontier = nxt
    return list(seen), True


def validate_domain(domain: PlanningDomain, cap: int = ENUMERATION_CAP,
                    sample: int = VALIDATION_SAMPLE, seed: int = VALIDATION_SEED) -> ValidationReport:
    """Check that every (state, action) row is a probability distribution.

    Above ``cap`` variables (``CIRCUIT_EXHAUSTIVE_CAP`` for circuit
    domains) the check covers the states reachable from the initial state,
    when there are at most ``REACHABLE_CAP`` of them, plus ``sample`` states
    drawn with ``random.Random(seed)``.  The report is then flagged
    ``sampled_only``, and also ``reachable_only`` if the reachable set was
    covered in full.
    """
    report = ValidationReport()
    if domain.backend.kind == "circuit":
        cap = min(cap, CIRCUIT_EXHAUSTIVE_CAP)
    if domain.width <= cap:
        states: Iterable[State] = all_states(domain.width)
    else:
        reachable, complete = _reachable(domain, REACHABLE_CAP)
        rng = random.Random(seed)
        picked = reachable + [state_from_index(rng.getrandbits(domain.width), domain.width)
                              for _ in range(sample)]
        states = list(dict.fromkeys(picked))
        report.sampled_only = True
        report.reachable_only = complete
    actions = domain.actions
    for s in states:
        for a in actions:
            _row_check(domain, s, a, report)
    return report


def make_flat_domain(name: str, variables: Sequence[str], initial: State, goal: Formula,
                     rows: Mapping[str, Mapping[State, Iterable[tuple[State, object]]]]) -> PlanningDomain:
    """Convenience constructor; probabilities may be given as ints, Fractions or "p/q" strings."""
    table = {
        a: {tuple(s): tuple((tuple(t), parse_rational(p)) for t, p in succ) for s, succ in by_state.items()}
        for a, by_state in rows.items()
    }
    return PlanningDomain(name, tuple(variables), tuple(initial), goal, FlatBackend(table))


__all__.append("make_flat_domain")
