"""Hard-instance generators and the brute-force oracles that certify them.

``majsat_to_instance`` builds the one-action domain whose two-step plan
reaches the goal with probability (#models / 2**n); ``tm_to_instance`` builds
the one-action deterministic domain whose states are configurations of a
space-bounded Turing machine, evaluated under the constant looping plan.
"""

from __future__ import annotations

import hashlib
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple, Optional

from .circuit import CircuitBuilder
from .core import ENUMERATION_CAP, CircuitBackend, PlanningDomain
from .dsl._text import content_lines, split_keyword
from .dsl.dimacs import CnfFormula, print_dimacs
from .dsl.domains import write_domain
from .dsl.planfiles import print_plan
from .errors import DslError, EnumerationCapError, SpaceBoundError
from .formula import TRUE, Not, Var, conj
from .plans import LoopingPlan, Plan, TotalOrderPlan, chain_acyclic

__all__ = [
    "ReductionInstance",
    "TuringMachineSpec",
    "TmRun",
    "majsat_to_instance",
    "count_satisfying",
    "tm_to_instance",
    "simulate_tm",
    "parse_tm",
    "print_tm",
    "write_instance",
    "constant_plan",
]

MOVES = {"L": -1, "R": 1, "S": 0}


@dataclass(frozen=True)
class ReductionInstance:
    domain: PlanningDomain
    plan: Plan
    threshold: Fraction
    provenance: str
    alternate: Optional[Plan] = None  # same plan in another class, for cross-checks


def _digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


# --------------------------------------------------------------------------- MAJSAT

def count_satisfying(formula: CnfFormula, max_vars: int = 24) -> int:
    """Model count by exhaustive enumeration, all 2**n assignments at once.

    Each variable becomes a 2**n-bit mask (bit k set iff the variable is
    true in assignment k); clauses OR masks, the formula ANDs clauses.
    """
    n = formula.num_vars
    if n > max_vars:
        raise EnumerationCapError(f"{n} variables exceeds the model-count cap of {max_vars}")
    size = 1 << n
    full = (1 << size) - 1
    masks = []
    for i in range(n):
        block = 1 << i
        ones = ((1 << block) - 1) << block  # one period: block zeros, block ones
        masks.append(ones * (full // ((1 << (2 * block)) - 1)))
    models = full
    for clause in formula.clauses:
        c = 0
        for lit in clause:
            v = masks[abs(lit) - 1]
            c |= v if lit > 0 else full ^ v
        models &= c
    return models.bit_count()


# phase tags over (ph0, ph1)
_S0, _ASSIGN, _ACC, _REJ = (0, 0), (1, 0), (0, 1), (1, 1)


def majsat_to_instance(formula: CnfFormula) -> ReductionInstance:
    """Domain M(φ): from s0 every assignment w with probability 2**-n, then
    w moves to s_acc if it satisfies φ and to s_rej otherwise.

    Variables are two phase bits followed by x1..xn; s_acc and s_rej carry
    all-zero assignment bits and are absorbing.
    """
    n = formula.num_vars
    if n < 1:
        raise ValueError("MAJSAT instance needs at least one variable")
    width = n + 2
    variables = ("ph0", "ph1") + tuple(f"x{i}" for i in range(1, n + 1))
    b = CircuitBuilder(width, width)
    bef = [b.before(i) for i in range(width)]
    aft = [b.after(i) for i in range(width)]

    def phase(bits, tag):
        return b.code_eq(bits[:2], tag[0] | tag[1] << 1)

    x_before = bef[2:]
    clauses = []
    for clause in formula.clauses:
        clauses.append(b.or_(*(x_before[abs(l) - 1] if l > 0 else b.not_(x_before[abs(l) - 1]) for l in clause)))
    sat = b.and_(*clauses)
    cleared = b.and_(*(b.not_(x) for x in aft[2:]))
    spread = b.and_(phase(bef, _S0), phase(aft, _ASSIGN))
    to_acc = b.and_(phase(bef, _ASSIGN), sat, phase(aft, _ACC), cleared)
    to_rej = b.and_(phase(bef, _ASSIGN), b.not_(sat), phase(aft, _REJ), cleared)
    stay = b.and_(b.or_(phase(bef, _ACC), phase(bef, _REJ)), *(b.eq(x, y) for x, y in zip(bef, aft)))
    unit = b.or_(to_acc, to_rej, stay)
    circuit = b.build("a", [b.zero] * (n - 1) + [spread], unit)
    domain = PlanningDomain(
        name="majsat",
        variables=variables,
        initial=(0,) * width,
        goal=conj([Not(Var("ph0")), Var("ph1")]),
        backend=CircuitBackend((("a", circuit),)),
    )
    plan = TotalOrderPlan(("a", "a"))
    return ReductionInstance(domain, plan, Fraction(1, 2), _digest(print_dimacs(formula)), chain_acyclic(plan))


# --------------------------------------------------------------------------- Turing machines

@dataclass(frozen=True)
class TuringMachineSpec:
    """Deterministic single-tape machine confined to ``space`` cells.

    ``alphabet[0]`` is the blank.  ``rules`` maps every (non-halting state,
    symbol) pair to ``(next state, written symbol, move)`` with move in L/R/S.
    """

    states: tuple[str, ...]
    start: str
    accept: str
    reject: Optional[str]
    alphabet: tuple[str, ...]
    space: int
    rules: dict = field(hash=False)

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    def check(self) -> None:
        halting = {self.accept, self.reject} - {None}
        for q in (self.start, *halting):
            if q not in self.states:
                raise ValueError(f"state {q!r} not declared")
        if self.space < 1:
            raise ValueError("space bound must be at least 1")
        for (q, s), (q2, s2, mv) in self.rules.items():
            if q in halting:
                raise ValueError(f"halting state {q!r} has an outgoing rule")
            if q not in self.states or q2 not in self.states:
                raise ValueError(f"rule ({q},{s}) mentions an undeclared state")
            if s not in self.alphabet or s2 not in self.alphabet:
                raise ValueError(f"rule ({q},{s}) mentions a symbol outside the alphabet")
            if mv not in MOVES:
                raise ValueError(f"rule ({q},{s}) has bad move {mv!r}")
        for q in self.states:
            if q in halting:
                continue
            for s in self.alphabet:
                if (q, s) not in self.rules:
                    raise ValueError(f"no rule for ({q},{s}); machine must be total on non-halting states")


_RULE_RE = re.compile(r"^\(\s*(\S+?)\s*,\s*(\S+?)\s*\)\s*->\s*\(\s*(\S+?)\s*,\s*(\S+?)\s*,\s*([LRS])\s*\)$")


def parse_tm(text: str) -> TuringMachineSpec:
    """Parse a .tm file (``states``, ``start``, ``accept``, ``reject``,
    ``blank``, ``alphabet``, ``space``, ``rule (q,a) -> (q',b,L|R|S)``)."""
    fields: dict[str, object] = {}
    rules: dict[tuple[str, str], tuple[str, str, str]] = {}
    for no, col, line in content_lines(text):
        kw, rest = split_keyword(line)
        if kw == "rule":
            m = _RULE_RE.match(rest)
            if m is None:
                raise DslError("expected 'rule (q,s) -> (q2,s2,L|R|S)'", no, col)
            key = (m.group(1), m.group(2))
            if key in rules:
                raise DslError(f"second rule for {key}; machine must be deterministic", no, col)
            rules[key] = (m.group(3), m.group(4), m.group(5))
        elif kw in ("states", "alphabet"):
            fields[kw] = tuple(rest.split())
        elif kw in ("start", "accept", "reject", "blank"):
            fields[kw] = rest
        elif kw == "space":
            if not rest.isdigit():
                raise DslError("space bound must be a positive integer", no, col)
            fields[kw] = int(rest)
        else:
            raise DslError(f"unrecognised line starting with {kw!r}", no, col)
    for required in ("states", "accept", "blank", "space"):
        if required not in fields:
            raise DslError(f"missing '{required}' line", 1, 1)
    states = fields["states"]
    blank = fields["blank"]
    symbols = list(fields.get("alphabet", ()))
    for (q, s), (q2, s2, _) in rules.items():
        symbols += [s, s2]
    alphabet = tuple(dict.fromkeys([blank] + [s for s in symbols if s != blank]))
    tm = TuringMachineSpec(states, fields.get("start", states[0]), fields["accept"], fields.get("reject"),
                           alphabet, fields["space"], rules)
    try:
        tm.check()
    except ValueError as exc:
        raise DslError(str(exc)) from None
    return tm


def print_tm(tm: TuringMachineSpec) -> str:
    lines = ["states " + " ".join(tm.states), f"start {tm.start}", f"accept {tm.accept}"]
    if tm.reject is not None:
        lines.append(f"reject {tm.reject}")
    lines += [f"blank {tm.blank}", "alphabet " + " ".join(tm.alphabet), f"space {tm.space}"]
    lines += [f"rule ({q},{s}) -> ({q2},{s2},{mv})" for (q, s), (q2, s2, mv) in tm.rules.items()]
    return "\n".join(lines) + "\n"


class TmRun(NamedTuple):
    verdict: str  # "accept" | "reject" | "timeout"
    steps: int


def _initial_tape(tm: TuringMachineSpec, x: str) -> list[str]:
    if len(x) > tm.space:
        raise ValueError(f"input of length {len(x)} does not fit in {tm.space} cells")
    bad = set(x) - set(tm.alphabet)
    if bad:
        raise ValueError(f"input uses symbols outside the alphabet: {sorted(bad)}")
    return list(x) + [tm.blank] * (tm.space - len(x))


def simulate_tm(tm: TuringMachineSpec, x: str, step_cap: int = 100_000) -> TmRun:
    """Run the machine configuration by configuration.

    Raises :class:`SpaceBoundError` if the head would leave the allowed cells.
    """
    tape = _initial_tape(tm, x)
    q, head, steps = tm.start, 0, 0
    while True:
        if q == tm.accept:
            return TmRun("accept", steps)
        if q == tm.reject:
            return TmRun("reject", steps)
        if steps >= step_cap:
            return TmRun("timeout", steps)
        q, tape[head], mv = tm.rules[(q, tape[head])]
        head += MOVES[mv]
        steps += 1
        if not 0 <= head < tm.space:
            raise SpaceBoundError(f"head left the {tm.space} allowed cells after {steps} steps")


def _bits_for(count: int) -> int:
    return max(1, (count - 1).bit_length())


def tm_variables(tm: TuringMachineSpec) -> tuple[str, ...]:
    qb, sb = _bits_for(len(tm.states)), _bits_for(len(tm.alphabet))
    return (tuple(f"st{j}" for j in range(qb))
            + tuple(f"hd{k}" for k in range(tm.space))
            + tuple(f"c{k}_{j}" for k in range(tm.space) for j in range(sb)))


def tm_configuration(tm: TuringMachineSpec, q: str, head: int, tape: list[str]) -> tuple[int, ...]:
    qb, sb = _bits_for(len(tm.states)), _bits_for(len(tm.alphabet))
    qc = tm.states.index(q)
    bits = [qc >> j & 1 for j in range(qb)]
    bits += [int(k == head) for k in range(tm.space)]
    for sym in tape:
        code = tm.alphabet.index(sym)
        bits += [code >> j & 1 for j in range(sb)]
    return tuple(bits)


def constant_plan(action: str) -> LoopingPlan:
    """One step that repeats ``action`` forever, whatever it observes."""
    return LoopingPlan((("q1", action),), "q1", ("any",), ((TRUE, "any"),), (("q1", "any", "q1"),))


def tm_to_instance(tm: TuringMachineSpec, x: str, cap: int = ENUMERATION_CAP) -> ReductionInstance:
    """Configuration domain of ``tm`` on ``x`` under the constant plan, threshold 1.

    Layout: control state in binary, head position one-hot, each cell's
    symbol in binary (blank = 0).  Configurations that are malformed, halted,
    or about to move the head off the tape step to themselves.
    """
    tm.check()
    variables = tm_variables(tm)
    width = len(variables)
    if width > cap:
        raise EnumerationCapError(f"configuration encoding needs {width} variables; cap is {cap}")
    qb, sb, K = _bits_for(len(tm.states)), _bits_for(len(tm.alphabet)), tm.space
    initial = tm_configuration(tm, tm.start, 0, _initial_tape(tm, x))

    b = CircuitBuilder(width, width)
    bef = [b.before(i) for i in range(width)]
    aft = [b.after(i) for i in range(width)]
    st = bef[:qb]
    hd = bef[qb:qb + K]
    cells = [bef[qb + K + k * sb: qb + K + (k + 1) * sb] for k in range(K)]

    read = [b.or_(*(b.and_(hd[k], cells[k][j]) for k in range(K))) for j in range(sb)]
    fired = {}
    for (q, s), rule in tm.rules.items():
        fired[(q, s)] = b.and_(b.code_eq(st, tm.states.index(q)), b.code_eq(read, tm.alphabet.index(s)))

    def any_rule(pred):
        return b.or_(*(g for key, g in fired.items() if pred(tm.rules[key])))

    next_state = [any_rule(lambda r, j=j: tm.states.index(r[0]) >> j & 1) for j in range(qb)]
    written = [any_rule(lambda r, j=j: tm.alphabet.index(r[1]) >> j & 1) for j in range(sb)]
    left, right, stay = (any_rule(lambda r, m=m: r[2] == m) for m in "LRS")
    stepping = b.or_(*fired.values())

    seen, clash = b.zero, b.zero
    for h in hd:
        clash = b.or_(clash, b.and_(seen, h))
        seen = b.or_(seen, h)
    state_ok = b.or_(*(b.code_eq(st, i) for i in range(len(tm.states))))
    well_formed = b.and_(seen, b.not_(clash), state_ok)
    off_tape = b.or_(b.and_(left, hd[0]), b.and_(right, hd[K - 1]))
    advance = b.and_(stepping, well_formed, b.not_(off_tape))

    expect = [b.mux(advance, ns, cur) for ns, cur in zip(next_state, st)]
    for k in range(K):
        moved = b.or_(b.and_(left, hd[k + 1]) if k + 1 < K else b.zero,
                      b.and_(right, hd[k - 1]) if k > 0 else b.zero,
                      b.and_(stay, hd[k]))
        expect.append(b.mux(advance, moved, hd[k]))
    for k in range(K):
        here = b.and_(advance, hd[k])
        expect += [b.mux(here, w, cur) for w, cur in zip(written, cells[k])]
    unit = b.and_(*(b.eq(a, e) for a, e in zip(aft, expect)))
    circuit = b.build("step", [b.zero], unit)

    acc = tm.states.index(tm.accept)
    goal = conj([Var(f"st{j}") if acc >> j & 1 else Not(Var(f"st{j}")) for j in range(qb)])
    domain = PlanningDomain("tm", variables, initial, goal, CircuitBackend((("step", circuit),)))
    return ReductionInstance(domain, constant_plan("step"), Fraction(1), _digest(print_tm(tm) + "\ninput " + x))


def write_instance(instance: ReductionInstance, directory: os.PathLike | str, stem: str) -> list[Path]:
    """Write the instance as ``<stem>.ppd``, its circuit files and ``<stem>.ppl``."""
    paths = write_domain(instance.domain, directory, stem)
    header = f"# threshold {instance.threshold}\n# source {instance.provenance}\n"
    plan_path = Path(directory) / f"{stem}.ppl"
    plan_path.write_text(header + print_plan(instance.plan))
    paths.append(plan_path)
    if instance.alternate is not None:
        alt = Path(directory) / f"{stem}.alt.ppl"
        alt.write_text(header + print_plan(instance.alternate))
        paths.append(alt)
    return paths
