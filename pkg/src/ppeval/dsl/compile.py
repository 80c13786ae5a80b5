"""PSO operator lists → transition circuits.

For an operator with first-match cases c1..ck and outcomes o, the circuit
computes

    t(s, s') = Σ_c Σ_{o ∈ c} [c fires on s] · [applying o to s gives s'] · p(o)

where "c fires" is ``cond_c ∧ ¬cond_1 ∧ … ∧ ¬cond_{c-1}``.  Several outcomes
of the fired case can land on the same s' (e.g. ``moat := 1`` when moat is
already true), so the sum is built with a ripple-carry adder over fixed
point bits rather than by OR-ing outcome indicators.
"""

from __future__ import annotations

from ..circuit import CircuitBuilder, TransitionCircuit
from ..core import CircuitBackend, PlanningDomain, PsoBackend, PsoOperator
from ..errors import DslError
from ..formula import And, Const, Formula, Not, Var

__all__ = ["compile_pso_to_circuit", "compile_operator", "formula_gate"]


def formula_gate(b: CircuitBuilder, f: Formula, index: dict[str, int], side: str = "before") -> str:
    pin = b.before if side == "before" else b.after
    if isinstance(f, Const):
        return b.const(f.value)
    if isinstance(f, Var):
        return pin(index[f.name])
    if isinstance(f, Not):
        return b.not_(formula_gate(b, f.arg, index, side))
    parts = [formula_gate(b, a, index, side) for a in f.args]
    return b.and_(*parts) if isinstance(f, And) else b.or_(*parts)


def _fraction_bits(op: PsoOperator) -> int:
    m = 1
    for ci, case in enumerate(op.cases):
        for oi, o in enumerate(case.outcomes):
            d = o.probability.denominator
            if d & (d - 1):
                raise DslError(
                    f"action {op.name!r}, case {ci + 1}, outcome {oi + 1}: probability "
                    f"{o.probability} is not dyadic and has no binary circuit form")
            m = max(m, d.bit_length() - 1)
    return m


def compile_operator(op: PsoOperator, variables: tuple[str, ...]) -> TransitionCircuit:
    n = len(variables)
    index = {v: i for i, v in enumerate(variables)}
    m = _fraction_bits(op)
    b = CircuitBuilder(n, n)
    acc = [b.zero] * (m + 1)  # acc[0] is the unit bit, acc[j] weighs 2**-j
    earlier = b.zero
    for case in op.cases:
        cond = formula_gate(b, case.condition, index)
        fires = b.and_(cond, b.not_(earlier))
        earlier = b.or_(earlier, cond)
        for o in case.outcomes:
            if o.probability == 0:
                continue
            target = {index[v]: bit for v, bit in o.effect}
            match = [
                (b.after(i) if target[i] else b.not_(b.after(i))) if i in target else b.eq(b.after(i), b.before(i))
                for i in range(n)
            ]
            term = b.and_(fires, *match)
            scaled = int(o.probability * (1 << m))
            acc = b.add_gated(acc, term, scaled)
    return b.build(op.name, acc[1:], acc[0] if acc[0] != b.zero else None)


def compile_pso_to_circuit(domain: PlanningDomain) -> PlanningDomain:
    """Same domain with every PSO action replaced by an equivalent circuit."""
    if not isinstance(domain.backend, PsoBackend):
        raise DslError(f"domain {domain.name!r} does not use PSO operators")
    circuits = tuple((op.name, compile_operator(op, domain.variables)) for op in domain.backend.operators)
    return PlanningDomain(domain.name, domain.variables, domain.initial, domain.goal, CircuitBackend(circuits))
