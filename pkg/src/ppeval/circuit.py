"""Transition circuits: gate netlists computing t(s, a, s') as a dyadic fraction.

A circuit reads the before-state bits and after-state bits and drives ``m``
fraction output bits, bit ``j`` (1-based) carrying weight ``2**-j``.  An
optional *unit* bit carries weight 1 so that deterministic transitions
(probability exactly 1) are expressible.

Two evaluators share one compiled program: :func:`eval_circuit` for a single
(before, after) pair, and :func:`successor_masks`, which evaluates all
``2**after_width`` after-states at once by packing each gate's value into
one Python integer (bit ``k`` of a mask is the gate's value for after-state
index ``k``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional, Sequence

from .errors import DomainError, EnumerationCapError
from .report import ValidationReport

__all__ = [
    "Gate",
    "TransitionCircuit",
    "CircuitBuilder",
    "eval_circuit",
    "validate_circuit",
    "successor_masks",
    "successor_table",
    "GATE_KINDS",
]

LOGIC_KINDS = ("NOT", "AND", "OR", "XOR")
INPUT_KINDS = ("INPUT_BEFORE", "INPUT_AFTER")
CONST_KINDS = ("CONST0", "CONST1")
GATE_KINDS = CONST_KINDS + LOGIC_KINDS + INPUT_KINDS

_OP = {k: i for i, k in enumerate(GATE_KINDS)}
_C0, _C1, _NOT, _AND, _OR, _XOR, _INB, _INA = range(8)


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    args: tuple = ()  # gate ids, or (bit index,) for INPUT_* kinds


@dataclass(frozen=True)
class TransitionCircuit:
    name: str
    before_width: int
    after_width: int
    gates: tuple[Gate, ...]
    output_bits: tuple[str, ...]
    unit_bit: Optional[str] = None

    @property
    def fraction_bits(self) -> int:
        return len(self.output_bits)

    @cached_property
    def _program(self):
        report = validate_circuit(self)
        if not report.ok:
            raise ValueError(f"circuit {self.name!r} is malformed: {report.violations[0].defect}")
        pos = {g.id: i for i, g in enumerate(self.gates)}
        prog = []
        for g in self.gates:
            if g.kind in INPUT_KINDS:
                prog.append((_OP[g.kind], g.args[0]))
            else:
                prog.append((_OP[g.kind], tuple(pos[a] for a in g.args)))
        outs = tuple(pos[o] for o in self.output_bits)
        unit = pos[self.unit_bit] if self.unit_bit is not None else None
        return tuple(prog), outs, unit


def _run(prog, before_vals, after_vals, full):
    vals = []
    push = vals.append
    for op, arg in prog:
        if op == _AND:
            v = full
            for a in arg:
                v &= vals[a]
        elif op == _OR:
            v = 0
            for a in arg:
                v |= vals[a]
        elif op == _NOT:
            v = full ^ vals[arg[0]]
        elif op == _INA:
            v = after_vals[arg]
        elif op == _INB:
            v = before_vals[arg]
        elif op == _XOR:
            v = 0
            for a in arg:
                v ^= vals[a]
        elif op == _C1:
            v = full
        else:
            v = 0
        push(v)
    return vals


def _check_width(state: Sequence[int], width: int, what: str) -> None:
    if len(state) != width:
        raise DomainError(f"{what} state has width {len(state)}, circuit expects {width}")


def eval_circuit(circuit: TransitionCircuit, before: Sequence[int], after: Sequence[int]) -> Fraction:
    _check_width(before, circuit.before_width, "before")
    _check_width(after, circuit.after_width, "after")
    prog, outs, unit = circuit._program
    vals = _run(prog, before, after, 1)
    m = len(outs)
    num = 0
    for j, o in enumerate(outs, start=1):
        if vals[o]:
            num += 1 << (m - j)
    if unit is not None and vals[unit]:
        num += 1 << m
    return Fraction(num, 1 << m)


@lru_cache(maxsize=32)
def _after_patterns(width: int) -> tuple[tuple[int, ...], int]:
    size = 1 << width
    full = (1 << size) - 1
    pats = []
    for i in range(width):
        block = 1 << i
        unit = ((1 << block) - 1) << block  # 2*block bits, upper half set
        pats.append(unit * (full // ((1 << (2 * block)) - 1)))
    return tuple(pats), full


def successor_masks(circuit: TransitionCircuit, before: Sequence[int], cap: int = 20):
    """Evaluate the circuit on every after-state at once.

    Returns ``(unit_mask, fraction_masks)``; bit ``k`` of a mask is the output
    for the after-state whose index is ``k`` (bit ``i`` of ``k`` is variable ``i``).
    """
    _check_width(before, circuit.before_width, "before")
    if circuit.after_width > cap:
        raise EnumerationCapError(
            f"circuit {circuit.name!r} has {circuit.after_width} after-bits; enumeration cap is {cap}")
    pats, full = _after_patterns(circuit.after_width)
    prog, outs, unit = circuit._program
    vals = _run(prog, [full if b else 0 for b in before], pats, full)
    return (vals[unit] if unit is not None else 0), [vals[o] for o in outs]


def successor_table(circuit: TransitionCircuit, before: Sequence[int], cap: int = 20) -> list[tuple[int, Fraction]]:
    """Nonzero ``(after_index, probability)`` pairs in ascending index order."""
    unit_mask, masks = successor_masks(circuit, before, cap)
    m = len(masks)
    support = unit_mask
    for mk in masks:
        support |= mk
    out = []
    denom = 1 << m
    while support:
        low = support & -support
        k = low.bit_length() - 1
        support ^= low
        num = (1 << m) if unit_mask >> k & 1 else 0
        for j, mk in enumerate(masks, start=1):
            if mk >> k & 1:
                num += 1 << (m - j)
        out.append((k, Fraction(num, denom)))
    return out


def row_sum(circuit: TransitionCircuit, before: Sequence[int], cap: int = 20) -> tuple[Fraction, bool]:
    """Sum of t(before, ., s') over all s', and whether any single entry exceeds 1."""
    unit_mask, masks = successor_masks(circuit, before, cap)
    m = len(masks)
    num = unit_mask.bit_count() << m
    any_frac = 0
    for j, mk in enumerate(masks, start=1):
        num += mk.bit_count() << (m - j)
        any_frac |= mk
    return Fraction(num, 1 << m), bool(unit_mask & any_frac)


def validate_circuit(circuit: TransitionCircuit) -> ValidationReport:
    report = ValidationReport()
    if circuit.before_width < 0 or circuit.after_width < 0:
        report.add("negative input width")
    defined: set[str] = set()
    for g in circuit.gates:
        if g.id in defined:
            report.add(f"gate {g.id!r} defined twice")
        if g.kind not in GATE_KINDS:
            report.add(f"gate {g.id!r} has unknown kind {g.kind!r}")
            defined.add(g.id)
            continue
        if g.kind in CONST_KINDS:
            if g.args:
                report.add(f"gate {g.id!r}: {g.kind} takes no inputs")
        elif g.kind in INPUT_KINDS:
            width = circuit.before_width if g.kind == "INPUT_BEFORE" else circuit.after_width
            if len(g.args) != 1 or not isinstance(g.args[0], int):
                report.add(f"gate {g.id!r}: {g.kind} takes one bit index")
            elif not 0 <= g.args[0] < width:
                report.add(f"gate {g.id!r}: {g.kind} index {g.args[0]} out of range 0..{width - 1}")
        else:
            if g.kind == "NOT" and len(g.args) != 1:
                report.add(f"gate {g.id!r}: NOT takes exactly 1 input, got {len(g.args)}")
            elif g.kind != "NOT" and len(g.args) < 2:
                report.add(f"gate {g.id!r}: {g.kind} needs at least 2 inputs, got {len(g.args)}")
            for a in g.args:
                if a not in defined:
                    report.add(f"gate {g.id!r} references undefined gate {a!r}")
        defined.add(g.id)
    if not circuit.output_bits:
        report.add("circuit has no fraction output bits")
    for o in circuit.output_bits:
        if o not in defined:
            report.add(f"output references undefined gate {o!r}")
    if circuit.unit_bit is not None and circuit.unit_bit not in defined:
        report.add(f"unit output references undefined gate {circuit.unit_bit!r}")
    return report


class CircuitBuilder:
    """Incremental netlist construction with constant folding and sharing.

    Methods return gate ids.  Structurally identical gates are emitted once.
    """

    def __init__(self, before_width: int, after_width: int):
        self.before_width = before_width
        self.after_width = after_width
        self.gates: list[Gate] = []
        self._memo: dict[tuple, str] = {}
        self.zero = self._emit("CONST0", ())
        self.one = self._emit("CONST1", ())

    def _emit(self, kind: str, args: tuple) -> str:
        key = (kind, args)
        gid = self._memo.get(key)
        if gid is None:
            gid = f"g{len(self.gates)}"
            self.gates.append(Gate(gid, kind, args))
            self._memo[key] = gid
        return gid

    def const(self, bit) -> str:
        return self.one if bit else self.zero

    def before(self, i: int) -> str:
        return self._emit("INPUT_BEFORE", (i,))

    def after(self, i: int) -> str:
        return self._emit("INPUT_AFTER", (i,))

    def not_(self, x: str) -> str:
        if x == self.zero:
            return self.one
        if x == self.one:
            return self.zero
        src = self._negated.get(x)
        if src is not None:
            return src
        gid = self._emit("NOT", (x,))
        self._negated[gid] = x
        return gid

    @cached_property
    def _negated(self) -> dict[str, str]:
        return {}

    def and_(self, *xs: str) -> str:
        args = []
        for x in xs:
            if x == self.zero:
                return self.zero
            if x != self.one and x not in args:
                args.append(x)
        if not args:
            return self.one
        if len(args) == 1:
            return args[0]
        return self._emit("AND", tuple(sorted(args)))

    def or_(self, *xs: str) -> str:
        args = []
        for x in xs:
            if x == self.one:
                return self.one
            if x != self.zero and x not in args:
                args.append(x)
        if not args:
            return self.zero
        if len(args) == 1:
            return args[0]
        return self._emit("OR", tuple(sorted(args)))

    def xor(self, a: str, b: str) -> str:
        if a == self.zero:
            return b
        if b == self.zero:
            return a
        if a == self.one:
            return self.not_(b)
        if b == self.one:
            return self.not_(a)
        if a == b:
            return self.zero
        return self._emit("XOR", tuple(sorted((a, b))))

    def eq(self, a: str, b: str) -> str:
        return self.not_(self.xor(a, b))

    def mux(self, sel: str, if_true: str, if_false: str) -> str:
        return self.or_(self.and_(sel, if_true), self.and_(self.not_(sel), if_false))

    def code_eq(self, bits: Sequence[str], code: int) -> str:
        """Gate that is 1 iff ``bits`` (LSB first) spell ``code``."""
        return self.and_(*(b if code >> i & 1 else self.not_(b) for i, b in enumerate(bits)))

    def add_gated(self, acc: list[str], gate: str, value: int) -> list[str]:
        """Ripple-carry ``acc + (gate ? value : 0)``; ``acc[0]`` is the MSB.

        The final carry out of ``acc[0]`` is dropped; callers guarantee no overflow.
        """
        width = len(acc)
        out = list(acc)
        carry = self.zero
        for pos in range(width - 1, -1, -1):
            bit = gate if value >> (width - 1 - pos) & 1 else self.zero
            a = out[pos]
            out[pos] = self.xor(self.xor(a, bit), carry)
            carry = self.or_(self.and_(a, bit), self.and_(carry, self.xor(a, bit)))
        return out

    def build(self, name: str, fraction_bits: Sequence[str], unit: Optional[str] = None) -> TransitionCircuit:
        used = self._live(list(fraction_bits) + ([unit] if unit is not None else []))
        gates = tuple(g for g in self.gates if g.id in used)
        return TransitionCircuit(name, self.before_width, self.after_width, gates,
                                 tuple(fraction_bits), unit)

    def _live(self, roots: list[str]) -> set[str]:
        by_id = {g.id: g for g in self.gates}
        seen: set[str] = set()
        stack = list(roots)
        while stack:
            gid = stack.pop()
            if gid in seen:
                continue
            seen.add(gid)
            g = by_id[gid]
            if g.kind not in INPUT_KINDS:
                stack.extend(g.args)
        return seen
