"""Circuit files (.ppc).

::

    circuit erect-castle
    inputs before 2 after 2
    gates:
      m  = INPUT_BEFORE 0
      nm = NOT m
      ...
    out b1 b2        # fraction bits, weights 1/2, 1/4, ...
    unit u           # optional weight-1 bit
"""

from __future__ import annotations

import os
import re
from pathlib import Path

from ..circuit import GATE_KINDS, INPUT_KINDS, Gate, TransitionCircuit, validate_circuit
from ..errors import DslError
from ._text import content_lines, expect_name, split_keyword

__all__ = ["parse_circuit", "print_circuit", "load_circuit"]

_GATE_RE = re.compile(r"^(?P<id>\S+)\s*=\s*(?P<kind>[A-Z_0-9]+)(?P<args>(\s+\S+)*)$")


def parse_circuit(text: str) -> TransitionCircuit:
    name = None
    widths = None
    gates: list[Gate] = []
    gate_line: dict[str, int] = {}
    outs = None
    unit = None
    in_gates = False
    for no, col, line in content_lines(text):
        kw, rest = split_keyword(line)
        if kw == "circuit":
            name = expect_name(rest, "circuit name", no, col + len(kw) + 1)
            in_gates = False
        elif kw == "inputs":
            m = re.fullmatch(r"before\s+(\d+)\s+after\s+(\d+)", rest)
            if m is None:
                raise DslError("expected 'inputs before K after K'", no, col)
            widths = int(m.group(1)), int(m.group(2))
        elif line == "gates:":
            in_gates = True
        elif kw == "out":
            outs = tuple(rest.split())
            in_gates = False
        elif kw == "unit":
            toks = rest.split()
            if len(toks) != 1:
                raise DslError("'unit' takes exactly one gate id", no, col)
            unit = toks[0]
            in_gates = False
        elif in_gates:
            m = _GATE_RE.match(line)
            if m is None:
                raise DslError("expected 'ID = KIND [args]'", no, col)
            gid, kind = m.group("id"), m.group("kind")
            if kind not in GATE_KINDS:
                raise DslError(f"unknown gate kind {kind!r}", no, col + m.start("kind"))
            args = m.group("args").split()
            if kind in INPUT_KINDS:
                if len(args) != 1 or not args[0].isdigit():
                    raise DslError(f"{kind} takes one bit index", no, col)
                args = [int(args[0])]
            if gid in gate_line:
                raise DslError(f"gate {gid!r} already defined on line {gate_line[gid]}", no, col)
            gate_line[gid] = no
            gates.append(Gate(gid, kind, tuple(args)))
        else:
            raise DslError(f"unrecognised line starting with {kw!r}", no, col)
    if name is None:
        raise DslError("missing 'circuit NAME' header", 1, 1)
    if widths is None:
        raise DslError("missing 'inputs before K after K' line", 1, 1)
    if outs is None:
        raise DslError("missing 'out' line", 1, 1)
    circuit = TransitionCircuit(name, widths[0], widths[1], tuple(gates), outs, unit)
    report = validate_circuit(circuit)
    if not report.ok:
        first = report.violations[0].defect
        gid = re.search(r"gate '([^']+)'", first)
        line = gate_line.get(gid.group(1)) if gid else None
        raise DslError(f"invalid circuit: {first}", line)
    return circuit


def print_circuit(circuit: TransitionCircuit) -> str:
    lines = [
        f"circuit {circuit.name}",
        f"inputs before {circuit.before_width} after {circuit.after_width}",
        "gates:",
    ]
    for g in circuit.gates:
        args = " ".join(str(a) for a in g.args)
        lines.append(f"  {g.id} = {g.kind}" + (f" {args}" if args else ""))
    lines.append("out " + " ".join(circuit.output_bits))
    if circuit.unit_bit is not None:
        lines.append(f"unit {circuit.unit_bit}")
    return "\n".join(lines) + "\n"


def load_circuit(path: os.PathLike | str) -> TransitionCircuit:
    path = Path(path)
    try:
        return parse_circuit(path.read_text())
    except DslError as exc:
        raise DslError(f"{path.name}: {exc.message}", exc.line, exc.column) from None
