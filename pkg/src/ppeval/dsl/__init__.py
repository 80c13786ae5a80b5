"""Text formats: domains (.ppd), plans (.ppl), circuits (.ppc), DIMACS CNF."""

from .compile import compile_operator, compile_pso_to_circuit
from .dimacs import CnfFormula, parse_dimacs, print_dimacs
from .domains import load_domain, parse_domain, print_domain, write_domain
from .netlist import load_circuit, parse_circuit, print_circuit
from .planfiles import PLAN_CLASSES, load_plan, parse_plan, print_plan

__all__ = [
    "CnfFormula",
    "PLAN_CLASSES",
    "compile_operator",
    "compile_pso_to_circuit",
    "load_circuit",
    "load_domain",
    "load_plan",
    "parse_circuit",
    "parse_dimacs",
    "parse_domain",
    "parse_plan",
    "print_circuit",
    "print_dimacs",
    "print_domain",
    "print_plan",
    "write_domain",
]
