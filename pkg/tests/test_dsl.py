import itertools
import random
from fractions import Fraction

import pytest

from ppeval.circuit import eval_circuit
from ppeval.cli import bundled
from ppeval.core import CircuitBackend, Outcome, PlanningDomain, PsoBackend, PsoCase, PsoOperator, transition_prob
from ppeval.dsl import (
    compile_operator,
    compile_pso_to_circuit,
    load_domain,
    load_plan,
    parse_circuit,
    parse_dimacs,
    parse_domain,
    parse_plan,
    print_circuit,
    print_dimacs,
    print_domain,
    print_plan,
    write_domain,
)
from ppeval.errors import DslError
from ppeval.formula import TRUE, Var
from ppeval.plans import AcyclicPlan, LoopingPlan, PartialOrderPlan, TotalOrderPlan, validate_plan
from oracles import random_pso_domain

HEADER = "domain t\nvars x y\ninit !x !y\ngoal y\n"


def test_bundled_sandcastle(sandcastle):
    assert sandcastle.variables == ("moat", "castle")
    assert sandcastle.actions == ("dig-moat", "erect-castle")
    assert sandcastle.initial == (0, 0)


@pytest.mark.parametrize("body, fragment", [
    ("action a\n  case true:\n    1/2: {}\n    1/4: {x := 1}\n", "sum to 3/4"),
    ("action a\n  case x:\n    1: {}\n", "case true"),
    ("action a\n  case true:\n    1: {}\naction a\n  case true:\n    1: {}\n", "duplicate action"),
    ("action a\n  case z:\n    1: {}\n", "undeclared"),
    ("action a\n  case true:\n    3/2: {}\n    -1/2: {}\n", "outside"),
    ("action a\n  case true:\n    1: {z := 1}\n", "bad effect"),
    ("action a\n  case true:\n    1: {x := 1, x := 0}\n", "twice"),
    ("action a\n  case true:\n    1/3: {}\n    0.66: {}\n", "sum"),
    ("action a\n  case true\n    1: {}\n", "':'"),
    ("action a\n", "no cases"),
    ("bogus line\n", "unrecognised"),
])
def test_domain_errors(body, fragment):
    with pytest.raises(DslError) as exc:
        parse_domain(HEADER + body)
    assert fragment in str(exc.value)


def test_error_positions():
    with pytest.raises(DslError) as exc:
        parse_domain(HEADER + "action a\n  case x & & y:\n    1: {}\n")
    assert exc.value.line == 6


def test_empty_action_list():
    d = parse_domain(HEADER)
    assert d.actions == ()


def test_mixing_kinds_rejected():
    text = HEADER + "action a\n  case true:\n    1: {}\naction b circuit b.ppc\n"
    with pytest.raises(DslError):
        parse_domain(text, circuit_loader=lambda ref: None)


def test_decimal_probabilities():
    d = parse_domain(HEADER + "action a\n  case true:\n    0.25: {y := 1}\n    0.75: {}\n")
    assert transition_prob(d, (0, 0), "a", (0, 1)) == Fraction(1, 4)


def test_total_order_plan():
    plan = parse_plan("total-order: dig-moat dig-moat erect-castle")
    assert plan == TotalOrderPlan(("dig-moat", "dig-moat", "erect-castle"))


def test_cyclic_acyclic_parses_but_fails_validation(sandcastle):
    text = "acyclic\nlabels l\nobs true -> l\nstep q dig-moat\nedge q l -> q\n"
    plan = parse_plan(text)
    assert isinstance(plan, AcyclicPlan)
    assert not validate_plan(plan, sandcastle).ok


def test_partial_order_plan(figures):
    plan = figures["fig2c"]
    assert isinstance(plan, PartialOrderPlan)
    assert len(plan.nodes) == 5 and len(plan.precedence) == 5


@pytest.mark.parametrize("text", ["branching\nstep q a\n", "", "acyclic\nedge q -> r\n", "partial-order\nnode a\n"])
def test_plan_errors(text):
    with pytest.raises(DslError):
        parse_plan(text)


def test_start_defaults_to_first_step():
    plan = parse_plan("looping\nlabels l\nobs true -> l\nstep s1 a\nstep s2 b\n")
    assert isinstance(plan, LoopingPlan) and plan.start == "s1"


def test_circuit_bad_input_index():
    text = "circuit c\ninputs before 1 after 1\ngates:\n  a = INPUT_AFTER 4\nout a\n"
    with pytest.raises(DslError):
        parse_circuit(text)


def test_circuit_const_one():
    c = parse_circuit("circuit half\ninputs before 1 after 1\ngates:\n  o = CONST1\nout o\n")
    assert all(eval_circuit(c, (s,), (t,)) == Fraction(1, 2) for s in (0, 1) for t in (0, 1))


@pytest.mark.parametrize("text", [
    "circuit c\ninputs before 1 after 1\ngates:\n  a = FOO\nout a\n",
    "circuit c\ninputs before 1 after 1\ngates:\n  a = CONST1\n  a = CONST0\nout a\n",
    "circuit c\ngates:\n  a = CONST1\nout a\n",
    "circuit c\ninputs before 1 after 1\ngates:\n  a = NOT b\nout a\n",
])
def test_circuit_errors(text):
    with pytest.raises(DslError):
        parse_circuit(text)


def test_dimacs_basic():
    f = parse_dimacs("c demo\np cnf 2 1\n1 2 0\n")
    assert f.num_vars == 2 and f.clauses == ((1, 2),)


def test_dimacs_empty_formula():
    f = parse_dimacs("p cnf 3 0\n")
    assert f.clauses == ()
    assert all(f.satisfied_by(bits) for bits in itertools.product((0, 1), repeat=3))


@pytest.mark.parametrize("text", [
    "p cnf 2 1\n1 5 0\n",
    "p cnf 2 2\n1 2 0\n",
    "p cnf 2 1\n1 2\n",
    "1 2 0\n",
    "p cnf 2 1\n1 x 0\n",
    "p dnf 2 1\n1 0\n",
])
def test_dimacs_errors(text):
    with pytest.raises(DslError):
        parse_dimacs(text)


def test_dimacs_multiline_clause_and_end_marker():
    f = parse_dimacs("p cnf 3 2\n1 -2\n 3 0 -1 0\n%\n0\n")
    assert f.clauses == ((1, -2, 3), (-1,))
    assert parse_dimacs(print_dimacs(f)) == f


def test_compile_sandcastle(sandcastle):
    compiled = compile_pso_to_circuit(sandcastle)
    assert isinstance(compiled.backend, CircuitBackend)
    for s, s2 in itertools.product(itertools.product((0, 1), repeat=2), repeat=2):
        for a in sandcastle.actions:
            assert transition_prob(compiled, s, a, s2) == transition_prob(sandcastle, s, a, s2)


def test_compile_noop():
    op = PsoOperator("wait", (PsoCase(TRUE, (Outcome(Fraction(1), ()),)),))
    c = compile_operator(op, ("x", "y"))
    for s, s2 in itertools.product(itertools.product((0, 1), repeat=2), repeat=2):
        assert eval_circuit(c, s, s2) == int(s == s2)


def test_compile_rejects_non_dyadic():
    op = PsoOperator("third", (PsoCase(TRUE, (Outcome(Fraction(1, 3), ()), Outcome(Fraction(2, 3), (("x", 1),)))),))
    d = PlanningDomain("t", ("x",), (0,), Var("x"), PsoBackend((op,)))
    with pytest.raises(DslError) as exc:
        compile_pso_to_circuit(d)
    assert "third" in str(exc.value) and "outcome 1" in str(exc.value)


@pytest.mark.parametrize("seed", range(30))
def test_compile_random_domains(seed):
    d = random_pso_domain(random.Random(seed), n_vars=3, n_actions=2)
    c = compile_pso_to_circuit(d)
    states = list(itertools.product((0, 1), repeat=3))
    for s, s2 in itertools.product(states, states):
        for a in d.actions:
            assert transition_prob(c, s, a, s2) == transition_prob(d, s, a, s2)


BUNDLED_DOMAINS = ["sandcastle.ppd", "sandcastle-circuit.ppd"]
BUNDLED_PLANS = ["fig2a.ppl", "fig2b.ppl", "fig2c.ppl", "fig2d.ppl"]


@pytest.mark.parametrize("name", BUNDLED_PLANS)
def test_plan_round_trip(name):
    plan = load_plan(bundled(name))
    text = print_plan(plan)
    assert parse_plan(text) == plan
    assert print_plan(parse_plan(text)) == text


@pytest.mark.parametrize("name", ["erect-castle.ppc", "dig-moat.ppc"])
def test_circuit_round_trip(name):
    c = parse_circuit(bundled(name).read_text())
    text = print_circuit(c)
    assert parse_circuit(text) == c
    assert print_circuit(parse_circuit(text)) == text


def test_pso_domain_round_trip(sandcastle):
    text = print_domain(sandcastle)
    assert parse_domain(text) == sandcastle
    assert print_domain(parse_domain(text)) == text


def test_circuit_domain_round_trip(tmp_path, sandcastle_circuit):
    paths = write_domain(sandcastle_circuit, tmp_path, "copy")
    assert [p.name for p in paths] == ["copy.ppd", "copy.dig-moat.ppc", "copy.erect-castle.ppc"]
    assert load_domain(paths[0]) == sandcastle_circuit


def test_dimacs_round_trip():
    text = bundled("demo.cnf").read_text()
    f = parse_dimacs(text)
    assert parse_dimacs(print_dimacs(f)) == f
