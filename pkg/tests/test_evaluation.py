import random
from fractions import Fraction

import pytest

from ppeval.core import make_flat_domain
from ppeval.errors import PlanValidationError, SolverCapError
from ppeval.evaluation import (
    DIVERGENT,
    Interpretation,
    eval_acyclic,
    eval_looping,
    eval_partial,
    eval_total_order,
    eval_truncated,
    evaluate,
    expected_action_count,
    format_value,
    meets_threshold,
    simulate,
)
from ppeval.formula import TRUE, Var
from ppeval.plans import (
    AcyclicPlan,
    LoopingPlan,
    PartialOrderPlan,
    TotalOrderPlan,
    as_looping,
    chain_acyclic,
    chain_partial,
)
from oracles import (
    acyclic_value,
    brute_extensions,
    looping_value,
    looping_value_float,
    random_controller,
    random_flat_domain,
    random_poset,
    random_pso_domain,
    random_total_order,
    total_order_value,
)

DIG, ERECT = "dig-moat", "erect-castle"


def test_total_order_examples(sandcastle):
    assert eval_total_order(sandcastle, TotalOrderPlan((DIG, DIG, ERECT))).value == Fraction(7, 16)
    assert eval_total_order(sandcastle, TotalOrderPlan(())).value == 0
    assert eval_total_order(sandcastle, TotalOrderPlan((ERECT,) * 3)).value == 1 - Fraction(3, 4) ** 3


def test_acyclic_examples(sandcastle, figures):
    assert eval_acyclic(sandcastle, figures["fig2b"]).value == Fraction(15, 32)
    assert eval_acyclic(sandcastle, chain_acyclic(TotalOrderPlan((DIG, DIG, ERECT)))).value == Fraction(7, 16)
    single = AcyclicPlan((("q0", ERECT),), "q0", ("l",), ((TRUE, "l"),), ())
    assert eval_acyclic(sandcastle, single).value == Fraction(1, 4)


def test_looping_examples(sandcastle, figures):
    assert eval_looping(sandcastle, figures["fig2d"]).value == 1


def _trap_domain():
    # (won, dead): from (0,0) stay 1/3, win 1/3, die 1/3; dead is absorbing
    rows = {"a": {
        (0, 0): [((0, 0), "1/3"), ((1, 0), "1/3"), ((0, 1), "1/3")],
        (0, 1): [((0, 1), 1)],
        (1, 0): [((1, 0), 1)],
        (1, 1): [((1, 1), 1)],
    }}
    return make_flat_domain("trap", ("won", "dead"), (0, 0), Var("won"), rows)


def _constant(action="a"):
    return LoopingPlan((("q", action),), "q", ("l",), ((TRUE, "l"),), (("q", "l", "q"),))


def test_single_state_loop():
    assert eval_looping(_trap_domain(), _constant()).value == Fraction(1, 2)


def test_goal_unreachable_is_zero():
    rows = {"a": {(0,): [((0,), 1)], (1,): [((1,), 1)]}}
    d = make_flat_domain("stuck", ("g",), (0,), Var("g"), rows)
    assert eval_looping(d, _constant()).value == 0
    assert expected_action_count(d, _constant(), "a") == DIVERGENT


def test_initial_goal_is_one():
    rows = {"a": {(0,): [((0,), 1)], (1,): [((0,), 1)]}}
    d = make_flat_domain("done", ("g",), (1,), Var("g"), rows)
    assert eval_total_order(d, TotalOrderPlan(("a",))).value == 1
    assert eval_looping(d, _constant()).value == 1
    assert eval_acyclic(d, chain_acyclic(TotalOrderPlan(()))).value == 1
    assert eval_partial(d, PartialOrderPlan((), ())).value == 1


def test_partial_interpretations(sandcastle, figures):
    poset = figures["fig2c"]
    opt = eval_partial(sandcastle, poset, Interpretation.OPTIMISTIC)
    pes = eval_partial(sandcastle, poset, Interpretation.PESSIMISTIC)
    avg = eval_partial(sandcastle, poset, Interpretation.AVERAGE)
    assert opt.value == Fraction(43, 64) and opt.witness.steps == (DIG, DIG, ERECT, DIG, ERECT)
    assert pes.value == Fraction(21, 32) and pes.witness.steps == (DIG, DIG, DIG, ERECT, ERECT)
    assert avg.value == Fraction(85, 128) and avg.extensions == 2


def test_chain_poset_interpretations_agree(sandcastle):
    plan = TotalOrderPlan((DIG, ERECT, DIG, ERECT))
    want = eval_total_order(sandcastle, plan).value
    for interp in Interpretation:
        assert eval_partial(sandcastle, chain_partial(plan), interp).value == want


def test_average_counts_multiplicity(sandcastle):
    # antichain {dig, dig, erect}: 6 extensions, 3 distinct sequences each twice
    poset = PartialOrderPlan((("a", DIG), ("b", DIG), ("c", ERECT)), ())
    seqs = [(DIG, DIG, ERECT), (DIG, ERECT, DIG), (ERECT, DIG, DIG)]
    want = sum(eval_total_order(sandcastle, TotalOrderPlan(s)).value for s in seqs) / 3
    assert eval_partial(sandcastle, poset, "average").value == want


def test_expected_counts(sandcastle, figures):
    assert expected_action_count(sandcastle, figures["fig2b"], DIG) == Fraction(7, 4)
    assert expected_action_count(sandcastle, TotalOrderPlan((DIG, DIG, ERECT)), DIG) == 2
    assert expected_action_count(sandcastle, figures["fig2d"], DIG) == 3
    assert expected_action_count(sandcastle, figures["fig2b"], ERECT) == 1


def test_expected_count_trap():
    # retrying forever in the dead state never stops
    assert expected_action_count(_trap_domain(), _constant(), "a") == DIVERGENT
    # stopping on "dead" leaves a geometric number of tries: 1 / (1 - 1/3)
    plan = LoopingPlan((("q", "a"),), "q", ("stop", "l"), ((Var("dead"), "stop"), (TRUE, "l")), (("q", "l", "q"),))
    assert expected_action_count(_trap_domain(), plan, "a") == Fraction(3, 2)
    assert eval_looping(_trap_domain(), plan).value == Fraction(1, 2)


@pytest.mark.parametrize("value, theta, want", [
    (Fraction(1, 2), "1/2", True), (Fraction(7, 16), "0.4375", True), (Fraction(7, 16), "0.44", False),
])
def test_meets_threshold(value, theta, want):
    assert meets_threshold(value, theta) is want


def test_meets_threshold_range():
    with pytest.raises(ValueError):
        meets_threshold(Fraction(1, 2), "3/2")


def test_format_value():
    assert format_value(Fraction(7, 16)) == "7/16 0.437500"
    assert format_value(Fraction(1, 3)) == "1/3 0.333333"
    assert format_value(Fraction(2, 3)) == "2/3 0.666667"


def test_invalid_plan_raises(sandcastle):
    with pytest.raises(PlanValidationError):
        eval_total_order(sandcastle, TotalOrderPlan(("fly",)))


def test_solver_cap(sandcastle, figures):
    with pytest.raises(SolverCapError):
        eval_looping(sandcastle, figures["fig2d"], cap=1)


def test_truncation_monotone(sandcastle, figures):
    plan = figures["fig2d"]
    exact = eval_looping(sandcastle, plan).value
    values = [eval_truncated(sandcastle, plan, h) for h in (1, 2, 4, 8, 16)]
    assert values == sorted(values)
    assert all(v <= exact for v in values)
    assert values[-1] > Fraction(9, 10)
    assert 1 - values[-1] < (1 - values[-2]) / 2


def test_dispatch(sandcastle, figures):
    assert evaluate(sandcastle, figures["fig2a"]).value == Fraction(7, 16)
    assert evaluate(sandcastle, figures["fig2c"], "pessimistic").value == Fraction(21, 32)


def test_simulate_deterministic(sandcastle, figures):
    a = simulate(sandcastle, figures["fig2b"], 2000, seed=5)
    assert a == simulate(sandcastle, figures["fig2b"], 2000, seed=5)
    assert abs(a / 2000 - 15 / 32) < 0.05


# ---------------------------------------------------------------- random oracles

def _domains(seed):
    rng = random.Random(seed)
    return rng, [random_pso_domain(rng, n_vars=3, n_actions=2), random_flat_domain(rng, n_vars=2, n_actions=2)]


@pytest.mark.parametrize("seed", range(20))
def test_total_order_matches_dense(seed):
    rng, domains = _domains(seed)
    for d in domains:
        plan = random_total_order(rng, d)
        assert eval_total_order(d, plan).value == total_order_value(d, plan.steps)


@pytest.mark.parametrize("seed", range(20))
def test_acyclic_matches_path_tree(seed):
    rng, domains = _domains(seed)
    for d in domains:
        plan = random_controller(rng, d, rng.randint(1, 5), looping=False)
        value = eval_acyclic(d, plan).value
        assert value == acyclic_value(d, plan)
        assert eval_looping(d, as_looping(plan)).value == value
        assert 0 <= value <= 1


@pytest.mark.parametrize("seed", range(20))
def test_looping_matches_sympy(seed):
    rng, domains = _domains(seed)
    for d in domains:
        plan = random_controller(rng, d, rng.randint(1, 4), looping=True)
        value = eval_looping(d, plan).value
        assert value == looping_value(d, plan)
        assert abs(float(value) - looping_value_float(d, plan)) < 1e-6


@pytest.mark.parametrize("seed", range(10))
def test_truncation_bounded_by_exact(seed):
    rng, domains = _domains(seed)
    for d in domains:
        plan = random_controller(rng, d, rng.randint(1, 3), looping=True)
        exact = eval_looping(d, plan).value
        previous = Fraction(0)
        for h in (1, 2, 4, 8, 16):
            v = eval_truncated(d, plan, h)
            assert previous <= v <= exact
            previous = v


@pytest.mark.parametrize("seed", range(15))
def test_partial_average_matches_permutations(seed):
    rng, domains = _domains(seed)
    d = domains[0]
    plan = random_poset(rng, d, rng.randint(1, 6))
    act = plan.action_of
    values = [total_order_value(d, [act[n] for n in perm]) for perm in brute_extensions(plan)]
    avg = eval_partial(d, plan, "average").value
    assert avg == sum(values, Fraction(0)) / len(values)
    assert eval_partial(d, plan, "optimistic").value == max(values)
    assert eval_partial(d, plan, "pessimistic").value == min(values)
