import itertools

import pytest
from hypothesis import given, strategies as st

from ppeval.errors import DslError
from ppeval.formula import (
    FALSE,
    TRUE,
    And,
    Not,
    Or,
    Var,
    compile_formula,
    format_formula,
    formula_vars,
    parse_formula,
)
from oracles import holds

VARS = ("a", "b", "c")


def formulas(depth=3):
    leaf = st.one_of(st.sampled_from([TRUE, FALSE]), st.sampled_from(VARS).map(Var))
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            inner.map(Not),
            st.lists(inner, min_size=2, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(inner, min_size=2, max_size=3).map(lambda xs: Or(tuple(xs))),
        ),
        max_leaves=8,
    )


def test_precedence():
    assert parse_formula("a | b & !c") == Or((Var("a"), And((Var("b"), Not(Var("c"))))))
    assert parse_formula("(a | b) & c") == And((Or((Var("a"), Var("b"))), Var("c")))


def test_flattening():
    assert parse_formula("a & (b & c)") == And((Var("a"), Var("b"), Var("c")))


def test_constants():
    assert parse_formula("true") == TRUE
    assert parse_formula("false") == FALSE


@pytest.mark.parametrize("text", ["", "a &", "(a", "a b", "!", "a | | b", "a)"])
def test_syntax_errors(text):
    with pytest.raises(DslError):
        parse_formula(text)


def test_error_column():
    with pytest.raises(DslError) as exc:
        parse_formula("a & & b", line=7)
    assert exc.value.line == 7
    assert exc.value.column == 5


def test_vars():
    assert formula_vars(parse_formula("a & !(b | a)")) == {"a", "b"}


def test_compile_undeclared():
    with pytest.raises(KeyError):
        compile_formula(Var("zz"), VARS)


@given(formulas())
def test_round_trip(f):
    # printing then parsing gives a formula with the same truth table
    g = parse_formula(format_formula(f))
    assert parse_formula(format_formula(g)) == g
    for s in itertools.product((0, 1), repeat=3):
        assert holds(f, VARS, s) == holds(g, VARS, s)


@given(formulas())
def test_compile_matches_reference(f):
    test = compile_formula(f, VARS)
    for s in itertools.product((0, 1), repeat=3):
        assert test(s) == holds(f, VARS, s)
