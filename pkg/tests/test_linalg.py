from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ppeval.linalg import SingularMatrixError, solve

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def test_small_system():
    a = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    assert solve(a, [Fraction(3), Fraction(5)]) == [Fraction(4, 5), Fraction(7, 5)]


def test_needs_pivoting():
    a = [[0, 1], [1, 0]]
    assert solve(a, [2, 3]) == [3, 2]


def test_singular():
    with pytest.raises(SingularMatrixError):
        solve([[1, 2], [2, 4]], [1, 2])


def test_shape_checks():
    assert solve([], []) == []
    with pytest.raises(ValueError):
        solve([[1, 2]], [1])


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(small, min_size=n, max_size=n))))
def test_matches_sympy(system):
    a, b = system
    m = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in a])
    if m.det() == 0:
        with pytest.raises(SingularMatrixError):
            solve(a, b)
        return
    x = solve(a, b)
    want = m.LUsolve(sympy.Matrix([sympy.Rational(v.numerator, v.denominator) for v in b]))
    assert [Fraction(int(w.p), int(w.q)) for w in want] == x
