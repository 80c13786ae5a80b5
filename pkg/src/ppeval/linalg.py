"""Exact dense linear solve over the rationals.

Rows are scaled to integers and reduced with Bareiss' fraction-free
elimination, so every intermediate stays an integer and every division in
the forward pass is exact.  Only back substitution produces Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


class SingularMatrixError(ArithmeticError):
    pass


def _integer_rows(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[list[int]]:
    rows = []
    for row, rhs in zip(a, b):
        entries = list(row) + [rhs]
        scale = lcm(*(Fraction(x).denominator for x in entries))
        rows.append([int(Fraction(x) * scale) for x in entries])
    return rows


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``a x = b`` exactly; ``a`` must be square and nonsingular."""
    n = len(a)
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("solve expects a square system")
    if n == 0:
        return []
    m = _integer_rows(a, b)
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"no pivot in column {k}")
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
        pk = m[k]
        akk = pk[k]
        for i in range(k + 1, n):
            ri = m[i]
            aik = ri[k]
            if aik == 0:
                # Bareiss keeps the invariant that row i is scaled by akk/prev
                if akk != prev:
                    for j in range(k + 1, n + 1):
                        ri[j] = ri[j] * akk // prev
                continue
            for j in range(k + 1, n + 1):
                ri[j] = (akk * ri[j] - aik * pk[j]) // prev
            ri[k] = 0
        prev = akk
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        row = m[i]
        acc = Fraction(row[n])
        for j in range(i + 1, n):
            if row[j]:
                acc -= row[j] * x[j]
        x[i] = acc / row[i]
    return x
