import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from chowlift.errors import NotSpecialLinear, NotUnimodular
from chowlift.intmat import (
    Matrix,
    Transvection,
    det,
    factor_elementary,
    inverse,
    lift_sl,
    span_solve,
    transvection_product,
)
from chowlift.sampling import random_sl


def test_det_examples():
    assert det(Matrix.identity(4)) == 1
    assert det(Matrix([[5, 0], [0, 5]], 6)) == 1
    assert det(Matrix([[0, 1], [1, 0]])) == -1
    with pytest.raises(ValueError):
        det(Matrix([[1, 2, 3]]))


@given(st.lists(st.lists(st.integers(-50, 50), min_size=4, max_size=4), min_size=4, max_size=4),
       st.sampled_from([0, 4, 6, 36, 30]))
def test_det_against_sympy(rows, m):
    expected = sympy.Matrix(rows).det()
    got = det(Matrix(rows, m))
    assert got == (expected % m if m else expected)


def test_factor_examples():
    assert factor_elementary(Matrix.identity(3, 6)) == []
    t = factor_elementary(Matrix([[1, 3], [0, 1]], 6))
    assert t == [Transvection(0, 1, 3)]
    M = Matrix([[5, 0], [0, 5]], 6)
    assert transvection_product(factor_elementary(M), 2, 6) == M
    with pytest.raises(NotSpecialLinear):
        factor_elementary(Matrix([[2, 0], [0, 1]], 6))


def test_lift_examples():
    assert lift_sl(Matrix.identity(3, 6)) == Matrix.identity(3)
    assert lift_sl(Matrix([[1, 1], [0, 1]], 6)) == Matrix([[1, 1], [0, 1]])
    W = lift_sl(Matrix([[5, 0], [0, 5]], 6))
    assert det(W) == 1 and W.reduce(6) == Matrix([[5, 0], [0, 5]], 6)


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(1, 5), st.sampled_from([4, 6, 12, 30, 2, 9]))
def test_factor_replays(seed, n, m):
    M = random_sl(n, m, random.Random(seed))
    ts = factor_elementary(M)
    assert transvection_product(ts, n, m) == M
    assert all(0 <= t.c < m for t in ts)


def test_inverse_mod_composite():
    M = Matrix([[28, 9], [9, 28]], 36)
    assert (M @ inverse(M)).is_identity()
    with pytest.raises(NotUnimodular):
        inverse(Matrix([[2, 0], [0, 1]]))


def test_span_solve():
    gens = [Matrix([[1, 0], [0, 0]], 4), Matrix([[0, 2], [0, 0]], 4)]
    c = span_solve(gens, Matrix([[3, 2], [0, 0]], 4))
    assert c is not None and (c[0] % 4, c[1] % 2) == (3, 1)
    assert span_solve(gens, Matrix([[0, 1], [0, 0]], 4)) is None


def test_zero_column_products_keep_shape():
    D = Matrix.zeros(3, 0, 5)
    C = Matrix.zeros(0, 3, 5)
    assert (D @ C) == Matrix.zeros(3, 3, 5)
