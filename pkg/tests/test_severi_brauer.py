import random

import pytest
import sympy
from hypothesis import given, strategies as st

from chowlift.errors import InvalidInstance, RangeError
from chowlift.severi_brauer import AlgebraSpec, SBInstance, Verdict, classify, dims, verify_inequalities


@pytest.mark.parametrize("n,ind,k,verdict,reason", [
    (12, 12, 1, "Indecomposable", "classical"),
    (8, 8, 2, "Indecomposable", "two-primary"),
    (6, 6, 2, "Decomposable", "mixed-index"),
    (9, 3, 3, "Decomposable", "non-division"),
    (9, 9, 2, "Decomposable", "primary"),
    (8, 8, 3, "Decomposable", "primary"),
    (12, 12, 11, "Indecomposable", "classical"),
])
def test_classification_examples(n, ind, k, verdict, reason):
    c = classify(SBInstance.of(n, ind, k))
    assert c.verdict.value == verdict
    assert c.reason == reason


def test_point_case():
    c = classify(SBInstance.of(5, 5, 5))
    assert c.verdict is Verdict.INDECOMPOSABLE and c.k == 0


def test_invalid_algebras():
    with pytest.raises(InvalidInstance):
        AlgebraSpec(6, 4)
    with pytest.raises(InvalidInstance):
        AlgebraSpec(0, 1)
    with pytest.raises(InvalidInstance):
        SBInstance.of(6, 6, 7)


@given(st.integers(2, 80).flatmap(
    lambda n: st.tuples(st.just(n), st.sampled_from(sympy.divisors(n)), st.integers(1, n - 1))))
def test_opposite_algebra_symmetry(args):
    n, ind, k = args
    assert classify(SBInstance.of(n, ind, k)).verdict == classify(SBInstance.of(n, ind, n - k)).verdict


def test_dims_examples():
    # n = 6 = 2 * 3, k = 2
    d = dims(2, 2, 3)
    assert (d.y_l, d.y_m) == (1, 2)
    assert d.z_l == 1 * (2 * 2 - 1)
    assert d.z_m == 1 * (3 * 1 - 1)
    assert d.shift == 6 - 2 - 2 + 1
    with pytest.raises(RangeError):
        dims(2, 3, 3)
    with pytest.raises(RangeError):
        dims(0, 2, 3)


def test_sweep_examples():
    r = verify_inequalities(3)
    # only (l, m) = (2, 3) with k in {2, 3}
    assert r.points == 2 and r.ok
    assert verify_inequalities(50).ok
    with pytest.raises(RangeError):
        verify_inequalities(2)


def test_sweep_matches_scalar_dims():
    rng = random.Random(4)
    for _ in range(300):
        m = rng.randint(3, 40)
        l = rng.randint(2, m - 1)
        k = rng.randint(2, max(2, l * m // 2))
        d = dims(k, l, m)
        assert d.z_l >= d.y_m and d.z_m - m + l >= d.y_l
