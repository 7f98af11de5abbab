import pytest
from hypothesis import given, strategies as st

from chowlift.errors import NotAUnit
from chowlift.modarith import crt_combine, factorize, inverse_mod, valuation


def test_factorize_examples():
    assert factorize(6).factors == ((2, 1), (3, 1))
    assert factorize(1).factors == ()
    assert factorize(36).factors == ((2, 2), (3, 2))
    with pytest.raises(ValueError):
        factorize(0)


@given(st.integers(1, 10**6))
def test_factorize_multiplies_back(m):
    fac = factorize(m)
    prod = 1
    for p, a in fac.factors:
        prod *= p**a
    assert prod == m
    assert [p for p, _ in fac.factors] == sorted({p for p, _ in fac.factors})
    assert factorize(prod).factors == fac.factors


def _scan(residues):
    M = 1
    for _, n in residues:
        M *= n
    return next(r for r in range(M) if all(r % n == v for v, n in residues))


def test_crt_examples():
    assert crt_combine([(0, 2), (1, 3)]) == (4, 6)
    assert crt_combine([(1, 4), (2, 9)]) == (29, 36)
    assert crt_combine([(0, 7)]) == (0, 7)
    with pytest.raises(ValueError):
        crt_combine([(1, 4), (1, 6)])


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 4, 9, 25, 8]), min_size=1, max_size=3, unique=True), st.data())
def test_crt_matches_scan(moduli, data):
    from math import gcd

    coprime = all(gcd(a, b) == 1 for i, a in enumerate(moduli) for b in moduli[i + 1:])
    residues = [(data.draw(st.integers(0, n - 1)), n) for n in moduli]
    if not coprime:
        with pytest.raises(ValueError):
            crt_combine(residues)
        return
    r, M = crt_combine(residues)
    if M <= 10**4:
        assert r == _scan(residues)
    assert all(r % n == v for v, n in residues) and 0 <= r < M


def test_inverse_mod():
    assert inverse_mod(5, 6) == 5
    assert inverse_mod(1, 17) == 1
    with pytest.raises(NotAUnit):
        inverse_mod(2, 4)


def test_valuation():
    assert valuation(36, 2) == 2
    assert valuation(7, 3) == 0
