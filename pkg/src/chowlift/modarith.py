"""Exact modular arithmetic: factorization, CRT recombination, inverses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .errors import NotAUnit


@dataclass(frozen=True)
class ModulusFactorization:
    m: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"modulus must be positive, got {self.m}")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise ValueError("primes must be strictly increasing")
        if any(a < 1 or not is_prime(p) for p, a in self.factors):
            raise ValueError(f"bad factor list {self.factors}")
        if math.prod(p**a for p, a in self.factors) != self.m:
            raise ValueError(f"factors {self.factors} do not multiply to {self.m}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def prime_powers(self) -> tuple[int, ...]:
        return tuple(p**a for p, a in self.factors)

    def exponent(self, p: int) -> int:
        """Valuation of ``m`` at ``p`` (0 when ``p`` does not divide ``m``)."""
        return dict(self.factors).get(p, 0)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(m: int) -> ModulusFactorization:
    """Trial-division factorization; moduli here are small Galois degrees."""
    if m < 1:
        raise ValueError(f"cannot factorize {m}")
    factors = []
    n, d = m, 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            factors.append((d, a))
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return ModulusFactorization(m, tuple(factors))


def valuation(a: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if a == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) = s*a + t*b and g >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def inverse_mod(a: int, m: int) -> int:
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    g, s, _ = xgcd(a % m, m)
    if g != 1:
        raise NotAUnit(f"{a} is not invertible modulo {m} (gcd {g})")
    return s % m


def crt_combine(residues: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``(value, modulus)`` pairs with pairwise coprime moduli.

    Returns ``(r, M)`` where ``M`` is the product of the moduli and
    ``0 <= r < M`` is the unique residue congruent to every input.

    >>> crt_combine([(0, 2), (1, 3)])
    (4, 6)
    """
    residues = list(residues)
    moduli = [n for _, n in residues]
    if any(n < 1 for n in moduli):
        raise ValueError(f"moduli must be positive: {moduli}")
    for i, a in enumerate(moduli):
        for b in moduli[i + 1:]:
            if math.gcd(a, b) != 1:
                raise ValueError(f"moduli {a} and {b} are not coprime")
    r, M = 0, 1
    for value, n in residues:
        # r' = r + M * t with r + M t = value (mod n)
        t = ((value - r) * inverse_mod(M, n)) % n
        r, M = r + M * t, M * n
    return r % M, M


def crt_vector(parts: Sequence[tuple[Sequence[int], int]]) -> list[int]:
    """Entrywise CRT of equal-length integer vectors."""
    if not parts:
        raise ValueError("nothing to combine")
    length = len(parts[0][0])
    return [crt_combine([(vec[i] % n, n) for vec, n in parts])[0] for i in range(length)]


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)
