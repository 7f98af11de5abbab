"""Random instances for self-checks and property tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .intmat import Matrix, Transvection, inverse, transvection_product
from .lifting import DecompositionSpec
from .modarith import factorize
from .motive import RationalStructure, SplitMotiveSpace


def random_sl(n: int, m: int, rng: random.Random, steps: int | None = None) -> Matrix:
    """A random element of ``SL_n(Z/m)`` (``m = 0``: of ``SL_n(Z)``) as a transvection product."""
    if n == 1:
        return Matrix.identity(1, m)
    steps = steps if steps is not None else 3 * n
    ts = []
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randrange(1, m) if m else rng.randint(-3, 3)
        ts.append(Transvection(i, j, c))
    return transvection_product(ts, n, m)


def random_graded_sl(space: SplitMotiveSpace, rng: random.Random) -> Matrix:
    """Integral basis change preserving codimension, with determinant 1 on every block."""
    n = space.rank
    rows = [[0] * n for _ in range(n)]
    for idx in space.blocks.values():
        g = random_sl(len(idx), 0, rng, steps=2 * len(idx))
        for a, i in enumerate(idx):
            for b, k in enumerate(idx):
                rows[i][k] = g.rows[a][b]
    return Matrix(rows)


def random_space(rng: random.Random, max_rank: int = 8, max_twist: int = 3) -> SplitMotiveSpace:
    n = rng.randint(1, max_rank)
    codims = tuple(sorted(rng.randint(0, max_twist) for _ in range(n)))
    return SplitMotiveSpace(codims, max(codims))


@dataclass
class SplitInstance:
    space: SplitMotiveSpace
    structure: RationalStructure
    decomposition: DecompositionSpec   # integral

    def per_prime(self) -> dict[int, DecompositionSpec]:
        return {p: self.decomposition.reduce(p) for p in factorize(self.structure.transfer_degree).primes}


def random_split_instance(rng: random.Random, m: int, max_rank: int = 8) -> SplitInstance:
    """Random integral decomposition of the identity on a random split space.

    Parts are ``g diag(1_I) g^-1`` for a graded ``g`` in ``SL_N(Z)`` and a random
    assignment of basis vectors to parts.  The declared rational span
    modulo each prime power of ``m`` is the (commutative) algebra spanned by
    the rank-one projectors ``g E_ii g^-1``.
    """
    space = random_space(rng, max_rank)
    n = space.rank
    g = random_graded_sl(space, rng)
    g_inv = inverse(g)
    k = rng.randint(1, min(n, 4))
    owner = [rng.randrange(k) for _ in range(n)]
    used = sorted(set(owner))
    parts = []
    for j in used:
        d = Matrix.diag([int(o == j) for o in owner])
        parts.append(g @ d @ g_inv)
    atoms = [g @ Matrix.diag([int(i == a) for i in range(n)]) @ g_inv for a in range(n)]
    spans = {p**a: tuple(atoms) for p, a in factorize(m).factors}
    structure = RationalStructure(m, (), spans)
    dec = DecompositionSpec(Matrix.identity(n), tuple(parts)).with_shapes(space)
    return SplitInstance(space, structure, dec)


def random_projector_family(n: int, k: int, q: int, rng: random.Random) -> list[Matrix]:
    """``k`` orthogonal projectors over Z/q summing to the identity (conjugated diagonals)."""
    g = random_sl(n, q, rng)
    g_inv = inverse(g)
    owner = [rng.randrange(k) for _ in range(n)]
    return [g @ Matrix.diag([int(o == j) for o in owner], q) @ g_inv for j in range(k)]


def random_approx_idempotent(n: int, p: int, alpha: int, rng: random.Random) -> Matrix:
    """Over Z/p^alpha: an idempotent modulo ``p`` perturbed by a random multiple of ``p``."""
    q = p**alpha
    e = random_projector_family(n, 2, q, rng)[0]
    noise = Matrix([[p * rng.randrange(q) for _ in range(n)] for _ in range(n)], q)
    return e + noise


def random_inverse_pair(n: int, p: int, l: int, rng: random.Random) -> tuple[Matrix, Matrix]:
    """``alpha`` invertible over Z/p^l and ``beta`` an inverse of it modulo ``p`` only."""
    q = p**l
    alpha = random_sl(n, q, rng)
    exact = inverse(alpha)
    noise = Matrix([[p * rng.randrange(q) for _ in range(n)] for _ in range(n)], q)
    return alpha, exact + noise
