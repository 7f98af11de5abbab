"""Integral motivic decomposability of generalized Severi-Brauer varieties.

Only the arithmetic of the algebra matters: its degree, its index and the
factorization of the index.  ``SB(k, A)`` and ``SB(n - k, A^op)`` are
isomorphic, so ``k`` is normalized to ``min(k, n - k)`` first.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import gcd

import numpy as np

from .errors import InvalidInstance, RangeError
from .modarith import factorize


@dataclass(frozen=True)
class AlgebraSpec:
    degree: int
    index: int

    def __post_init__(self) -> None:
        if self.degree < 1 or self.index < 1:
            raise InvalidInstance("degree and index must be positive")
        if self.degree % self.index:
            raise InvalidInstance(f"index {self.index} does not divide degree {self.degree}")

    @property
    def index_factors(self) -> tuple[tuple[int, int], ...]:
        return factorize(self.index).factors

    @property
    def is_division(self) -> bool:
        return self.index == self.degree


@dataclass(frozen=True)
class SBInstance:
    algebra: AlgebraSpec
    k: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.algebra.degree:
            raise InvalidInstance(f"k = {self.k} outside 1..{self.algebra.degree}")

    @classmethod
    def of(cls, degree: int, index: int, k: int) -> SBInstance:
        return cls(AlgebraSpec(degree, index), k)

    @property
    def normalized_k(self) -> int:
        return min(self.k, self.algebra.degree - self.k)


class Verdict(str, Enum):
    INDECOMPOSABLE = "Indecomposable"
    DECOMPOSABLE = "Decomposable"


# reason codes
POINT = "point"                  # k = n: the variety is a point
NON_DIVISION = "non-division"    # ind < n: decomposable for every k
CLASSICAL = "classical"          # k = 1, division
TWO_PRIMARY = "two-primary"      # k = 2, division, 2-primary index
PRIMARY = "primary"              # k >= 2, division, p-primary index (other cases)
MIXED_INDEX = "mixed-index"      # k >= 2, division, index with two coprime factors


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    reason: str
    k: int

    @property
    def indecomposable(self) -> bool:
        return self.verdict is Verdict.INDECOMPOSABLE

    def __str__(self) -> str:
        return f"{self.verdict.value} ({self.reason})"


def classify(inst: SBInstance) -> Classification:
    n = inst.algebra.degree
    k = inst.normalized_k
    if k == 0:
        # SB(n, A) is a single point: its motive is the unit motive
        return Classification(Verdict.INDECOMPOSABLE, POINT, k)
    if not inst.algebra.is_division:
        return Classification(Verdict.DECOMPOSABLE, NON_DIVISION, k)
    if k == 1:
        return Classification(Verdict.INDECOMPOSABLE, CLASSICAL, k)
    primes = [p for p, _ in inst.algebra.index_factors]
    if len(primes) > 1:
        return Classification(Verdict.DECOMPOSABLE, MIXED_INDEX, k)
    if k == 2 and primes == [2]:
        return Classification(Verdict.INDECOMPOSABLE, TWO_PRIMARY, k)
    assert n > 1
    return Classification(Verdict.DECOMPOSABLE, PRIMARY, k)


# ---------------------------------------------------------------------------
# the dimension count behind the mixed-index case


@dataclass(frozen=True)
class Dims:
    y_l: int
    y_m: int
    z_l: int
    z_m: int
    shift: int


def dims(k: int, l: int, m: int) -> Dims:
    """Dimensions of ``Y_l``, ``Y_m``, ``Z_l``, ``Z_m`` and the shift ``d`` for ``n = l m``."""
    if not 2 <= l < m:
        raise RangeError(f"need 2 <= l < m, got l = {l}, m = {m}")
    if k < 1:
        raise RangeError(f"need k >= 1, got {k}")
    return Dims(
        y_l=l - 1,
        y_m=m - 1,
        z_l=(k - 1) * (l * (m - 1) - k + 1),
        z_m=(k - 1) * (m * (l - 1) - k + 1),
        shift=l * m - l - k + 1,
    )


@dataclass
class SweepReport:
    bound: int
    points: int
    violations: list[tuple[int, int, int]]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return f"{len(self.violations)} violations over {self.points} points (m <= {self.bound})"


def verify_inequalities(bound: int) -> SweepReport:
    """Check ``dim Z_l >= dim Y_m`` and ``dim Z_m - m + l >= dim Y_l``.

    Sweeps all coprime ``2 <= l < m <= bound`` and ``2 <= k <= l m / 2``.
    """
    if bound < 3:
        raise RangeError("sweep bound must be at least 3")
    points = 0
    bad: list[tuple[int, int, int]] = []
    for m in range(3, bound + 1):
        for l in range(2, m):
            if gcd(l, m) != 1:
                continue
            k = np.arange(2, l * m // 2 + 1, dtype=np.int64)
            z_l = (k - 1) * (l * (m - 1) - k + 1)
            z_m = (k - 1) * (m * (l - 1) - k + 1)
            fail = (z_l < m - 1) | (z_m - m + l < l - 1)
            points += k.size
            for kk in k[fail]:
                bad.append((int(kk), l, m))
    return SweepReport(bound, points, bad)
