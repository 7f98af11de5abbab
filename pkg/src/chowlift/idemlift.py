"""Lifting idempotents and orthogonal idempotent families through nil ideals.

Everything here works inside a matrix ring ``A`` (over Z or Z/m) together with
a two-sided ideal ``K`` with ``K^nu = 0``.  The quotient ``A/K`` is never
built explicitly: its elements are represented by arbitrary preimages and
compared modulo ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable, Sequence

from .errors import (
    InputsNotOrthogonal,
    ModulusMismatch,
    NoConvergence,
    NotAProjector,
    NotApproxIdempotent,
)
from .intmat import Matrix, SpanSolver


@dataclass(frozen=True)
class NilIdealSpec:
    """A nilpotent two-sided ideal ``K`` of a matrix ring.

    Either ``scalar`` is set, and ``K = scalar * M_n(R)``, or ``K`` is the
    module spanned by ``generators``; with neither, ``K = 0``.
    ``nilpotency`` is a bound ``nu`` with ``K^nu = 0``.
    """

    modulus: int
    nilpotency: int
    generators: tuple[Matrix, ...] = ()
    scalar: int = 0

    def __post_init__(self) -> None:
        if self.nilpotency < 1:
            raise ValueError("nilpotency bound must be >= 1")
        if self.scalar and self.generators:
            raise ValueError("give either a scalar ideal or generators, not both")
        for g in self.generators:
            if g.modulus != self.modulus:
                raise ModulusMismatch("ideal generator in the wrong ring")

    @classmethod
    def zero(cls, modulus: int = 0) -> NilIdealSpec:
        return cls(modulus=modulus, nilpotency=1)

    @classmethod
    def reduction(cls, p: int, alpha: int) -> NilIdealSpec:
        """Kernel of ``M_n(Z/p^alpha) -> M_n(Z/p)``."""
        return cls(modulus=p**alpha, nilpotency=alpha, scalar=p)

    @classmethod
    def from_generators(cls, generators: Sequence[Matrix], nilpotency: int,
                        ring_span: Sequence[Matrix] = ()) -> NilIdealSpec:
        if not generators:
            raise ValueError("use NilIdealSpec.zero() for the zero ideal")
        spec = cls(modulus=generators[0].modulus, nilpotency=nilpotency,
                   generators=tuple(generators))
        spec.validate(ring_span)
        return spec

    @property
    def is_zero(self) -> bool:
        return not self.scalar and not self.generators

    @property
    def quotient_modulus(self) -> int:
        """Modulus in which quotient elements may be given (scalar ideals only)."""
        if self.scalar and self.modulus:
            return math.gcd(self.scalar, self.modulus)
        return self.modulus

    @cached_property
    def _solver(self) -> SpanSolver:
        return SpanSolver([list(g.entries()) for g in self.generators], self.modulus)

    def contains(self, x: Matrix) -> bool:
        if x.modulus != self.modulus:
            raise ModulusMismatch(f"element mod {x.modulus} vs ideal mod {self.modulus}")
        if self.scalar:
            d = self.quotient_modulus if self.modulus else self.scalar
            return all(v % d == 0 for v in x.entries())
        if self.generators:
            return self._solver.contains(list(x.entries()))
        return x.is_zero()

    def validate(self, ring_span: Sequence[Matrix] = ()) -> None:
        """Check ``K^nu = 0`` on generator products and two-sided closure."""
        if self.scalar:
            if self.modulus and pow(self.scalar, self.nilpotency, self.modulus) != 0:
                raise ValueError(f"{self.scalar}^{self.nilpotency} is not 0 modulo {self.modulus}")
            if not self.modulus:
                raise ValueError("a scalar ideal of Z-matrices is never nilpotent")
            return
        for word in product(self.generators, repeat=self.nilpotency):
            acc = word[0]
            for g in word[1:]:
                acc = acc @ g
            if not acc.is_zero():
                raise ValueError(f"a product of {self.nilpotency} generators is nonzero")
        for r in ring_span:
            for g in self.generators:
                if not (self.contains(r @ g) and self.contains(g @ r)):
                    raise ValueError("generators do not span a two-sided ideal")


def _max_newton_steps(nilpotency: int) -> int:
    return math.ceil(math.log2(nilpotency)) + 1 if nilpotency > 1 else 1


def newton_trace(x: Matrix, kernel: NilIdealSpec) -> list[Matrix]:
    """Iterates of ``y -> 3y^2 - 2y^3`` from ``x`` until an exact idempotent.

    Each step squares the defect ``y^2 - y`` inside ``K``, so at most
    ``ceil(log2 nu)`` steps are needed once ``x^2 - x`` lies in ``K``.
    """
    if not x.is_square:
        raise ValueError("idempotent lifting needs a square matrix")
    sq = x @ x
    if not kernel.contains(sq - x):
        raise NotApproxIdempotent("x^2 - x is not in the kernel ideal")
    trace = [x]
    y = x
    for _ in range(_max_newton_steps(kernel.nilpotency)):
        if sq == y:
            return trace
        y = sq.scale(3) - (sq @ y).scale(2)
        trace.append(y)
        sq = y @ y
    if sq == y:
        return trace
    raise NoConvergence(
        f"no idempotent after {len(trace) - 1} steps; the nilpotency bound "
        f"{kernel.nilpotency} is violated"
    )


def newton_idempotent(x: Matrix, kernel: NilIdealSpec) -> Matrix:
    """The unique idempotent polynomial in ``x`` congruent to ``x`` modulo ``K``."""
    return newton_trace(x, kernel)[-1]


def _embed(y: Matrix, target_modulus: int) -> Matrix:
    if y.modulus == target_modulus:
        return y
    if target_modulus == 0 or (y.modulus and target_modulus % y.modulus == 0):
        return y.with_modulus(target_modulus)
    raise ModulusMismatch(f"cannot lift from modulo {y.modulus} to modulo {target_modulus}")


def lift_orthogonal_family(
    x: Matrix,
    images: Sequence[Matrix],
    kernel: NilIdealSpec,
    lift: Callable[[Matrix], Matrix] | None = None,
) -> list[Matrix]:
    """Lift a decomposition ``f(x) = y_1 + ... + y_k`` to ``x = x_1 + ... + x_k``.

    ``images`` are given either in the ring of ``x`` (as representatives
    modulo ``K``) or in a quotient ring when ``K`` is a reduction kernel;
    ``lift`` overrides how they are carried into the ring of ``x``.
    Each ``y_j`` is lifted inside the corner ring of what is left of ``x``,
    made idempotent with :func:`newton_idempotent`, and split off; the
    last part is the remaining complement.
    """
    if not x.is_idempotent():
        raise NotAProjector("the ambient element is not a projector")
    if not images:
        raise ValueError("need at least one image")
    carry = lift or (lambda y: _embed(y, x.modulus))
    reps = [carry(y) for y in images]
    for y in reps:
        if not kernel.contains(y @ y - y):
            raise NotApproxIdempotent("an image is not idempotent in the quotient")
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            if i != j and not kernel.contains(a @ b):
                raise InputsNotOrthogonal(f"images {i} and {j} are not orthogonal")
    total = reps[0]
    for y in reps[1:]:
        total = total + y
    if not kernel.contains(total - x):
        raise InputsNotOrthogonal("images do not sum to the image of x")

    parts = []
    rest = x
    for y in reps[:-1]:
        e = newton_idempotent(rest @ y @ rest, kernel)
        parts.append(e)
        rest = rest - e
    parts.append(rest)
    return parts
