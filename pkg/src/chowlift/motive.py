"""Split motives as linear algebra.

Conventions.  A :class:`SplitMotiveSpace` has basis cells ``e_1..e_N`` with a
codimension (the Tate twist of the cell) and a Poincare-dual family
``e*_1..e*_N`` with ``deg(e_i . e*_j) = delta_ij``.  A correspondence is stored
through its realization: the N x N matrix of ``alpha_*`` acting on coordinates
in the dual basis.  With this choice

* ``a x b`` (``a`` in e-coordinates, ``b`` in e*-coordinates) realizes as the
  outer product ``b a^T``;
* ``sum e_i x e*_i`` realizes as the identity;
* composition of correspondences is the matrix product.

A finite group acts through integer matrices ``g`` on dual coordinates; its
action on correspondences is conjugation ``alpha_* -> g alpha_* g^-1`` (the
first tensor factor transforms by ``g^-T``, which keeps the pairing fixed).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    MissingSpanningSet,
    ModulusMismatch,
    NotAProjector,
    NotGraded,
    NotSplit,
)
from .intmat import (
    Matrix,
    SpanSolver,
    det,
    integer_image_basis,
    inverse,
    local_image_basis,
    rank_mod_p,
)
from .modarith import crt_vector, factorize


# ---------------------------------------------------------------------------
# Tate shapes


@dataclass(frozen=True, order=True)
class TateShape:
    """A finite multiset of Tate twists, stored as sorted ``(twist, multiplicity)``."""

    counts: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        twists = [t for t, _ in self.counts]
        if twists != sorted(set(twists)):
            raise ValueError(f"twists must be strictly increasing: {twists}")
        if any(c < 1 for _, c in self.counts):
            raise ValueError("multiplicities must be positive")

    @classmethod
    def of(cls, twists: Iterable[int]) -> TateShape:
        return cls(tuple(sorted(Counter(twists).items())))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> TateShape:
        return cls(tuple(sorted((t, c) for t, c in counts.items() if c)))

    @property
    def cells(self) -> tuple[int, ...]:
        return tuple(t for t, c in self.counts for _ in range(c))

    @property
    def size(self) -> int:
        return sum(c for _, c in self.counts)

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return bool(self.counts)

    def multiplicity(self, twist: int) -> int:
        return dict(self.counts).get(twist, 0)

    @property
    def min_twist(self) -> int:
        return self.counts[0][0]

    @property
    def max_twist(self) -> int:
        return self.counts[-1][0]

    def shift(self, s: int) -> TateShape:
        return TateShape(tuple((t + s, c) for t, c in self.counts))

    def as_counter(self) -> Counter:
        return Counter(dict(self.counts))

    def __add__(self, other: TateShape) -> TateShape:
        return TateShape.from_counts(self.as_counter() + other.as_counter())

    def __sub__(self, other: TateShape) -> TateShape:
        if not other.fits_in(self):
            raise ValueError(f"{other} is not contained in {self}")
        return TateShape.from_counts(self.as_counter() - other.as_counter())

    def fits_in(self, other: TateShape) -> bool:
        outer = dict(other.counts)
        return all(outer.get(t, 0) >= c for t, c in self.counts)

    def __str__(self) -> str:
        return "{" + ",".join(f"{t}^{c}" if c > 1 else str(t) for t, c in self.counts) + "}"


# ---------------------------------------------------------------------------
# spaces and correspondences


@dataclass(frozen=True)
class SplitMotiveSpace:
    codims: tuple[int, ...]
    dim: int
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.codims):
            raise ValueError("codimensions must be non-negative")
        if self.codims and self.dim < max(self.codims):
            raise ValueError(f"dimension {self.dim} below the top codimension {max(self.codims)}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(len(self.codims))))
        if len(self.labels) != len(self.codims):
            raise ValueError("one label per basis cell")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate basis labels")

    @property
    def rank(self) -> int:
        return len(self.codims)

    def dual_codim(self, i: int) -> int:
        return self.dim - self.codims[i]

    @cached_property
    def blocks(self) -> dict[int, tuple[int, ...]]:
        """Basis indices grouped by codimension, in increasing twist order."""
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.codims):
            out.setdefault(c, []).append(i)
        return {t: tuple(out[t]) for t in sorted(out)}

    def total_shape(self) -> TateShape:
        return TateShape.of(self.codims)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def identity(self, modulus: int = 0) -> Matrix:
        return Matrix.identity(self.rank, modulus)

    def cell_projector(self, indices: Iterable[int], modulus: int = 0) -> Matrix:
        chosen = set(indices)
        return Matrix.diag([int(i in chosen) for i in range(self.rank)], modulus)

    def is_graded(self, M: Matrix) -> bool:
        c = self.codims
        return all(x == 0 or c[i] == c[j] for i, r in enumerate(M.rows) for j, x in enumerate(r))


@dataclass(frozen=True)
class Correspondence:
    """A correspondence through its realization matrix (``modulus 0`` is Z)."""

    matrix: Matrix

    @property
    def modulus(self) -> int:
        return self.matrix.modulus

    @classmethod
    def rank_one(cls, a: Sequence[int], b: Sequence[int], modulus: int = 0) -> Correspondence:
        """``a x b`` with ``a`` in e-coordinates and ``b`` in e*-coordinates."""
        return cls(Matrix([[bi * aj for aj in a] for bi in b], modulus))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Sequence[int], Sequence[int]]], n: int,
                   modulus: int = 0) -> Correspondence:
        acc = Matrix.zeros(n, n, modulus)
        for a, b in terms:
            acc = acc + cls.rank_one(a, b, modulus).matrix
        return cls(acc)

    def __matmul__(self, other: Correspondence) -> Correspondence:
        return compose(self, other)


def compose(alpha: Correspondence, beta: Correspondence) -> Correspondence:
    """``alpha o beta``: first ``beta``, then ``alpha``."""
    if alpha.modulus != beta.modulus:
        raise ModulusMismatch(f"cannot compose over Z/{alpha.modulus} and Z/{beta.modulus}")
    return Correspondence(alpha.matrix @ beta.matrix)


@dataclass(frozen=True)
class Projector:
    matrix: Matrix

    def __post_init__(self) -> None:
        if not self.matrix.is_idempotent():
            raise NotAProjector("P @ P != P")

    @property
    def modulus(self) -> int:
        return self.matrix.modulus

    def is_graded(self, space: SplitMotiveSpace) -> bool:
        return space.is_graded(self.matrix)


def _check_graded_projector(P: Matrix, space: SplitMotiveSpace) -> None:
    if P.shape != (space.rank, space.rank):
        raise ValueError(f"projector of shape {P.shape} on a rank-{space.rank} space")
    if not space.is_graded(P):
        raise NotGraded("projector mixes codimensions")
    if not P.is_idempotent():
        raise NotAProjector("P @ P != P")


def _block_ranks(P: Matrix, space: SplitMotiveSpace) -> dict[int, int]:
    """Image rank per twist block, with the splitness checks of each ring."""
    ranks = {}
    for t, idx in space.blocks.items():
        block = P.submatrix(idx, idx)
        if P.modulus == 0:
            D, X = integer_image_basis(block)
            if not (X @ D).is_identity():
                raise NotSplit(f"image in twist {t} is not a free direct summand")
            ranks[t] = D.ncols
        else:
            per_prime = {p: rank_mod_p(block, p) for p in factorize(P.modulus).primes}
            if len(set(per_prime.values())) > 1:
                raise NotSplit(f"twist {t}: image ranks {per_prime} differ between primes, "
                               "so the image is projective but not free")
            ranks[t] = next(iter(per_prime.values()))
    return ranks


def tate_shape(P: Matrix, space: SplitMotiveSpace) -> TateShape:
    """Multiset of twists of ``(X, P)`` for a graded projector."""
    _check_graded_projector(P, space)
    return TateShape.from_counts(_block_ranks(P, space))


# ---------------------------------------------------------------------------
# rank-one normal form


@dataclass(frozen=True)
class RankOneForm:
    """``P = sum_u c_u x d_u`` with ``deg(c_u d_v) = delta_uv``.

    ``D`` holds the ``d_u`` as columns (e*-coordinates), ``C`` the ``c_u``
    as rows (e-coordinates); ``P = D @ C`` and ``C @ D = Id``.  ``twists[u]``
    is the codimension of ``c_u``.
    """

    D: Matrix
    C: Matrix
    twists: tuple[int, ...]

    def columns_at(self, twist: int) -> list[int]:
        return [u for u, t in enumerate(self.twists) if t == twist]


def _embed_block(block: Matrix, rows: Sequence[int], n: int, *, columns: bool) -> list[list[int]]:
    """Spread a per-twist factor back into full N-dimensional coordinates."""
    if columns:
        vecs = []
        for u in range(block.ncols):
            v = [0] * n
            for a, i in enumerate(rows):
                v[i] = block.rows[a][u]
            vecs.append(v)
        return vecs
    vecs = []
    for r in block.rows:
        v = [0] * n
        for a, i in enumerate(rows):
            v[i] = r[a]
        vecs.append(v)
    return vecs


def _local_form(P: Matrix, space: SplitMotiveSpace, p: int) -> tuple[list[list[int]], list[list[int]], list[int]]:
    n = space.rank
    ds, cs, twists = [], [], []
    for t, idx in space.blocks.items():
        D, C = local_image_basis(P.submatrix(idx, idx), p)
        ds += _embed_block(D, idx, n, columns=True)
        cs += _embed_block(C, idx, n, columns=False)
        twists += [t] * D.ncols
    return ds, cs, twists


def rank_one_form(P: Matrix, space: SplitMotiveSpace) -> RankOneForm:
    """Rank-one normal form of a graded projector with free image.

    Over Z/p^a the image of each twist block is free; its basis is read off
    the columns of ``P`` and the dual vectors come from a left inverse.  Over a
    composite modulus the local forms are computed prime power by prime
    power and glued entrywise with the Chinese Remainder Theorem, which
    requires equal ranks in every twist (otherwise the image is not free).
    """
    _check_graded_projector(P, space)
    n = space.rank
    m = P.modulus
    if m == 0:
        ds, cs, twists = [], [], []
        for t, idx in space.blocks.items():
            block = P.submatrix(idx, idx)
            D, X = integer_image_basis(block)
            if not (X @ D).is_identity():
                raise NotSplit(f"image in twist {t} is not a free direct summand")
            ds += _embed_block(D, idx, n, columns=True)
            cs += _embed_block(X, idx, n, columns=False)
            twists += [t] * D.ncols
        r = len(twists)
        return RankOneForm(Matrix.from_columns(ds, n, 0), Matrix(cs, 0, n) if r else Matrix.zeros(0, n),
                           tuple(twists))
    local = []
    for p, a in factorize(m).factors:
        q = p**a
        ds, cs, twists = _local_form(P.reduce(q), space, p)
        local.append((ds, cs, twists, q))
    return glue_forms(local, n, m)


def glue_forms(local: Sequence[tuple[list, list, list, int]], n: int, m: int) -> RankOneForm:
    """CRT-glue per-prime-power rank-one forms that agree in their twist sequence."""
    twist_seqs = {tuple(tw) for _, _, tw, _ in local}
    if len(twist_seqs) != 1:
        shapes = {q: str(TateShape.of(tw)) for _, _, tw, q in local}
        raise NotSplit(f"local shapes disagree across prime powers: {shapes}")
    twists = next(iter(twist_seqs))
    r = len(twists)
    if len(local) == 1:
        ds, cs, _, q = local[0]
        ds_m, cs_m = ds, cs
    else:
        ds_m = [crt_vector([(ds[u], q) for ds, _, _, q in local]) for u in range(r)]
        cs_m = [crt_vector([(cs[u], q) for _, cs, _, q in local]) for u in range(r)]
    D = Matrix.from_columns(ds_m, n, m) if r else Matrix.zeros(n, 0, m)
    C = Matrix(cs_m, m, n) if r else Matrix.zeros(0, n, m)
    return RankOneForm(D, C, twists)


# ---------------------------------------------------------------------------
# group actions and rationality


def tensor_action(g: Matrix, alpha: Matrix) -> Matrix:
    """Act by ``g`` on ``alpha`` through its tensor coordinates.

    ``alpha = sum T_kl e_k x e*_l`` with ``T = alpha^T``; ``g`` moves the
    e-factor by ``g^-T`` and the e*-factor by ``g``.  Returned as a
    realization matrix again.  Serves as the independent route for
    :func:`invariance_transport`.
    """
    g = g.reduce(alpha.modulus) if alpha.modulus else g
    g_inv = inverse(g)
    T = alpha.T
    moved = g_inv.T @ T @ g.T
    return moved.T


def invariance_transport(alpha: Matrix, structure: RationalStructure) -> bool:
    """Whether ``alpha_*`` commutes with every group element."""
    return structure.is_invariant(alpha)


@dataclass(frozen=True)
class RationalStructure:
    """Declarative model of "defined over the base field".

    ``group`` lists every element of a finite group acting on dual
    coordinates; ``transfer_degree`` is the Galois degree ``m``; ``spans``
    maps a prime power ``p^l`` to integer matrices whose reductions span the
    rational correspondences modulo ``p^l``.
    """

    transfer_degree: int
    group: tuple[Matrix, ...] = ()
    spans: Mapping[int, tuple[Matrix, ...]] = field(default_factory=dict)
    _solvers: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.transfer_degree < 1:
            raise ValueError("transfer degree must be positive")
        elements = set(self.group)
        for g in self.group:
            if g.modulus != 0 or not g.is_square:
                raise ValueError("group elements must be square integer matrices")
            if abs(det(g)) != 1:
                raise ValueError("group element is not invertible over Z")
            for h in self.group:
                if g @ h not in elements:
                    raise ValueError("group elements are not closed under products")
        spans = {}
        for q, gens in dict(self.spans).items():
            fac = factorize(int(q))
            if len(fac.factors) != 1:
                raise ValueError(f"span modulus {q} is not a prime power")
            gens = tuple(g.reduce(int(q)) if g.modulus != int(q) else g for g in gens)
            for g in gens:
                if not self.is_invariant(g):
                    raise ValueError(f"span generator modulo {q} is not group invariant")
            spans[int(q)] = gens
        object.__setattr__(self, "spans", spans)

    @property
    def rank(self) -> int | None:
        if self.group:
            return self.group[0].nrows
        for gens in self.spans.values():
            if gens:
                return gens[0].nrows
        return None

    def check_graded(self, space: SplitMotiveSpace) -> None:
        for g in self.group:
            if not space.is_graded(g):
                raise NotGraded("group action does not preserve codimension")

    def is_invariant(self, alpha: Matrix) -> bool:
        m = alpha.modulus
        for g in self.group:
            gm = g.reduce(m) if m else g
            if gm @ alpha != alpha @ gm:
                return False
        return True

    def span(self, p: int, j: int) -> tuple[Matrix, ...]:
        """Generators of the rational correspondences modulo ``p^j`` (``j <= l``)."""
        q = p**j
        if q in self.spans:
            return self.spans[q]
        for Q in sorted(self.spans):
            if Q % p == 0 and Q % q == 0 and len(factorize(Q).factors) == 1:
                return tuple(g.reduce(q) for g in self.spans[Q])
        raise MissingSpanningSet(f"no rational spanning set modulo {q}")

    def span_solver(self, p: int, j: int) -> SpanSolver:
        solver = self._solvers.get(p**j)
        if solver is None:
            solver = SpanSolver([list(g.entries()) for g in self.span(p, j)], p**j)
            self._solvers[p**j] = solver
        return solver

    def in_span(self, alpha: Matrix, p: int, j: int) -> bool:
        gens = self.span(p, j)
        target = alpha.reduce(p**j)
        if not gens:
            return target.is_zero()
        return self.span_solver(p, j).contains(list(target.entries()))


def is_rational(alpha: Matrix, structure: RationalStructure) -> bool:
    """Group invariance plus membership of the reduction modulo ``p^l`` in the declared span.

    ``p^l`` runs over the exact prime powers of the transfer degree; for a
    coefficient ring Z/p^j with ``j < l`` the span is reduced to ``p^j``.
    Primes of the coefficient modulus that do not divide the transfer degree
    impose only invariance.
    """
    if not structure.is_invariant(alpha):
        return False
    transfer = factorize(structure.transfer_degree)
    if alpha.modulus == 0:
        checks = transfer.factors
    else:
        checks = []
        for p, j in factorize(alpha.modulus).factors:
            l = transfer.exponent(p)
            if l:
                checks.append((p, min(j, l)))
    return all(structure.in_span(alpha, p, j) for p, j in checks)
