"""Lifting projector decompositions across coefficient rings.

The pipeline runs Z/p -> Z/p^alpha (step 1) for each prime of the transfer
degree, glues the local pieces to Z/m (step 2), lifts to an integral
decomposition of the split ambient projector (step 3) and finally pushes it
through a nilpotent restriction kernel (step 4).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Mapping, Sequence

from .errors import (
    ChowLiftError,
    InvalidInstance,
    ModulusMismatch,
    NotInverseModP,
    NotRational,
    NotSplit,
    NotUnimodular,
    ShapeMismatch,
)
from .idemlift import NilIdealSpec, lift_orthogonal_family
from .intmat import Matrix, SpanSolver, combine, det, integer_image_basis, lift_sl_with_inverse
from .modarith import crt_vector, factorize, inverse_mod
from .motive import (
    RationalStructure,
    SplitMotiveSpace,
    TateShape,
    _local_form,
    glue_forms,
    is_rational,
    rank_one_form,
    tate_shape,
)


@dataclass(frozen=True)
class DecompositionSpec:
    ambient: Matrix
    parts: tuple[Matrix, ...]
    shapes: tuple[TateShape, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "shapes", tuple(self.shapes))
        if not self.parts:
            raise ValueError("a decomposition needs at least one part")
        for P in self.parts:
            if P.modulus != self.ambient.modulus or P.shape != self.ambient.shape:
                raise ModulusMismatch("parts and ambient live in different rings")
        if self.shapes and len(self.shapes) != len(self.parts):
            raise ValueError("one claimed shape per part")

    @property
    def modulus(self) -> int:
        return self.ambient.modulus

    def __len__(self) -> int:
        return len(self.parts)

    def check(self, space: SplitMotiveSpace | None = None) -> None:
        """Raise unless the parts are orthogonal projectors summing to the ambient."""
        from .errors import InputsNotOrthogonal, NotAProjector

        if not self.ambient.is_idempotent():
            raise NotAProjector("ambient is not a projector")
        total = Matrix.zeros(*self.ambient.shape, self.modulus)
        for i, P in enumerate(self.parts):
            if not P.is_idempotent():
                raise NotAProjector(f"part {i} is not a projector")
            for j, Q in enumerate(self.parts):
                if i != j and not (P @ Q).is_zero():
                    raise InputsNotOrthogonal(f"parts {i} and {j} are not orthogonal")
            total = total + P
        if total != self.ambient:
            raise InputsNotOrthogonal("parts do not sum to the ambient projector")
        if space is not None and self.shapes:
            actual = self.compute_shapes(space)
            if actual != self.shapes:
                raise ShapeMismatch(
                    f"claimed shapes {[str(s) for s in self.shapes]} but found {[str(s) for s in actual]}"
                )

    def compute_shapes(self, space: SplitMotiveSpace) -> tuple[TateShape, ...]:
        return tuple(tate_shape(P, space) for P in self.parts)

    def with_shapes(self, space: SplitMotiveSpace) -> DecompositionSpec:
        return DecompositionSpec(self.ambient, self.parts, self.compute_shapes(space))

    def reduce(self, q: int) -> DecompositionSpec:
        return DecompositionSpec(self.ambient.reduce(q), tuple(P.reduce(q) for P in self.parts), self.shapes)

    def to_json(self) -> dict[str, Any]:
        return {
            "modulus": self.modulus,
            "ambient": self.ambient.tolist(),
            "parts": [P.tolist() for P in self.parts],
            "shapes": [list(s.cells) for s in self.shapes],
        }


OUTCOMES = ("Lifted", "ShapeMismatch", "NotRational", "NotSplit")


@dataclass
class LiftReport:
    outcome: str
    spec: DecompositionSpec | None = None
    transcript: list[dict[str, Any]] = field(default_factory=list)
    error: ChowLiftError | None = None

    @property
    def lifted(self) -> bool:
        return self.outcome == "Lifted"

    def raise_for_outcome(self) -> None:
        if self.error is not None:
            raise self.error

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"outcome": self.outcome, "transcript": self.transcript}
        if self.spec is not None:
            out["result"] = self.spec.to_json()
        if self.error is not None:
            out["error"] = str(self.error)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _note(transcript: list | None, **entry: Any) -> None:
    if transcript is not None:
        transcript.append(entry)


# ---------------------------------------------------------------------------
# step 1: Z/p -> Z/p^alpha


def _span_representative(y: Matrix, solver: SpanSolver, gens: Sequence[Matrix], q: int) -> Matrix:
    coeffs = solver.solve(list(y.entries()))
    if coeffs is None:
        raise NotRational(f"a part modulo {y.modulus} is not in the declared rational span")
    template = Matrix.zeros(y.nrows, y.ncols, q)
    return combine(gens, coeffs, template)


def _prime_of(modulus: int) -> tuple[int, int]:
    fac = factorize(modulus)
    if len(fac.factors) != 1:
        raise ModulusMismatch(f"{modulus} is not a prime power")
    return fac.factors[0]


def step1_lift(dec: DecompositionSpec, alpha: int, ambient: Matrix,
               structure: RationalStructure | None = None,
               transcript: list | None = None) -> DecompositionSpec:
    """Lift a rational decomposition modulo ``p`` to one modulo ``p^alpha``.

    Each part is first written as a combination of the declared rational
    generators modulo ``p``; the same combination taken modulo ``p^alpha`` is a
    rational approximate idempotent, and the family is made exact with
    :func:`lift_orthogonal_family`.  Because the rational correspondences form
    a ring, every intermediate stays rational; this is re-verified.
    """
    p, a = _prime_of(dec.modulus)
    if a != 1:
        raise ValueError(f"step 1 starts modulo a prime, got modulo {dec.modulus}")
    q = p**alpha
    if ambient.modulus != q:
        raise ModulusMismatch(f"ambient must be given modulo {q}")
    if ambient.reduce(p) != dec.ambient:
        raise ValueError("ambient does not reduce to the decomposition's ambient")
    dec.check()
    if alpha == 1:
        _note(transcript, step=1, modulus=q, action="no lift needed")
        return DecompositionSpec(ambient, dec.parts, dec.shapes)

    reps: list[Matrix]
    if structure is not None:
        if not is_rational(ambient, structure):
            raise NotRational(f"ambient projector is not rational modulo {q}")
        gens_q = structure.span(p, alpha)
        solver = SpanSolver([list(g.reduce(p).entries()) for g in gens_q], p)
        reps = [_span_representative(y, solver, gens_q, q) for y in dec.parts[:-1]]
        reps.append(ambient - sum(reps, Matrix.zeros(*ambient.shape, q)))
    else:
        reps = [y.with_modulus(q) for y in dec.parts]
    parts = lift_orthogonal_family(ambient, reps, NilIdealSpec.reduction(p, alpha))
    if structure is not None:
        for i, P in enumerate(parts):
            if not is_rational(P, structure):
                raise NotRational(f"lifted part {i} modulo {q} left the rational span")
    _note(transcript, step=1, modulus=q, action="lifted by Newton iteration inside the rational span",
          parts=len(parts))
    return DecompositionSpec(ambient, tuple(parts), dec.shapes)


# ---------------------------------------------------------------------------
# step 2: glue the prime powers


def step2_glue(decs: Sequence[DecompositionSpec], space: SplitMotiveSpace,
               transcript: list | None = None) -> DecompositionSpec:
    """Glue local decompositions modulo coprime prime powers into one modulo their product.

    Part ``j`` is brought to rank-one normal form at every prime power; the
    vectors ``c_u``, ``d_u`` are matched twist by twist and combined with the
    Chinese Remainder Theorem.  This is possible exactly when every part has
    the same Tate shape at every prime.
    """
    if not decs:
        raise ValueError("nothing to glue")
    counts = {d.modulus: len(d) for d in decs}
    if len(set(counts.values())) != 1:
        raise ShapeMismatch(f"part counts differ between prime powers: {counts}")
    moduli = [d.modulus for d in decs]
    for q in moduli:
        _prime_of(q)
    m = 1
    for q in moduli:
        m *= q
    if len(decs) == 1:
        _note(transcript, step=2, modulus=m, action="single prime, nothing to glue")
        return decs[0].with_shapes(space)

    n = space.rank
    parts = []
    shapes = []
    for j in range(len(decs[0])):
        local = []
        for d in decs:
            p, _ = _prime_of(d.modulus)
            ds, cs, tw = _local_form(d.parts[j], space, p)
            local.append((ds, cs, tw, d.modulus))
        seqs = {q: TateShape.of(tw) for _, _, tw, q in local}
        if len(set(seqs.values())) != 1:
            raise ShapeMismatch(
                f"part {j} has shape " + ", ".join(f"{s} modulo {q}" for q, s in seqs.items())
                + "; such a decomposition cannot be glued"
            )
        form = glue_forms(local, n, m)
        parts.append(form.D @ form.C)
        shapes.append(TateShape.of(form.twists))
    ambient_entries = crt_vector([(list(d.ambient.entries()), d.modulus) for d in decs])
    ambient = Matrix([ambient_entries[i * n:(i + 1) * n] for i in range(n)], m)
    _note(transcript, step=2, modulus=m, action="glued rank-one forms by CRT",
          shapes=[list(s.cells) for s in shapes])
    out = DecompositionSpec(ambient, tuple(parts), tuple(shapes))
    out.check()
    return out


# ---------------------------------------------------------------------------
# step 3: Z/m -> Z


def _pivot_key(row: Sequence[int], m: int) -> tuple[int, int]:
    for j, x in enumerate(row):
        if x and gcd(x, m) == 1:
            return (0, j)
    return (1, next((j for j, x in enumerate(row) if x), len(row)))


def step3_integralize(dec: DecompositionSpec, space: SplitMotiveSpace,
                      structure: RationalStructure | None = None,
                      ambient: Matrix | None = None,
                      transcript: list | None = None) -> DecompositionSpec:
    """Lift a decomposition modulo ``m`` of a split integral projector to Z.

    Works one twist block at a time.  With ``ambient = D0 C0`` integrally and
    the parts in rank-one form ``sum_u d_u c_u``, the matrices ``A = C D0``
    and ``B = C0 D`` are inverse modulo ``m``.  After rescaling the first
    row of ``A`` (and first column of ``B``) so that ``det A = 1``, ``A`` lifts
    to ``SL_n(Z)`` and the integral parts are read off from the lift and
    its exact inverse.
    """
    m = dec.modulus
    n = space.rank
    if ambient is None:
        ambient = Matrix.identity(n)
    if ambient.modulus != 0:
        raise ModulusMismatch("the split ambient projector must be integral")
    if ambient.reduce(m) != dec.ambient:
        raise ValueError("ambient does not reduce to the decomposition's ambient")
    if not space.is_graded(ambient) or not ambient.is_idempotent():
        raise NotSplit("the ambient projector must be a graded integral projector")
    forms = [rank_one_form(P, space) for P in dec.parts]
    out = [[[0] * n for _ in range(n)] for _ in dec.parts]

    for t, idx in space.blocks.items():
        D0, C0 = integer_image_basis(ambient.submatrix(idx, idx))
        r = D0.ncols
        d_cols: list[list[int]] = []
        c_rows: list[list[int]] = []
        owner: list[int] = []
        for j, f in enumerate(forms):
            for u in f.columns_at(t):
                d_cols.append([f.D.rows[i][u] for i in idx])
                c_rows.append([f.C.rows[u][i] for i in idx])
                owner.append(j)
        if len(owner) != r:
            raise NotSplit(f"twist {t}: parts have total rank {len(owner)}, ambient has {r}")
        if r == 0:
            continue
        # order the terms so that A is as close to the identity as possible;
        # an input that already comes from Z then lifts to itself
        A = Matrix(c_rows, m, len(idx)) @ D0.reduce(m)
        order = sorted(range(r), key=lambda a: _pivot_key(A.rows[a], m))
        d_cols = [d_cols[a] for a in order]
        c_rows = [c_rows[a] for a in order]
        owner = [owner[a] for a in order]
        D_all = Matrix.from_columns(d_cols, len(idx), m)
        C_all = Matrix(c_rows, m, len(idx))
        A = C_all @ D0.reduce(m)
        B = C0.reduce(m) @ D_all
        if not (A @ B).is_identity():
            raise NotUnimodular(f"twist {t}: A B is not the identity modulo {m}")
        dA = det(A)
        try:
            u = inverse_mod(dA, m)
        except ChowLiftError as exc:
            raise NotUnimodular(f"twist {t}: det A = {dA} is not a unit modulo {m}") from exc
        # c_1 -> det(A)^-1 c_1 and d_1 -> det(A) d_1 leave every part unchanged
        A_rows = [list(row) for row in A.rows]
        A_rows[0] = [x * u for x in A_rows[0]]
        A1 = Matrix(A_rows, m)
        At, Bt, ts = lift_sl_with_inverse(A1)
        _note(transcript, step=3, twist=t, rank=r, det=dA, det_inverse=u,
              transvections=[[x.i, x.j, x.c] for x in ts])
        left = D0 @ Bt          # columns: integral d_u
        right = At @ C0         # rows: integral c_u
        for j in range(len(forms)):
            cols = [a for a, o in enumerate(owner) if o == j]
            if not cols:
                continue
            block = left.submatrix(range(len(idx)), cols) @ right.submatrix(cols, range(len(idx)))
            for a, i in enumerate(idx):
                for b, k in enumerate(idx):
                    out[j][i][k] = block.rows[a][b]

    parts = tuple(Matrix(rows) for rows in out)
    result = DecompositionSpec(ambient, parts, tuple(TateShape.of(f.twists) for f in forms))
    result.check(space)
    for j, P in enumerate(parts):
        if P.reduce(m) != dec.parts[j]:
            raise AssertionError("integral part does not reduce to its input")
        if structure is not None and not is_rational(P, structure):
            raise NotRational(f"integral part {j} is not rational")
    return result


# ---------------------------------------------------------------------------
# step 4: through the restriction kernel


def step4_descend(dec: DecompositionSpec, kernel: NilIdealSpec, ambient: Matrix | None = None,
                  transcript: list | None = None) -> DecompositionSpec:
    """Lift orthogonal projectors through a restriction map with nilpotent kernel.

    The source ring is modeled as the same matrix ring with ``kernel`` as the
    kernel of restriction; ``ambient`` is the projector upstairs (defaults to
    the decomposition's own ambient).  The last part is the complement.
    """
    if ambient is None:
        ambient = dec.ambient
    if kernel.is_zero and ambient == dec.ambient:
        _note(transcript, step=4, action="zero kernel, nothing to lift")
        return dec
    parts = lift_orthogonal_family(ambient, list(dec.parts), kernel)
    _note(transcript, step=4, action="lifted through a nil ideal", nilpotency=kernel.nilpotency)
    return DecompositionSpec(ambient, tuple(parts), dec.shapes)


# ---------------------------------------------------------------------------
# full pipeline


def lift_integral(per_prime: Mapping[int, DecompositionSpec], space: SplitMotiveSpace,
                  structure: RationalStructure, ambient: Matrix | None = None,
                  kernel: NilIdealSpec | None = None) -> LiftReport:
    """Steps 1 to 4 for every prime of the transfer degree.

    ``per_prime[p]`` is a decomposition modulo ``p``.  Expected obstructions
    (shape mismatch, irrationality, non-split input) come back as the
    report's outcome; anything else propagates.
    """
    transcript: list[dict[str, Any]] = []
    n = space.rank
    if ambient is None:
        ambient = Matrix.identity(n)
    m = structure.transfer_degree
    fac = factorize(m)
    try:
        if not fac.factors:
            raise InvalidInstance("transfer degree 1 leaves nothing to lift")
        missing = [p for p in fac.primes if p not in per_prime]
        if missing:
            raise InvalidInstance(f"no decomposition given modulo {missing}")
        local = []
        for p, alpha in fac.factors:
            dec = per_prime[p]
            if dec.modulus != p:
                raise ModulusMismatch(f"decomposition for {p} is given modulo {dec.modulus}")
            dec.check(space)
            local.append(step1_lift(dec, alpha, ambient.reduce(p**alpha), structure, transcript))
        glued = step2_glue(local, space, transcript)
        integral = step3_integralize(glued, space, structure, ambient, transcript)
        if kernel is not None:
            integral = step4_descend(integral, kernel, transcript=transcript)
    except (ShapeMismatch, NotRational, NotSplit) as exc:
        transcript.append({"error": type(exc).__name__, "message": str(exc)})
        return LiftReport(type(exc).__name__, None, transcript, exc)
    return LiftReport("Lifted", integral, transcript)


# ---------------------------------------------------------------------------
# p-adic tower and isomorphisms


def lift_padic_tower(dec: DecompositionSpec, precision: int, ambient: Matrix | None = None,
                     structure: RationalStructure | None = None) -> list[DecompositionSpec]:
    """Coherent lifts of a decomposition modulo ``p`` to ``p^2, ..., p^precision``.

    Level ``k+1`` is obtained from level ``k`` through the square-zero kernel
    ``p^k Z/p^(k+1)``.  While ``p^(k+1)`` divides the transfer degree the
    representatives are taken in the declared rational span.  Beyond that,
    rationality only asks for group invariance on top of the (unchanged)
    reduction modulo ``p^l``, which is checked level by level.
    """
    p, a = _prime_of(dec.modulus)
    if a != 1:
        raise ValueError("the tower starts modulo a prime")
    if precision < 1:
        raise ValueError("precision must be at least 1")
    n = dec.ambient.nrows
    if ambient is None:
        ambient = dec.ambient.lift()
    elif ambient.modulus and ambient.modulus % p**precision:
        raise ModulusMismatch(f"ambient must be known modulo {p**precision}")
    if ambient.reduce(p) != dec.ambient:
        raise ValueError("ambient does not reduce to the decomposition's ambient")
    dec.check()
    l = factorize(structure.transfer_degree).exponent(p) if structure is not None else 0
    tower = [dec]
    for k in range(1, precision):
        q = p ** (k + 1)
        prev = tower[-1]
        x = ambient.reduce(q)
        if k + 1 <= l:
            gens = structure.span(p, k + 1)
            solver = SpanSolver([list(g.reduce(p**k).entries()) for g in gens], p**k)
            reps = [_span_representative(y, solver, gens, q) for y in prev.parts[:-1]]
            reps.append(x - sum(reps, Matrix.zeros(n, n, q)))
        else:
            reps = [y.with_modulus(q) for y in prev.parts]
        kernel = NilIdealSpec(modulus=q, nilpotency=2, scalar=p**k)
        parts = lift_orthogonal_family(x, reps, kernel)
        level = DecompositionSpec(x, tuple(parts), dec.shapes)
        if structure is not None:
            for i, P in enumerate(parts):
                if not is_rational(P, structure):
                    raise NotRational(f"tower level {q}: part {i} is not rational")
        tower.append(level)
    return tower


def improve_isomorphism(alpha: Matrix, beta: Matrix) -> Matrix:
    """Turn mutually inverse maps modulo ``p`` into mutually inverse maps modulo ``p^l``.

    Returns ``beta (alpha beta)^(p^(l-1) - 1)``; ``alpha`` and ``beta`` may
    be rectangular (``n x r`` and ``r x n``).
    """
    if alpha.modulus != beta.modulus:
        raise ModulusMismatch("alpha and beta live in different rings")
    p, l = _prime_of(alpha.modulus)
    if alpha.ncols != beta.nrows or beta.ncols != alpha.nrows:
        raise ValueError(f"shapes {alpha.shape} and {beta.shape} do not compose both ways")
    ab = alpha @ beta
    if not (ab.reduce(p).is_identity() and (beta @ alpha).reduce(p).is_identity()):
        raise NotInverseModP("alpha and beta are not mutually inverse modulo p")
    return beta @ (ab ** (p ** (l - 1) - 1))
