"""Exact matrices over Z and Z/m.

A single :class:`Matrix` type covers both rings: ``modulus == 0`` means
integer entries, ``modulus >= 2`` means canonical residues in ``[0, m)``.
Besides ring arithmetic the module provides determinants, factorization of
``SL_n(Z/m)`` into transvections, lifting ``SL_n(Z/m) -> SL_n(Z)`` and a
span-membership solver over Z and Z/m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import ModulusMismatch, NotAUnit, NotSpecialLinear, NotUnimodular
from .modarith import crt_vector, factorize, inverse_mod, valuation

Rows = tuple[tuple[int, ...], ...]


class Matrix:
    """Immutable dense matrix over Z (``modulus=0``) or Z/m."""

    __slots__ = ("rows", "modulus", "_ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]], modulus: int = 0, ncols: int = 0):
        if modulus < 0 or modulus == 1:
            raise ValueError(f"modulus must be 0 (integers) or >= 2, got {modulus}")
        if modulus:
            data = tuple(tuple(int(x) % modulus for x in row) for row in rows)
        else:
            data = tuple(tuple(int(x) for x in row) for row in rows)
        if data and len({len(r) for r in data}) != 1:
            raise ValueError("ragged matrix")
        self.rows: Rows = data
        self.modulus = modulus
        self._ncols = len(data[0]) if data else ncols
        self._hash: int | None = None

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int, modulus: int = 0) -> Matrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], modulus)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, modulus: int = 0) -> Matrix:
        return cls([[0] * ncols for _ in range(nrows)], modulus, ncols)

    @classmethod
    def diag(cls, values: Sequence[int], modulus: int = 0) -> Matrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], modulus)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int, modulus: int = 0) -> Matrix:
        return cls([[c[i] for c in columns] for i in range(nrows)], modulus, len(columns))

    # shape ----------------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def entries(self) -> Iterator[int]:
        for r in self.rows:
            yield from r

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    # arithmetic -----------------------------------------------------------

    def _check(self, other: Matrix) -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"modulus {self.modulus} vs {other.modulus}")

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if other.nrows == 0 or other.ncols == 0:
            return Matrix.zeros(self.nrows, other.ncols, self.modulus)
        cols = list(zip(*other.rows))
        out = [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows]
        return Matrix(out, self.modulus, other.ncols)

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.modulus, self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.modulus, self.ncols)

    def __neg__(self) -> Matrix:
        return self.scale(-1)

    def scale(self, c: int) -> Matrix:
        return Matrix([[c * a for a in r] for r in self.rows], self.modulus, self.ncols)

    def __rmul__(self, c: int) -> Matrix:
        return self.scale(c)

    def __pow__(self, k: int) -> Matrix:
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = Matrix.identity(self.nrows, self.modulus)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> Matrix:
        if not self.rows or not self.ncols:
            return Matrix.zeros(self.ncols, self.nrows, self.modulus)
        return Matrix(zip(*self.rows), self.modulus)

    T = property(transpose)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        cols = list(cols)
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], self.modulus, len(cols))

    # ring changes -----------------------------------------------------------

    def reduce(self, m: int) -> Matrix:
        """Reduce to Z/m; ``m`` must divide the current modulus (or it is Z)."""
        if self.modulus and self.modulus % m:
            raise ModulusMismatch(f"cannot reduce modulo {m} from modulo {self.modulus}")
        return Matrix(self.rows, m, self.ncols)

    def lift(self) -> Matrix:
        """Canonical lift to an integer matrix."""
        return Matrix(self.rows, 0, self.ncols)

    def with_modulus(self, m: int) -> Matrix:
        """Reinterpret canonical residues in another ring (no divisibility check)."""
        return Matrix(self.rows, m, self.ncols)

    # predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.entries())

    def is_identity(self) -> bool:
        return self.is_square and self == Matrix.identity(self.nrows, self.modulus)

    def is_idempotent(self) -> bool:
        return self.is_square and self @ self == self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.modulus == other.modulus and self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.modulus, self._ncols))
        return self._hash

    def __repr__(self) -> str:
        ring = f"Z/{self.modulus}" if self.modulus else "Z"
        return f"Matrix({self.tolist()}, {ring})"


def block_diagonal(blocks: Sequence[tuple[Sequence[int], Matrix]], n: int, modulus: int) -> Matrix:
    """Assemble an n x n matrix from ``(indices, block)`` pairs."""
    out = [[0] * n for _ in range(n)]
    for idx, block in blocks:
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                out[i][j] = block.rows[a][b]
    return Matrix(out, modulus, n)


# ---------------------------------------------------------------------------
# determinants and inverses


def _bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det(M: Matrix) -> int:
    """Exact determinant; over Z/m it is the reduced determinant of the lift."""
    if not M.is_square:
        raise ValueError(f"determinant of non-square {M.shape} matrix")
    d = _bareiss_det(M.rows)
    return d % M.modulus if M.modulus else d


def _inverse_local(M: Matrix, p: int, a: int) -> Matrix:
    """Gauss-Jordan over the local ring Z/p^a with unit pivots."""
    q = p**a
    n = M.nrows
    aug = [[x % q for x in r] + [int(i == j) for j in range(n)] for i, r in enumerate(M.rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] % p), None)
        if piv is None:
            raise NotAUnit(f"matrix is singular modulo {p}")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = inverse_mod(aug[c][c], q)
        aug[c] = [x * inv % q for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(x - f * y) % q for x, y in zip(aug[i], aug[c])]
    return Matrix([r[n:] for r in aug], q)


def inverse(M: Matrix) -> Matrix:
    """Inverse over Z/m (via CRT of local inverses) or over Z (unimodular only)."""
    if not M.is_square:
        raise ValueError("inverse of a non-square matrix")
    n = M.nrows
    if n == 0:
        return M
    if M.modulus:
        parts = []
        for p, a in factorize(M.modulus).factors:
            local = _inverse_local(M, p, a)
            parts.append(([x for r in local.rows for x in r], p**a))
        flat = crt_vector(parts)
        return Matrix([flat[i * n:(i + 1) * n] for i in range(n)], M.modulus)
    if abs(det(M)) != 1:
        raise NotUnimodular("integer matrix is not invertible over Z")
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.rows)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return Matrix([[int(x) for x in r[n:]] for r in aug], 0)


# ---------------------------------------------------------------------------
# transvections


@dataclass(frozen=True)
class Transvection:
    """The elementary matrix ``Id + c * E_ij`` (0-based, ``i != j``)."""

    i: int
    j: int
    c: int

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError("transvection needs i != j")

    def matrix(self, n: int, modulus: int = 0) -> Matrix:
        rows = [[int(r == s) for s in range(n)] for r in range(n)]
        rows[self.i][self.j] += self.c
        return Matrix(rows, modulus)

    def inverse(self) -> Transvection:
        return Transvection(self.i, self.j, -self.c)


def transvection_product(ts: Sequence[Transvection], n: int, modulus: int = 0) -> Matrix:
    """Ordered product ``ts[0] @ ts[1] @ ...`` applied as row operations."""
    rows = [[int(r == s) for s in range(n)] for r in range(n)]
    # right-to-left: each factor acts on the rows of the partial product
    for t in reversed(ts):
        rows[t.i] = [x + t.c * y for x, y in zip(rows[t.i], rows[t.j])]
    return Matrix(rows, modulus)


def factor_elementary(M: Matrix) -> list[Transvection]:
    """Write ``M in SL_n(Z/m)`` as an ordered product of transvections.

    Column by column the pivot column is reduced by a Euclidean sweep on the
    canonical residues, which leaves a single entry ``g`` coprime to ``m``.
    That unit is turned into 1 with three transvections through the next row,
    after which the pivot row and column are cleared. Coefficients are
    canonical residues and zero steps are skipped.
    """
    m = M.modulus
    if m < 2:
        raise ValueError("factor_elementary needs a matrix over Z/m")
    if not M.is_square:
        raise ValueError("factor_elementary needs a square matrix")
    if det(M) != 1 % m:
        raise NotSpecialLinear(f"det = {det(M)} != 1 modulo {m}")
    n = M.nrows
    a = [list(r) for r in M.rows]
    left: list[Transvection] = []
    right: list[Transvection] = []

    def row_op(i: int, j: int, c: int) -> None:
        c %= m
        if c:
            a[i] = [(x + c * y) % m for x, y in zip(a[i], a[j])]
            left.append(Transvection(i, j, c))

    def col_op(i: int, j: int, c: int) -> None:
        # column j += c * column i, i.e. right multiplication by Id + c E_ij
        c %= m
        if c:
            for r in a:
                r[j] = (r[j] + c * r[i]) % m
            right.append(Transvection(i, j, c))

    for k in range(n - 1):
        while True:
            live = [i for i in range(k, n) if a[i][k]]
            if len(live) <= 1:
                break
            piv = min(live, key=lambda i: a[i][k])
            for i in live:
                if i != piv:
                    row_op(i, piv, -(a[i][k] // a[piv][k]))
        if not live:
            raise NotSpecialLinear("column is not unimodular")
        src = live[0]
        if src != k:
            row_op(k, src, 1)
            row_op(src, k, -1)
        u = a[k][k]
        if u != 1:
            # (u, 0) -> (u, 1-u) -> (1, 1-u) -> (1, 0) using row k+1
            row_op(k + 1, k, inverse_mod(u, m) * (1 - u))
            row_op(k, k + 1, 1)
            row_op(k + 1, k, -a[k + 1][k])
        for i in range(n):
            if i != k:
                row_op(i, k, -a[i][k])
        for j in range(k + 1, n):
            col_op(k, j, -a[k][j])
    if n and a[n - 1][n - 1] != 1 % m:
        raise NotSpecialLinear("elimination did not reach the identity")
    # L_s..L_1 M R_1..R_t = Id  =>  M = L_1^-1..L_s^-1 R_t^-1..R_1^-1
    factors = [t.inverse() for t in left] + [t.inverse() for t in reversed(right)]
    return [Transvection(t.i, t.j, t.c % m) for t in factors]


def lift_sl(M: Matrix) -> Matrix:
    """Lift ``M in SL_n(Z/m)`` to a matrix in ``SL_n(Z)`` reducing to ``M``."""
    return transvection_product(factor_elementary(M), M.nrows, 0)


def lift_sl_with_inverse(M: Matrix) -> tuple[Matrix, Matrix, list[Transvection]]:
    """Like :func:`lift_sl` but also return the exact integral inverse and the factors."""
    ts = factor_elementary(M)
    n = M.nrows
    lifted = transvection_product(ts, n, 0)
    inv = transvection_product([t.inverse() for t in reversed(ts)], n, 0)
    return lifted, inv, ts


def is_special_linear(M: Matrix) -> bool:
    return M.is_square and det(M) == (1 % M.modulus if M.modulus else 1)


# ---------------------------------------------------------------------------
# span membership


class _IntegerEchelon:
    """Row echelon form over Z with the transformation tracked."""

    def __init__(self, gens: Sequence[Sequence[int]]):
        k = len(gens)
        pool = [(list(g), [int(i == s) for i in range(k)]) for s, g in enumerate(gens) if any(g)]
        self.k = k
        self.pivots: list[tuple[int, list[int], list[int]]] = []
        width = len(gens[0]) if gens else 0
        for col in range(width):
            while True:
                live = [r for r in pool if r[0][col]]
                if len(live) <= 1:
                    break
                piv = min(live, key=lambda r: abs(r[0][col]))
                for r in live:
                    if r is not piv:
                        q = r[0][col] // piv[0][col]
                        r[0][:] = [x - q * y for x, y in zip(r[0], piv[0])]
                        r[1][:] = [x - q * y for x, y in zip(r[1], piv[1])]
            if not live:
                continue
            vec, coeff = live[0]
            if vec[col] < 0:
                vec, coeff = [-x for x in vec], [-x for x in coeff]
            self.pivots.append((col, vec, coeff))
            pool = [r for r in pool if r is not live[0] and any(r[0])]

    def reduce(self, target: Sequence[int]) -> tuple[list[int], list[int]] | None:
        t = list(target)
        on_gens = [0] * self.k
        on_pivots = []
        for col, vec, coeff in self.pivots:
            x = t[col]
            if x % vec[col]:
                return None
            f = x // vec[col]
            on_pivots.append(f)
            if f:
                t = [a - f * b for a, b in zip(t, vec)]
                on_gens = [a + f * b for a, b in zip(on_gens, coeff)]
        if any(t):
            return None
        return on_gens, on_pivots


class _LocalEchelon:
    """Howell-style echelon form over Z/p^a with the transformation tracked."""

    def __init__(self, gens: Sequence[Sequence[int]], p: int, a: int):
        self.p, self.a, self.q = p, a, p**a
        q = self.q
        k = len(gens)
        self.k = k
        pool = []
        for s, g in enumerate(gens):
            vec = [x % q for x in g]
            if any(vec):
                pool.append((vec, [int(i == s) for i in range(k)]))
        self.pivots: list[tuple[int, int, list[int], list[int]]] = []
        width = len(gens[0]) if gens else 0
        for col in range(width):
            live = [r for r in pool if r[0][col]]
            if not live:
                continue
            best = min(live, key=lambda r: valuation(r[0][col], p))
            v = valuation(best[0][col], p)
            unit_inv = inverse_mod(best[0][col] // p**v, q)
            pvec = [x * unit_inv % q for x in best[0]]
            pcoeff = [x * unit_inv % q for x in best[1]]
            rest = []
            for r in pool:
                if r is best:
                    continue
                if r[0][col]:
                    f = r[0][col] // p**v
                    r = ([(x - f * y) % q for x, y in zip(r[0], pvec)],
                         [(x - f * y) % q for x, y in zip(r[1], pcoeff)])
                if any(r[0]):
                    rest.append(r)
            if v:
                s = p ** (a - v)
                extra = ([x * s % q for x in pvec], [x * s % q for x in pcoeff])
                if any(extra[0]):
                    rest.append(extra)
            self.pivots.append((col, v, pvec, pcoeff))
            pool = rest

    def reduce(self, target: Sequence[int]) -> list[int] | None:
        p, q = self.p, self.q
        t = [x % q for x in target]
        coeff = [0] * self.k
        for col, v, pvec, pcoeff in self.pivots:
            x = t[col]
            if not x:
                continue
            if x % p**v:
                return None
            f = x // p**v
            t = [(a - f * b) % q for a, b in zip(t, pvec)]
            coeff = [(a + f * b) % q for a, b in zip(coeff, pcoeff)]
        if any(t):
            return None
        return coeff


class SpanSolver:
    """Solve ``target = sum c_s * gens[s]`` over Z or Z/m.

    Over Z/m the problem is split prime power by prime power and the
    coefficient vectors are recombined with the Chinese Remainder Theorem.
    """

    def __init__(self, gens: Sequence[Sequence[int]], modulus: int = 0):
        self.modulus = modulus
        self.k = len(gens)
        gens = [list(g) for g in gens]
        if modulus:
            self._local = [(_LocalEchelon(gens, p, a), p**a) for p, a in factorize(modulus).factors]
        else:
            self._integer = _IntegerEchelon(gens)

    def solve(self, target: Sequence[int]) -> list[int] | None:
        if self.modulus:
            parts = []
            for ech, q in self._local:
                c = ech.reduce(target)
                if c is None:
                    return None
                parts.append((c, q))
            if not parts:
                return []
            return crt_vector(parts) if self.k else []
        if self.k == 0:
            return [] if not any(target) else None
        res = self._integer.reduce(target)
        return None if res is None else res[0]

    def contains(self, target: Sequence[int]) -> bool:
        return self.solve(target) is not None


def _flat(M: Matrix) -> list[int]:
    return list(M.entries())


def matrix_span_solver(gens: Sequence[Matrix], modulus: int) -> SpanSolver:
    return SpanSolver([_flat(g) for g in gens], modulus)


def span_solve(gens: Sequence[Matrix], target: Matrix) -> list[int] | None:
    """Coefficients expressing ``target`` in the span of ``gens`` (same ring)."""
    for g in gens:
        if g.modulus != target.modulus:
            raise ModulusMismatch("generators and target live in different rings")
    if not gens:
        return [] if target.is_zero() else None
    return matrix_span_solver(gens, target.modulus).solve(_flat(target))


def combine(gens: Sequence[Matrix], coeffs: Sequence[int], template: Matrix) -> Matrix:
    """``sum coeffs[s] * gens[s]`` in the ring of ``template``."""
    acc = [[0] * template.ncols for _ in range(template.nrows)]
    for c, g in zip(coeffs, gens):
        if c:
            for i, r in enumerate(g.rows):
                row = acc[i]
                for j, x in enumerate(r):
                    row[j] += c * x
    return Matrix(acc, template.modulus, template.ncols)


# ---------------------------------------------------------------------------
# images of projectors


def pivot_columns_mod_p(M: Matrix, p: int) -> list[int]:
    """Indices of pivot columns of ``M`` reduced modulo the prime ``p``."""
    a = [[x % p for x in r] for r in M.rows]
    pivots = []
    row = 0
    for c in range(M.ncols):
        piv = next((i for i in range(row, M.nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = inverse_mod(a[row][c], p)
        a[row] = [x * inv % p for x in a[row]]
        for i in range(M.nrows):
            if i != row and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[row])]
        pivots.append(c)
        row += 1
        if row == M.nrows:
            break
    return pivots


def rank_mod_p(M: Matrix, p: int) -> int:
    return len(pivot_columns_mod_p(M, p))


def local_image_basis(P: Matrix, p: int) -> tuple[Matrix, Matrix]:
    """Factor a projector over the local ring Z/p^a as ``P = D @ C``, ``C @ D = Id``.

    The columns of ``D`` are columns of ``P`` that stay independent modulo
    ``p``; by Nakayama they form a basis of the (free) image.
    """
    q = P.modulus
    n = P.nrows
    cols = pivot_columns_mod_p(P, p)
    r = len(cols)
    D = P.submatrix(range(n), cols)
    if r == 0:
        return Matrix.zeros(n, 0, q), Matrix.zeros(0, n, q)
    rows = pivot_columns_mod_p(D.T, p)
    square = D.submatrix(rows, range(r))
    sq_inv = inverse(square)
    L = [[0] * n for _ in range(r)]
    for a in range(r):
        for b, i in enumerate(rows):
            L[a][i] = sq_inv.rows[a][b]
    C = Matrix(L, q) @ P
    return D, C


def integer_image_basis(P: Matrix) -> tuple[Matrix, Matrix]:
    """Factor an integer matrix as ``P = D @ X`` with ``D`` a basis of the column lattice."""
    n = P.nrows
    ech = _IntegerEchelon([list(P.col(j)) for j in range(P.ncols)])
    r = len(ech.pivots)
    D = Matrix.from_columns([vec for _, vec, _ in ech.pivots], n, 0) if r else Matrix.zeros(n, 0)
    X_cols = []
    for j in range(P.ncols):
        res = ech.reduce(P.col(j))
        assert res is not None
        X_cols.append(res[1])
    X = Matrix.from_columns(X_cols, r, 0) if r else Matrix.zeros(0, P.ncols)
    return D, X

