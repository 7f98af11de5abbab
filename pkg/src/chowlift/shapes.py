"""Shape-level admissibility and the search for complete decompositions.

Every motive here is geometrically a sum of Tate motives, so a summand is
recorded by its multiset of twists (a :class:`TateShape`).  For each prime
``p`` a catalog lists the indecomposable summands modulo ``p`` with their
shifts.  A partition of the total shape is ``p``-admissible when the
catalog's placements can be grouped so that the groups produce exactly the
parts.  A partition admissible for every prime of the splitting degree is
an integral decomposition; complete ones admit no admissible refinement.

Catalog completeness (each block being indecomposable modulo ``p``) is an
input assumption and is not verified.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import TotalMismatch
from .motive import TateShape


@dataclass(frozen=True)
class Block:
    name: str
    shape: TateShape

    def __post_init__(self) -> None:
        if not self.shape:
            raise ValueError(f"block {self.name!r} has an empty shape")
        if self.shape.min_twist != 0:
            raise ValueError(f"block {self.name!r} must start at twist 0 (shifts are explicit)")


@dataclass(frozen=True)
class Placement:
    block: Block
    shift: int

    @property
    def shape(self) -> TateShape:
        return self.block.shape.shift(self.shift)

    def __str__(self) -> str:
        return f"{self.block.name}({self.shift})"


@dataclass(frozen=True)
class PrimeCatalog:
    prime: int
    placements: tuple[Placement, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "placements", tuple(self.placements))

    @classmethod
    def build(cls, prime: int, items: Iterable[tuple[Block, int]]) -> PrimeCatalog:
        return cls(prime, tuple(Placement(b, s) for b, s in items))

    @property
    def total(self) -> TateShape:
        acc = TateShape()
        for pl in self.placements:
            acc = acc + pl.shape
        return acc


@dataclass(frozen=True)
class ShapePartition:
    """A multiset of nonempty Tate shapes, kept in canonical (sorted) order."""

    parts: tuple[TateShape, ...]

    def __post_init__(self) -> None:
        if any(not s for s in self.parts):
            raise ValueError("parts must be nonempty")
        object.__setattr__(self, "parts", tuple(sorted(self.parts, key=_shape_key)))

    @classmethod
    def of(cls, parts: Iterable[Iterable[int]]) -> ShapePartition:
        return cls(tuple(TateShape.of(p) for p in parts))

    @property
    def total(self) -> TateShape:
        acc = TateShape()
        for s in self.parts:
            acc = acc + s
        return acc

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return " + ".join(str(s) for s in self.parts) if self.parts else "0"


def _shape_key(s: TateShape) -> tuple:
    return (s.cells,)


def _check_totals(total: TateShape, others: Sequence[tuple[str, TateShape]]) -> None:
    for name, t in others:
        if t != total:
            raise TotalMismatch(f"total shape {total} does not match {name} total {t}")


def relatively_equivalent(P: ShapePartition, Q: ShapePartition) -> bool:
    """Equal as multisets of shapes, i.e. equal after extending to the algebraic closure."""
    if P.total != Q.total:
        raise TotalMismatch(f"totals differ: {P.total} vs {Q.total}")
    return P.parts == Q.parts


# ---------------------------------------------------------------------------
# exact cover of one partition by one catalog


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    witness: tuple[tuple[int, ...], ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _cover(parts: Sequence[Counter], shapes: Sequence[TateShape]) -> list[list[int]] | None:
    used = [False] * len(shapes)
    assignment: list[list[int]] = [[] for _ in parts]
    remaining = [Counter(p) for p in parts]

    def fits(s: TateShape, rem: Counter) -> bool:
        return all(rem[t] >= c for t, c in s.counts)

    def go(k: int) -> bool:
        while k < len(parts) and not +remaining[k]:
            k += 1
        if k == len(parts):
            return True
        rem = remaining[k]
        low = min(t for t, c in rem.items() if c)
        tried = set()
        for i, s in enumerate(shapes):
            if used[i] or s.min_twist != low or s in tried or not fits(s, rem):
                continue
            tried.add(s)
            used[i] = True
            assignment[k].append(i)
            rem.subtract(s.as_counter())
            if go(k):
                return True
            rem.update(s.as_counter())
            assignment[k].pop()
            used[i] = False
        return False

    return assignment if go(0) else None


def p_admissible(P: ShapePartition, catalog: PrimeCatalog) -> Admissibility:
    """Whether the catalog's placements can be grouped into the parts of ``P``.

    The witness lists, per part of ``P`` (in canonical order), the indices
    of the catalog placements assigned to it.
    """
    _check_totals(P.total, [(f"mod-{catalog.prime} catalog", catalog.total)])
    shapes = [pl.shape for pl in catalog.placements]
    found = _cover([s.as_counter() for s in P.parts], shapes)
    if found is None:
        return Admissibility(False)
    return Admissibility(True, tuple(tuple(sorted(g)) for g in found))


# ---------------------------------------------------------------------------
# enumeration of complete decompositions


def _union(shapes: Iterable[TateShape]) -> Counter:
    acc: Counter = Counter()
    for s in shapes:
        acc.update(s.as_counter())
    return acc


def _grow(pools: Sequence[Sequence[TateShape]], seed: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Minimal common unions grown from ``pools[0][seed]``.

    ``pools[c]`` lists the placements available in catalog ``c``.  A state
    picks a sub-multiset in every catalog; while their unions differ, some
    catalog lacks a cell that another one has, and every available
    placement of that catalog containing the cell is tried.  Yields index
    tuples (one per catalog) at the first state where all unions agree.
    """
    k = len(pools)
    seen = set()

    def key(choice):
        return tuple(tuple(sorted(pools[c][i] for i in choice[c])) for c in range(k))

    def go(choice: list[tuple[int, ...]], unions: list[Counter]):
        top = Counter()
        for u in unions:
            top |= u
        for c in range(k):
            short = top - unions[c]
            if short:
                t = min(short)
                tried = set()
                for i, s in enumerate(pools[c]):
                    if i in choice[c] or s in tried or not s.multiplicity(t):
                        continue
                    tried.add(s)
                    nxt = list(choice)
                    nxt[c] = tuple(sorted(choice[c] + (i,)))
                    kk = key(nxt)
                    if kk in seen:
                        continue
                    seen.add(kk)
                    nu = list(unions)
                    nu[c] = unions[c] + s.as_counter()
                    yield from go(nxt, nu)
                return
        yield tuple(choice)

    start = [(seed,)] + [()] * (k - 1)
    yield from go(start, [pools[0][seed].as_counter()] + [Counter() for _ in range(k - 1)])


def _splittable(pools: Sequence[Sequence[TateShape]], choice: Sequence[tuple[int, ...]]) -> bool:
    """Whether a common union admits a proper sub-union common to every catalog."""
    sub = [[pools[c][i] for i in choice[c]] for c in range(len(pools))]
    whole = sum(len(x) for x in sub)
    low = min(min(s.min_twist for s in sub[0]), 10**9)
    for seed, s in enumerate(sub[0]):
        if s.min_twist != low:
            continue
        for inner in _grow(sub, seed):
            if sum(len(x) for x in inner) < whole:
                return True
    return False


def _is_complete(P: ShapePartition, catalogs: Sequence[PrimeCatalog]) -> bool:
    """No single split of one part gives a partition admissible for every catalog."""
    base = catalogs[0]
    pl = [p.shape for p in base.placements]
    for idx, S in enumerate(P.parts):
        if len(S) < 2:
            continue
        low = S.min_twist
        others = P.parts[:idx] + P.parts[idx + 1:]
        seen = set()
        for S1 in _sub_unions(pl, S.as_counter(), low):
            if S1 in seen:
                continue
            seen.add(S1)
            S2 = S - S1
            if not S2:
                continue
            Q = ShapePartition(others + (S1, S2))
            if all(p_admissible(Q, c) for c in catalogs):
                return False
    return True


def _sub_unions(shapes: Sequence[TateShape], room: Counter, low: int) -> Iterator[TateShape]:
    """Unions of distinct placements fitting in ``room`` that contain a cell at ``low``."""
    n = len(shapes)

    def go(i: int, acc: Counter, rem: Counter):
        if i == n:
            if acc[low]:
                yield TateShape.from_counts(acc)
            return
        yield from go(i + 1, acc, rem)
        s = shapes[i].as_counter()
        if all(rem[t] >= c for t, c in s.items()):
            yield from go(i + 1, acc + s, rem - s)

    yield from go(0, Counter(), Counter(room))


def enumerate_admissible(catalogs: Sequence[PrimeCatalog]) -> list[ShapePartition]:
    """All complete partitions admissible for every catalog, one per equivalence class.

    The search removes one part at a time, always the part containing the
    lowest remaining twist.  Candidate parts are minimal common unions of
    the remaining placements (see :func:`_grow`); a part that splits
    further cannot occur in a complete decomposition and is dropped.
    Survivors are checked for global completeness, since a different
    assignment of placements could still allow a refinement.
    """
    if not catalogs:
        raise ValueError("need at least one catalog")
    total = catalogs[0].total
    _check_totals(total, [(f"mod-{c.prime} catalog", c.total) for c in catalogs[1:]])
    if not total:
        return [ShapePartition(())]
    k = len(catalogs)
    pools_all = [[p.shape for p in c.placements] for c in catalogs]
    found: set[ShapePartition] = set()
    visited: set = set()

    def state_key(avail: list[tuple[int, ...]]):
        return tuple(tuple(sorted(pools_all[c][i] for i in avail[c])) for c in range(k))

    def go(avail: list[tuple[int, ...]], parts: list[TateShape], last: tuple | None):
        if not avail[0]:
            found.add(ShapePartition(tuple(parts)))
            return
        sk = (state_key(avail), tuple(sorted(parts, key=_shape_key)))
        if sk in visited:
            return
        visited.add(sk)
        pools = [[pools_all[c][i] for i in avail[c]] for c in range(k)]
        low = min(s.min_twist for s in pools[0])
        cands = {}
        for seed, s in enumerate(pools[0]):
            if s.min_twist != low:
                continue
            for choice in _grow(pools, seed):
                ck = tuple(tuple(sorted(pools[c][i] for i in choice[c])) for c in range(k))
                if ck not in cands:
                    cands[ck] = choice
        for ck, choice in sorted(cands.items()):
            if last is not None and last[0] == low and ck < last[1]:
                continue
            if _splittable(pools, choice):
                continue
            shape = TateShape.from_counts(_union(pools[0][i] for i in choice[0]))
            rest = [tuple(a for j, a in enumerate(avail[c]) if j not in set(choice[c])) for c in range(k)]
            go(rest, parts + [shape], (low, ck))

    go([tuple(range(len(p))) for p in pools_all], [], None)
    return sorted((P for P in found if _is_complete(P, catalogs)), key=lambda P: [_shape_key(s) for s in P.parts])


def relative_ks_holds(catalogs: Sequence[PrimeCatalog]) -> bool:
    """True iff all complete decompositions are relatively equivalent."""
    return len(enumerate_admissible(catalogs)) == 1
