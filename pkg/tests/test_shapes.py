import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from chowlift.errors import TotalMismatch
from chowlift.motive import TateShape
from chowlift.shapes import (
    Block,
    PrimeCatalog,
    ShapePartition,
    enumerate_admissible,
    p_admissible,
    relative_ks_holds,
    relatively_equivalent,
)
from random_catalogs import random_catalogs


def test_partition_is_canonical():
    P = ShapePartition.of([[1, 2], [0]])
    Q = ShapePartition.of([[0], [2, 1]])
    assert P == Q and relatively_equivalent(P, Q)
    assert P.total == TateShape.of([0, 1, 2])
    assert not relatively_equivalent(P, ShapePartition.of([[0, 1, 2]]))


def test_relative_equivalence_needs_equal_totals():
    with pytest.raises(TotalMismatch):
        relatively_equivalent(ShapePartition.of([[0]]), ShapePartition.of([[1]]))


def test_block_must_start_at_zero():
    with pytest.raises(ValueError):
        Block("bad", TateShape.of([1, 2]))


def test_p_admissible_examples():
    b = Block("B", TateShape.of([0, 1]))
    cat = PrimeCatalog.build(2, [(b, 0), (b, 2)])
    assert p_admissible(ShapePartition.of([[0, 1], [2, 3]]), cat)
    assert p_admissible(ShapePartition.of([[0, 1, 2, 3]]), cat)
    assert not p_admissible(ShapePartition.of([[0, 2], [1, 3]]), cat)
    with pytest.raises(TotalMismatch):
        p_admissible(ShapePartition.of([[0, 1]]), cat)


def test_enumerate_rejects_mismatched_totals():
    a = PrimeCatalog.build(2, [(Block("P", TateShape.of([0])), 0)])
    b = PrimeCatalog.build(3, [(Block("P", TateShape.of([0])), 1)])
    with pytest.raises(TotalMismatch):
        enumerate_admissible([a, b])


def test_two_catalog_example():
    # mod 2: {0,1} + {1,2}, mod 3: {0,1,2} + {1}; the only common grouping is everything
    b01 = Block("a", TateShape.of([0, 1]))
    b012 = Block("b", TateShape.of([0, 1, 2]))
    pt = Block("pt", TateShape.of([0]))
    c2 = PrimeCatalog.build(2, [(b01, 0), (b01, 1)])
    c3 = PrimeCatalog.build(3, [(b012, 0), (pt, 1)])
    classes = enumerate_admissible([c2, c3])
    assert classes == [ShapePartition.of([[0, 1, 1, 2]])]
    assert relative_ks_holds([c2, c3])


def _replay(P, catalog):
    adm = p_admissible(P, catalog)
    assert adm.ok
    for part, group in zip(P.parts, adm.witness):
        acc = Counter()
        for i in group:
            acc.update(catalog.placements[i].shape.as_counter())
        assert acc == part.as_counter()
    used = sorted(i for g in adm.witness for i in g)
    assert used == list(range(len(catalog.placements)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_every_class_is_admissible_everywhere(seed):
    cats = random_catalogs(random.Random(seed), max_cells=10)
    classes = enumerate_admissible(cats)
    assert classes, "the one-part partition is always admissible, so something complete exists"
    assert len(set(classes)) == len(classes)
    for P in classes:
        assert P.total == cats[0].total
        for cat in cats:
            _replay(P, cat)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_single_catalog_gives_its_own_blocks(seed):
    cat = random_catalogs(random.Random(seed), max_cells=10)[0]
    classes = enumerate_admissible([cat])
    assert classes == [ShapePartition(tuple(pl.shape for pl in cat.placements))]
    assert relative_ks_holds([cat])


def test_single_cell():
    cat = PrimeCatalog.build(2, [(Block("pt", TateShape.of([0])), 3)])
    assert enumerate_admissible([cat, cat]) == [ShapePartition.of([[3]])]
