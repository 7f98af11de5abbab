"""Acceptance gate: one test per criterion, each recording a pass/fail line."""

import random
import time
from math import gcd

import pytest
import sympy

from brute import brute_complete
from conftest import ACCEPTANCE, fixture_path
from chowlift.document import load_document
from chowlift.errors import ShapeMismatch
from chowlift.idemlift import NilIdealSpec, newton_trace
from chowlift.intmat import Matrix, lift_sl
from chowlift.lifting import DecompositionSpec, improve_isomorphism, lift_integral, lift_padic_tower, step2_glue
from chowlift.motive import SplitMotiveSpace, TateShape
from chowlift.sampling import (
    random_approx_idempotent,
    random_inverse_pair,
    random_projector_family,
    random_sl,
    random_split_instance,
)
from chowlift.severi_brauer import SBInstance, classify, verify_inequalities
from chowlift.shapes import Block, PrimeCatalog, enumerate_admissible, relative_ks_holds
from random_catalogs import random_catalogs


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def f4_catalogs():
    r2 = Block("R2", TateShape.of([0, 3]))
    r3 = Block("R3", TateShape.of([0, 4, 8]))
    mod2 = PrimeCatalog.build(2, [(r2, s) for s in [0, 1, 2, 4, 5, 7, 8, 10, 11, 12, 6, 6]])
    mod3 = PrimeCatalog.build(3, [(r3, s) for s in range(8)])
    return mod2, mod3


def test_criterion_01_f4_counterexample():
    t0 = time.perf_counter()
    classes = enumerate_admissible(list(f4_catalogs()))
    ks = relative_ks_holds(list(f4_catalogs()))
    elapsed = time.perf_counter() - t0
    l1 = TateShape.of([0, 3, 4, 7, 8, 11])
    l2 = TateShape.of(range(12))
    has_l1 = any(l1 in P.parts for P in classes)
    has_l2 = any(l2 in P.parts for P in classes)
    ok = has_l1 and has_l2 and ks is False and elapsed < 5
    record(1, ok, f"{len(classes)} classes, L1 part found={has_l1}, L2 part found={has_l2}, "
                  f"relative KS={ks}, {elapsed:.2f}s")


def test_criterion_02_catalog_consistency():
    mod2, mod3 = f4_catalogs()
    expected = TateShape.from_counts({t: 2 if 4 <= t <= 11 else 1 for t in range(16)})
    ok = (mod2.total == expected and mod3.total == expected
          and len(mod2.total) == 24 and len(mod3.total) == 24)
    record(2, ok, f"mod 2 total {mod2.total}, mod 3 total {mod3.total}")


def _exact_checks(spec, reference, space):
    n = space.rank
    total = Matrix.zeros(n, n)
    for i, P in enumerate(spec.parts):
        if P @ P != P:
            return False
        for j, Q in enumerate(spec.parts):
            if i != j and not (P @ Q).is_zero():
                return False
        total = total + P
    if total != spec.ambient:
        return False
    for p in (2, 3):
        if spec.reduce(p).compute_shapes(space) != reference.reduce(p).compute_shapes(space):
            return False
    return True


def test_criterion_03_round_trip():
    rng = random.Random(20240603)
    t0 = time.perf_counter()
    good = 0
    for _ in range(100):
        inst = random_split_instance(rng, rng.choice([6, 12]), max_rank=8)
        report = lift_integral(inst.per_prime(), inst.space, inst.structure)
        if (report.lifted and report.spec.shapes == inst.decomposition.shapes
                and _exact_checks(report.spec, inst.decomposition, inst.space)):
            good += 1
    elapsed = time.perf_counter() - t0
    record(3, good == 100 and elapsed < 30, f"{good}/100 lifted with exact checks, {elapsed:.2f}s")


def test_criterion_04_shape_obstruction():
    space = SplitMotiveSpace((0, 1), 1)
    a, b = Matrix.diag([1, 0]), Matrix.diag([0, 1])
    from chowlift.motive import RationalStructure

    S = RationalStructure(6, (), {2: (a, b), 3: (a, b)})
    per_prime = {
        2: DecompositionSpec(Matrix.identity(2, 2), (a.reduce(2), b.reduce(2))),
        3: DecompositionSpec(Matrix.identity(2, 3), (b.reduce(3), a.reduce(3))),
    }
    report = lift_integral(per_prime, space, S)
    with pytest.raises(ShapeMismatch):
        step2_glue([per_prime[2], per_prime[3]], space)
    ws = load_document(fixture_path("mismatch.json"))
    amb, dec = ws.decomposition("swap")
    fixture_report = lift_integral(dec, ws.motive_space(), ws.rational_structure(), amb)
    ok = (report.outcome == "ShapeMismatch" and report.spec is None
          and fixture_report.outcome == "ShapeMismatch" and fixture_report.spec is None)
    record(4, ok, f"synthetic: {report.outcome}, fixture: {fixture_report.outcome}")


def test_criterion_05_sl_lifting():
    rng = random.Random(5)
    good = 0
    for _ in range(200):
        n = rng.randint(1, 5)
        m = rng.choice([4, 6, 12, 30])
        M = random_sl(n, m, rng)
        W = lift_sl(M)
        if sympy.Matrix(W.tolist()).det() == 1 and W.reduce(m) == M:
            good += 1
    record(5, good == 200, f"{good}/200 lifts with det 1 (sympy) and exact reduction")


def test_criterion_06_idempotent_lifting():
    rng = random.Random(6)
    good = 0
    for _ in range(300):
        p = rng.choice([2, 3, 5])
        alpha = rng.randint(1, 5)
        n = rng.randint(1, 6)
        x = random_approx_idempotent(n, p, alpha, rng)
        trace = newton_trace(x, NilIdealSpec.reduction(p, alpha))
        e = trace[-1]
        if len(trace) - 1 <= alpha and e @ e == e and e.reduce(p) == x.reduce(p):
            good += 1
    record(6, good == 300, f"{good}/300 converged within alpha steps to an exact idempotent")


def test_criterion_07_padic_tower():
    rng = random.Random(7)
    good = 0
    for _ in range(50):
        p = rng.choice([2, 3, 5])
        n = rng.randint(1, 5)
        k = rng.randint(1, 3)
        fam = random_projector_family(n, k, p, rng)
        dec = DecompositionSpec(Matrix.identity(n, p), tuple(fam))
        tower = lift_padic_tower(dec, 6)
        coherent = len(tower) == 6 and all(
            tower[i + 1].reduce(p ** (i + 1)).parts == tower[i].parts for i in range(5))
        valid = True
        for level in tower:
            try:
                level.check()
            except Exception:
                valid = False
        good += coherent and valid
    record(7, good == 50, f"{good}/50 towers to precision 6 coherent and valid at every level")


def test_criterion_08_isomorphism_improvement():
    a, b = Matrix([[3]], 8), Matrix([[3]], 8)
    bp = improve_isomorphism(a, b)
    scalar_ok = bp == Matrix([[3]], 8) and (a @ bp).is_identity() and pow(3 * 3, 3, 8) * 3 % 8 == 3
    rng = random.Random(8)
    good = 0
    for _ in range(300):
        p = rng.choice([2, 3, 5])
        l = rng.randint(1, 4)
        n = rng.randint(1, 4)
        alpha, beta = random_inverse_pair(n, p, l, rng)
        bq = improve_isomorphism(alpha, beta)
        if (alpha @ bq).is_identity() and (bq @ alpha).is_identity():
            good += 1
    record(8, scalar_ok and good == 300, f"scalar mod 8 gives {bp[0, 0]}; {good}/300 random pairs inverse mod p^l")


def _expected_verdict(n, ind, k):
    """Independent restatement of the indecomposability criterion (1 <= k <= n - 1)."""
    k = min(k, n - k)
    division = ind == n
    two_power = ind > 1 and ind & (ind - 1) == 0
    if k == 1 and division:
        return "Indecomposable"
    if k == 2 and division and two_power:
        return "Indecomposable"
    return "Decomposable"


def test_criterion_09_severi_brauer():
    t0 = time.perf_counter()
    examples = [((12, 12, 1), "Indecomposable"), ((8, 8, 2), "Indecomposable"),
                ((6, 6, 2), "Decomposable"), ((9, 3, 3), "Decomposable")]
    ex_ok = all(classify(SBInstance.of(*args)).verdict.value == want for args, want in examples)
    rng = random.Random(9)
    agree = 0
    for _ in range(10_000):
        n = rng.randint(2, 60)
        ind = rng.choice(sympy.divisors(n))
        k = rng.randint(1, n - 1)
        agree += classify(SBInstance.of(n, ind, k)).verdict.value == _expected_verdict(n, ind, k)
    sweep = verify_inequalities(200)
    elapsed = time.perf_counter() - t0
    ok = ex_ok and agree == 10_000 and sweep.ok and elapsed < 60
    record(9, ok, f"examples {'ok' if ex_ok else 'WRONG'}, oracle agreement {agree}/10000, "
                  f"{len(sweep.violations)} violations over {sweep.points} points, {elapsed:.1f}s")


def test_criterion_10_brute_force_equivalence():
    rng = random.Random(10)
    cases = 0
    agree = 0
    for _ in range(40):
        cats = random_catalogs(rng, max_cells=12)
        cases += 1
        agree += enumerate_admissible(cats) == brute_complete(cats)
    record(10, agree == cases, f"{agree}/{cases} random catalog sets (<= 12 cells) match brute force")
