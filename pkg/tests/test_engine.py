import random
from fractions import Fraction as F
from importlib import resources

import pytest

from picardmod.engine import (
    ExponentBounds,
    RawRelation,
    assemble_presentation,
    build_witness_set,
    cygan_gate,
    enumerate_relations,
    exponent_bounds,
    max_point_dist4,
    max_realized_depth,
    search_witness,
    verify_witness,
)
from picardmod.fpgroups import abelianization, parse_word
from picardmod.hermitian import (
    GroupMatrix,
    HeisPoint,
    INFINITY,
    identity_matrix,
    read_matrix_file,
)
from picardmod.heisenberg import CuspElement, cusp_generators, cygan_dist4
from picardmod.points import enumerate_points
from picardmod.rings import quad_ring

R2 = quad_ring(2)
FIXTURES = resources.files("picardmod") / "fixtures"


@pytest.fixture(scope="module")
def table16():
    return enumerate_points(2, 16)


@pytest.fixture(scope="module")
def mats():
    return read_matrix_file(str(FIXTURES / "witnesses_d2.txt"))


@pytest.fixture(scope="module")
def ws(table16, mats):
    return build_witness_set(table16, mats)


@pytest.fixture(scope="module")
def bounds2(table16, ws):
    return exponent_bounds(2, 16, table=table16, witnesses=ws)


def test_verify_witness_examples(mats):
    byname = {m.name: m for m in mats}
    p0 = HeisPoint(R2.zero(), 0)
    assert verify_witness(byname["I0"], p0)
    p31 = byname["A_3_1"].apply(INFINITY)
    assert verify_witness(byname["A_3_1"], p31)
    ident = identity_matrix(R2)
    assert not verify_witness(ident, p0)  # the identity fixes the cusp


def test_build_witness_set(ws):
    assert len(ws.witnesses) == 46
    assert not ws.missing and not ws.unmatched
    assert {a for a, _ in ws.duplicates} == {"A_3_3", "A_6_2", "A_9_7", "A_9_8"}
    for w in ws.witnesses:
        assert w.matrix.apply(INFINITY) == w.point


def test_search_witness_finds_low_depths():
    p0 = HeisPoint(R2.zero(), 0)
    M = search_witness(R2, p0, budget=1)
    assert M is not None and M.apply(INFINITY) == p0
    p2 = HeisPoint(R2.zero(), 1)  # the depth-2 point
    M = search_witness(R2, p2, budget=3)
    assert M is not None
    assert M.apply(INFINITY) == p2
    from picardmod.hermitian import depth

    assert depth(M.apply(INFINITY), R2) == 2


def test_exponent_bounds_d2(bounds2):
    assert bounds2.box() == (19, 3, 4)


def test_exponent_bounds_d11():
    b = exponent_bounds(
        11, 43, published_maxima=(F(25661, 10**4), F(26901, 10**4))
    )
    assert b.box() == (21, 9, 5)


def test_exponent_bounds_joint_feasibility(bounds2):
    """(m,l) = (2,2) admits |n| = 19 and nothing admits |n| = 20 (exact scan
    against the published radius, here bounded above by 6.3651)."""
    r4 = F("6.3651") ** 4

    def feasible(n, m, l):
        q2 = F((2 * m) ** 2 + 2 * l * l) ** 2
        return q2 + 2 * (2 * n - 4 * m * l) ** 2 <= r4

    assert feasible(19, 2, 2)
    for m in range(-4, 5):
        for l in range(-5, 6):
            assert not feasible(20, m, l) and not feasible(-20, m, l)


def test_max_realized_depth():
    assert max_realized_depth(R2, 16) == 16
    assert max_realized_depth(quad_ring(11), 43) == 37


def test_cygan_gate(ws, table16):
    w0 = ws.witnesses[0]  # the depth-1 witness at (0,0)
    ident = CuspElement(R2, 0, 0, 0, 0)
    # I0^2 fixes infinity: distance 0, no finite depth
    assert cygan_gate(w0, ident, w0.point, 16) == set()
    # dep(a)=dep(b)=1 at distance 2: target depth 4
    p0 = w0.point
    far = CuspElement(R2, 0, 0, 1, 0).act(p0)  # (2, 0): distance 2 from (0,0)
    assert cygan_dist4(w0.inv_point(), far) == 16
    assert cygan_gate(w0, CuspElement(R2, 0, 0, 1, 0), p0, 16) == {4}
    # unreachable depth: anything solving to 5 is empty for d=2
    # (construct: distance^4 * 1 * 1 / 4 = 5 would need dist^4 = 20)
    from picardmod.engine import solve_norm_equation

    assert solve_norm_equation(5, R2) == []


def test_gate_soundness_random_triples(ws, table16, bounds2):
    """Whenever the pipeline derives a relation for (a, g1, b), the gate's
    depth set contains dep(p_c); checked on 10^4 random triples plus the
    triples of an actual small-box run (to exercise the positive branch)."""
    from picardmod.engine import _boundary_from_lift
    from picardmod.hermitian import depth, primitive_integral_lift

    rng = random.Random(23)
    reps = [w.point for w in ws.witnesses]
    small = enumerate_relations(2, table16, ws, ExponentBounds(1, 1, 1, 0.0))
    triples = [
        (rel.a - 1, rel.g1, rel.b - 1)
        for rel in small.relations
        if rel.b is not None
    ]
    for _ in range(10_000):
        triples.append(
            (
                rng.randrange(len(reps)),
                CuspElement(
                    R2,
                    rng.randint(0, 1),
                    rng.randint(-bounds2.n, bounds2.n),
                    rng.randint(-bounds2.m, bounds2.m),
                    rng.randint(-bounds2.l, bounds2.l),
                ),
                rng.randrange(len(reps)),
            )
        )
    hits = 0
    for a, g1, b in triples:
        X = (ws.witnesses[a].matrix * g1.matrix()).mat_vec(
            primitive_integral_lift(reps[b])
        )
        k = X[2].norm()
        gate = cygan_gate(ws.witnesses[a], g1, reps[b], 16)
        if k == 0:
            assert gate == set()  # the cusp case carries no finite depth
        elif k <= 16:
            c_depth = depth(_boundary_from_lift(X), R2)
            if c_depth <= 16:
                hits += 1
                assert gate == {c_depth}, (a, b, g1)
    assert hits >= len(small.relations) - small.case_counts["c_inf"] - small.case_counts["b_inf"]


def test_relation_run_smoke(ws, table16):
    """Tiny box: the distinguished involution relation appears and verifies."""
    bounds = ExponentBounds(1, 1, 1, 0.0)
    run = enumerate_relations(2, table16, ws, bounds)
    assert run.raw_count > 0
    # the I0*I0 relation: a = b = the depth-1 orbit, trivial cusp letters
    i0_sq = [rel for rel in run.relations if rel.letters == (("I0", 2),)]
    assert len(i0_sq) == 1 and i0_sq[0].c is None
    # every relation re-verified already; check Lemma-distance identity on finite ones
    from picardmod.hermitian import depth

    reps = [w.point for w in ws.witnesses]
    for rel in run.relations[:200]:
        if rel.b is None or rel.c is None:
            continue
        wa = ws.witnesses[rel.a - 1]
        pb = reps[rel.b - 1]
        pc = reps[rel.c - 1]
        d4 = cygan_dist4(wa.inv_point(), rel.g1.act(pb))
        assert d4 * depth(wa.point, R2) * depth(pb, R2) == 4 * depth(pc, R2)


def test_workers_reproducible(ws, table16):
    bounds = ExponentBounds(2, 1, 1, 0.0)
    run1 = enumerate_relations(2, table16, ws, bounds, workers=1)
    run2 = enumerate_relations(2, table16, ws, bounds, workers=2)
    assert [r.line() for r in run1.relations] == [r.line() for r in run2.relations]


def test_assemble_presentation_smoke(ws, table16):
    bounds = ExponentBounds(1, 1, 1, 0.0)
    run = enumerate_relations(2, table16, ws, bounds)
    pres = assemble_presentation(2, ws, run)
    assert len(pres.generators) == 4 + 46
    # cusp relators are included and parse back
    gi = pres.gen_index()
    assert parse_word("R R", gi) in pres.relators
