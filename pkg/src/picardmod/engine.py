"""Generator assembly and relation enumeration for the cusped lattices.

Generators are the cusp stabilizer plus one witness matrix per rational
point orbit of depth at most the covering depth.  Candidate relations
come from sweeping A_a * g * lift(p_b) over the bounded cusp box and
keeping images of depth at most the covering depth; every emitted
relation is re-verified as an exact unit-scalar matrix identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .hermitian import (
    GroupMatrix,
    HeisPoint,
    INFINITY,
    Infinity,
    identity_matrix,
    primitive_integral_lift,
)
from .heisenberg import (
    CuspElement,
    canonicalize,
    cusp_generators,
    cusp_presentation,
    cygan_dist4,
    normal_form,
)
from .points import DepthTable
from .rings import QuadRing, quad_ring, solve_norm_equation

__all__ = [
    "verify_witness",
    "WitnessSet",
    "build_witness_set",
    "search_witness",
    "ExponentBounds",
    "exponent_bounds",
    "cygan_gate",
    "RawRelation",
    "enumerate_relations",
    "assemble_presentation",
]


def verify_witness(M: GroupMatrix, p) -> bool:
    """True iff M is integral, J-unitary and sends infinity to p exactly."""
    try:
        GroupMatrix(M.rows)  # integrality/unitarity/primitivity re-check
    except ValueError:
        return False
    img = M.apply(INFINITY)
    if isinstance(p, Infinity) or isinstance(img, Infinity):
        return isinstance(p, Infinity) and isinstance(img, Infinity)
    return img == p


@dataclass
class Witness:
    name: str
    point: HeisPoint  # canonical representative; matrix sends infinity here
    matrix: GroupMatrix
    source: str  # fixture matrix this was derived from

    def inv_point(self) -> HeisPoint:
        """A^-1(infinity) as a boundary point (never infinity for depth >= 1)."""
        img = self.matrix.inverse().apply(INFINITY)
        assert isinstance(img, HeisPoint)
        return img


@dataclass
class WitnessSet:
    ring: QuadRing
    reps: list[HeisPoint]
    witnesses: list[Witness]  # aligned with reps
    duplicates: list[tuple[str, str]] = field(default_factory=list)
    unmatched: list[str] = field(default_factory=list)  # fixture matrices off-table
    missing: list[HeisPoint] = field(default_factory=list)  # reps with no witness


def build_witness_set(table: DepthTable, matrices: list[GroupMatrix]) -> WitnessSet:
    """Assign one matrix per orbit representative, composing a cusp correction
    so the image is exactly the representative."""
    ring = quad_ring(table.d)
    reps = [p for _, p in table.all_points()]
    index = {p.key(): i for i, p in enumerate(reps)}
    assigned: dict[int, Witness] = {}
    dupes: list[tuple[str, str]] = []
    unmatched: list[str] = []
    for M in matrices:
        img = M.apply(INFINITY)
        if isinstance(img, Infinity):
            unmatched.append(M.name)
            continue
        rep, g = canonicalize(img)
        i = index.get(rep.key())
        if i is None:
            unmatched.append(M.name)
            continue
        if i in assigned:
            dupes.append((M.name, assigned[i].source))
            continue
        M2 = (g.matrix() * M) if not g.is_identity else M
        M2.name = M.name
        assert M2.apply(INFINITY) == rep
        assigned[i] = Witness(M.name, rep, M2, M.name)
    missing = [reps[i] for i in range(len(reps)) if i not in assigned]
    witnesses = [assigned[i] for i in range(len(reps)) if i in assigned]
    kept_reps = [w.point for w in witnesses]
    ws = WitnessSet(ring, kept_reps, witnesses, dupes, unmatched, missing)
    return ws


def search_witness(
    ring: QuadRing, p: HeisPoint, budget: int, seeds: list[GroupMatrix] | None = None
):
    """Breadth-first search over products of known elements for a matrix
    sending infinity into p's orbit; exact, None when the budget runs out."""
    target, _ = canonicalize(p)
    gens: list[GroupMatrix] = []
    base = seeds or []
    I0 = _standard_inversion(ring)
    base = [I0] + [g.matrix() for g in cusp_generators(ring).values()] + base
    for M in base:
        gens.extend([M, M.inverse()])
    ident = identity_matrix(ring)
    frontier = [ident]
    seen = {ident.proj_key()}
    for _ in range(budget):
        nxt = []
        for M in frontier:
            for G in gens:
                N = M * G
                key = N.proj_key()
                if key in seen:
                    continue
                seen.add(key)
                img = N.apply(INFINITY)
                if isinstance(img, HeisPoint):
                    rep, g = canonicalize(img)
                    if rep == target:
                        out = g.matrix() * N
                        assert out.apply(INFINITY) == target
                        return out
                nxt.append(N)
        frontier = nxt
    return None


def _standard_inversion(ring: QuadRing) -> GroupMatrix:
    one, zero = ring.one(), ring.zero()
    return GroupMatrix(
        [[zero, zero, one], [zero, -one, zero], [one, zero, zero]],
        name="I0",
        check=False,
    )


# -- exponent bounds ------------------------------------------------------------


class _Root4:
    """Certified rational enclosure of x^(1/4) for rational x >= 0."""

    def __init__(self, x: Fraction):
        self.x = Fraction(x)

    def interval(self, digits: int) -> tuple[Fraction, Fraction]:
        scale = 10**digits
        N = (self.x.numerator * scale**4) // self.x.denominator
        s = math.isqrt(math.isqrt(N))
        return Fraction(s, scale), Fraction(s + 1, scale)


def _sum_interval(terms, digits):
    lo = Fraction(0)
    hi = Fraction(0)
    for t in terms:
        if isinstance(t, _Root4):
            a, b = t.interval(digits)
        else:
            a = b = Fraction(t)
        lo += a
        hi += b
    return lo, hi


@dataclass(frozen=True)
class ExponentBounds:
    n: int
    m: int
    l: int
    rhs_display: float

    def contains(self, g: CuspElement) -> bool:
        return abs(g.n) <= self.n and abs(g.m) <= self.m and abs(g.l) <= self.l

    def box(self) -> tuple[int, int, int]:
        return (self.n, self.m, self.l)


def max_point_dist4(points) -> Fraction:
    """max over points of the fourth power of their Cygan distance to the origin."""
    best = Fraction(0)
    for p in points:
        d4 = p.z.norm() ** 2 + p.ring.d * p.t * p.t
        best = max(best, d4)
    return best


def max_realized_depth(ring: QuadRing, cover_depth: int) -> int:
    """Largest k <= cover_depth represented by the norm form."""
    for k in range(cover_depth, 0, -1):
        if solve_norm_equation(k, ring):
            return k
    raise ValueError("no realizable depth at all")


def exponent_bounds(
    d: int,
    cover_depth: int,
    table: DepthTable | None = None,
    witnesses: WitnessSet | None = None,
    published_maxima: tuple[Fraction, Fraction] | None = None,
) -> ExponentBounds:
    """Largest cusp exponents (|n|, |m|, |l|) compatible with a relation.

    The scan radius is the largest of the three triangle-inequality bounds:
    given S = largest realizable depth <= cover_depth, M_pts / M_inv the
    maximal origin distances of the representatives and of the A_i^-1(inf),
    the radius is max((4S)^(1/4) + M_pts + M_inv, (4S)^(1/4) + 2*M_pts,
    (4S)^(1/4) + 2*M_inv).  Either supply table and witnesses, or published
    decimal maxima (M_pts, M_inv) as exact rationals.
    """
    ring = quad_ring(d)
    S = max_realized_depth(ring, cover_depth)
    depth_term = _Root4(Fraction(4 * S))
    if table is not None and witnesses is not None:
        mpts: object = _Root4(max_point_dist4(p for _, p in table.all_points()))
        minv: object = _Root4(max_point_dist4(w.inv_point() for w in witnesses.witnesses))
    elif published_maxima is not None:
        mpts, minv = (Fraction(x) for x in published_maxima)
    else:
        raise ValueError("need table+witnesses or published_maxima")

    digits = 30
    candidates = [
        (depth_term, mpts, minv),
        (depth_term, mpts, mpts),
        (depth_term, minv, minv),
    ]
    enclosures = [_sum_interval(terms, digits) for terms in candidates]
    lo = max(a for a, _ in enclosures)
    hi = max(b for _, b in enclosures)
    r4lo, r4hi = lo**4, hi**4

    def le_r4(value: Fraction) -> bool:
        if value <= r4lo:
            return True
        if value > r4hi:
            return False
        raise ArithmeticError(
            f"scan radius enclosure too wide near {value}; increase digits"
        )

    # quadratic form of the translation part and the vertical coefficient
    if d == 2:
        qform = lambda m, l: Fraction((2 * m) ** 2 + 2 * l * l)
        tstep_offset = lambda m, l: (4 * m * l, 2)  # t = 2n - 4ml
        vmul = 2
    elif d == 11:
        qform = lambda m, l: Fraction(m * m + m * l + 3 * l * l)
        tstep_offset = lambda m, l: (-(m + l - m * l), 2)  # t = 2n + m + l - ml
        vmul = 11
    else:
        raise ValueError("exponent bounds support d in (2, 11)")

    max_n = max_m = max_l = 0
    span = 1 + math.isqrt(int(r4hi) + 1)  # |m|,|l| can never exceed sqrt(radius^2)
    for m in range(-span, span + 1):
        for l in range(-span, span + 1):
            q2 = qform(m, l) ** 2
            if not le_r4(q2):
                continue
            rem = r4lo - q2  # safe (smaller) budget for the vertical part
            # largest |t| with vmul*t^2 <= rem, then n from t = tcoef
            if rem < 0:
                continue
            tmax = _isqrt_frac(rem / vmul)
            # the enclosure must also exclude tmax+1, else it is too wide
            if le_r4(q2 + vmul * (tmax + 1) ** 2):
                raise ArithmeticError("scan radius enclosure inconsistent")
            off, step = tstep_offset(m, l)
            # admissible t have t = -off + step*n; check some n exists
            best_t = None
            for t in (tmax, tmax - 1):
                if t < 0:
                    continue
                for sg in (1, -1):
                    tt = sg * t
                    if (tt + off) % step == 0:
                        n = (tt + off) // step
                        # confirm with the exact inequality at the safe radius
                        if le_r4(q2 + vmul * tt * tt):
                            max_n = max(max_n, abs(n))
                            best_t = tt
            if best_t is None:
                # minimal |t| of the right parity must fit for (m,l) to count
                minparity = abs(off) % step
                if not le_r4(q2 + vmul * minparity * minparity):
                    continue
            max_m = max(max_m, abs(m))
            max_l = max(max_l, abs(l))
    return ExponentBounds(max_n, max_m, max_l, float(hi))


def _isqrt_frac(x: Fraction) -> int:
    if x < 0:
        return -1
    return math.isqrt(x.numerator // x.denominator)


# -- the relation gate -----------------------------------------------------------


def cygan_gate(
    wa: Witness, g1: CuspElement, pb: HeisPoint, cover_depth: int
) -> set[int]:
    """Depths c consistent with the distance identity
    dist^4(A_a^-1(inf), g1 p_b) * dep(a) * dep(b) = 4 * dep(c).

    Empty set means no relation can arise; dist 0 means the image is the
    cusp itself (handled by the caller as the c = infinity case).
    """
    ring = pb.ring
    from .hermitian import depth as _depth

    da = _depth(wa.point, ring)
    db = _depth(pb, ring)
    d4 = cygan_dist4(wa.inv_point(), g1.act(pb))
    val = d4 * da * db / 4
    if val == 0:
        return set()
    if val.denominator != 1 or val > cover_depth:
        return set()
    k = int(val)
    if not solve_norm_equation(k, ring):
        return set()
    return {k}


# -- relation enumeration ----------------------------------------------------------


@dataclass
class RawRelation:
    a: int  # 1-based witness index
    b: int | None  # None encodes the cusp slot (p_b = infinity)
    c: int | None
    g1: CuspElement
    g3: CuspElement | None
    gstar: CuspElement
    letters: tuple[tuple[str, int], ...]  # word over generator names

    def line(self) -> str:
        bs = "inf" if self.b is None else str(self.b)
        cs = "inf" if self.c is None else str(self.c)
        word = " ".join(n if e == 1 else f"{n}^{e}" for n, e in self.letters)
        return f"{self.a} {bs} {cs} : {word}"


def _cusp_letters(g: CuspElement, inverse=False) -> list[tuple[str, int]]:
    letters = g.word()
    if inverse:
        letters = [(n, -e) for n, e in reversed(letters)]
    return letters


def _collapse(letters) -> tuple[tuple[str, int], ...]:
    out: list[tuple[str, int]] = []
    for n, e in letters:
        if e == 0:
            continue
        if out and out[-1][0] == n:
            e2 = out[-1][1] + e
            out.pop()
            if e2:
                out.append((n, e2))
        else:
            out.append((n, e))
    return tuple(out)


def _cusp_box(ring: QuadRing, bounds: ExponentBounds):
    for p in (0, 1):
        for n in range(-bounds.n, bounds.n + 1):
            for m in range(-bounds.m, bounds.m + 1):
                for l in range(-bounds.l, bounds.l + 1):
                    yield CuspElement(ring, p, n, m, l)


def _elt_pair(e) -> tuple[int, int]:
    assert e.a.denominator == 1 and e.b.denominator == 1
    return int(e.a), int(e.b)


def _matrix_pair_arrays(M: GroupMatrix):
    a = np.array([[_elt_pair(e)[0] for e in row] for row in M.rows], dtype=np.int64)
    b = np.array([[_elt_pair(e)[1] for e in row] for row in M.rows], dtype=np.int64)
    return a, b


# integral matrices as 3x3 tuples of (a, b) pairs: exact and far faster than
# Fraction-backed GroupMatrix products in the sweep's inner loops
def _imat(M: GroupMatrix):
    return tuple(tuple(_elt_pair(e) for e in row) for row in M.rows)


def _imat_mul(A, B, d, tau_c):
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            ra = rb = 0
            for k in range(3):
                xa, xb = A[i][k]
                ya, yb = B[k][j]
                if tau_c < 0:
                    ra += xa * ya - d * xb * yb
                    rb += xa * yb + xb * ya
                else:
                    ra += xa * ya - tau_c * xb * yb
                    rb += xa * yb + xb * ya + xb * yb
            row.append((ra, rb))
        out.append(tuple(row))
    return tuple(out)


def _imat_vec(A, v, d, tau_c):
    out = []
    for i in range(3):
        ra = rb = 0
        for k in range(3):
            xa, xb = A[i][k]
            ya, yb = v[k]
            if tau_c < 0:
                ra += xa * ya - d * xb * yb
                rb += xa * yb + xb * ya
            else:
                ra += xa * ya - tau_c * xb * yb
                rb += xa * yb + xb * ya + xb * yb
        out.append((ra, rb))
    return tuple(out)


def _imat_conj_pair(pair, tau_c):
    a, b = pair
    return (a + b, -b) if tau_c >= 0 else (a, -b)


def _imat_inverse(A, tau_c):
    # J M* J: reverse-transpose with conjugation (valid for J-unitary M)
    return tuple(
        tuple(_imat_conj_pair(A[2 - j][2 - i], tau_c) for j in range(3))
        for i in range(3)
    )


def _imat_is_unit_scalar(A, d, tau_c) -> bool:
    if any(A[i][j] != (0, 0) for i in range(3) for j in range(3) if i != j):
        return False
    if not (A[0][0] == A[1][1] == A[2][2]):
        return False
    a, b = A[0][0]
    n = a * a + a * b + tau_c * b * b if tau_c >= 0 else a * a + d * b * b
    return n == 1


def _imat_to_group(A, ring) -> GroupMatrix:
    return GroupMatrix(
        [[ring.element(a, b) for (a, b) in row] for row in A], check=False
    )


@dataclass
class RelationRun:
    relations: list[RawRelation]
    raw_count: int
    dedup_count: int
    case_counts: dict[str, int]


def enumerate_relations(
    d: int,
    table: DepthTable,
    witnesses: WitnessSet,
    bounds: ExponentBounds,
    workers: int = 1,
) -> RelationRun:
    """All candidate relations over the bounded cusp box, exactly verified."""
    ring = quad_ring(d)
    ctx = _RelationContext(ring, table, witnesses, bounds)
    a_indices = list(range(len(witnesses.witnesses)))
    if workers > 1:
        chunks = _run_parallel(ctx, a_indices, workers)
    else:
        chunks = [ctx.sweep_a(a) for a in a_indices]
    relations: list[RawRelation] = []
    for ch in chunks:
        relations.extend(ch)
    relations.extend(ctx.case3())
    for rel in relations:
        if not ctx.verify(rel):
            raise ArithmeticError(f"relation failed matrix verification: {rel.line()}")
    words = set()
    for rel in relations:
        words.add(_word_key(rel.letters))
    cases = {"finite": 0, "c_inf": 0, "b_inf": 0}
    for rel in relations:
        if rel.b is None:
            cases["b_inf"] += 1
        elif rel.c is None:
            cases["c_inf"] += 1
        else:
            cases["finite"] += 1
    return RelationRun(relations, len(relations), len(words), cases)


def _word_key(letters):
    flat = []
    for n, e in letters:
        flat.extend([(n, 1 if e > 0 else -1)] * abs(e))
    # free reduction over the name alphabet
    out = []
    for x in flat:
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class _RelationContext:
    def __init__(self, ring, table, witnesses, bounds):
        self.ring = ring
        self.table = table
        self.ws = witnesses
        self.bounds = bounds
        self.reps = [w.point for w in witnesses.witnesses]
        self.index = {p.key(): i for i, p in enumerate(self.reps)}
        self.lifts = [primitive_integral_lift(p) for p in self.reps]
        self.cover = table.max_depth
        self.box = list(_cusp_box(ring, bounds))
        self.d = ring.d
        self.tc = ring.tau_c if ring.is_tau else -1
        # integer forms of the lifts, witnesses and the cusp box
        self.Pa = np.array(
            [[_elt_pair(L[i])[0] for L in self.lifts] for i in range(3)], dtype=np.int64
        )
        self.Pb = np.array(
            [[_elt_pair(L[i])[1] for L in self.lifts] for i in range(3)], dtype=np.int64
        )
        G = [g.matrix() for g in self.box]
        self.Ga = np.stack([_matrix_pair_arrays(M)[0] for M in G])
        self.Gb = np.stack([_matrix_pair_arrays(M)[1] for M in G])
        self.iG = [_imat(M) for M in G]
        self.iA = [_imat(w.matrix) for w in witnesses.witnesses]
        self.iA_inv = [_imat_inverse(A, self.tc) for A in self.iA]
        self.ilifts = [tuple(_elt_pair(L[i]) for i in range(3)) for L in self.lifts]
        gen_mats = {w.name: w.matrix for w in witnesses.witnesses} | {
            k: v.matrix() for k, v in cusp_generators(ring).items()
        }
        self.igens = {k: _imat(M) for k, M in gen_mats.items()}
        self.igens_inv = {k: _imat_inverse(A, self.tc) for k, A in self.igens.items()}
        self._headroom()

    def _headroom(self):
        mg = max(int(abs(x).max()) for x in (self.Ga, self.Gb))
        mp = max(int(abs(x).max()) for x in (self.Pa, self.Pb))
        ma = 0
        for w in self.ws.witnesses:
            aa, bb = _matrix_pair_arrays(w.matrix)
            ma = max(ma, int(abs(aa).max()), int(abs(bb).max()))
        # row3(A G) entries <= 3*ma*mg; X entries <= 3 of those * mp; norm ~ X^2
        x = 9 * ma * mg * mp
        kernels.check_int64_headroom(x, x * (self.ring.d + 1))

    def sweep_a(self, a: int) -> list[RawRelation]:
        ring = self.ring
        Aa = self.ws.witnesses[a].matrix
        aa, ab = _matrix_pair_arrays(Aa)
        row_a, row_b = aa[2], ab[2]
        # third row of Aa*G_k for every box element, as ring pairs
        if ring.is_tau:
            c = ring.tau_c
            Ra = np.einsum("i,kij->kj", row_a, self.Ga) - c * np.einsum(
                "i,kij->kj", row_b, self.Gb
            )
            Rb = (
                np.einsum("i,kij->kj", row_a, self.Gb)
                + np.einsum("i,kij->kj", row_b, self.Ga)
                + np.einsum("i,kij->kj", row_b, self.Gb)
            )
        else:
            Ra = np.einsum("i,kij->kj", row_a, self.Ga) - ring.d * np.einsum(
                "i,kij->kj", row_b, self.Gb
            )
            Rb = np.einsum("i,kij->kj", row_a, self.Gb) + np.einsum(
                "i,kij->kj", row_b, self.Ga
            )
        norms = kernels.sweep_norms(Ra, Rb, self.Pa, self.Pb, ring.d, self.tc)
        hits = np.argwhere(norms <= self.cover)
        out: list[RawRelation] = []
        for k, b in sorted(map(tuple, hits)):
            rel = self._emit(a, int(b), int(k), int(norms[k, b]))
            if rel is not None:
                out.append(rel)
        return out

    def _emit(self, a: int, b: int, k: int, norm: int) -> RawRelation | None:
        ring = self.ring
        g1 = self.box[k]
        M = _imat_mul(self.iA[a], self.iG[k], self.d, self.tc)
        name_a = self.ws.witnesses[a].name
        name_b = self.ws.witnesses[b].name
        if norm == 0:
            # image is the cusp: relation A_a g1 A_b = g*
            W = _imat_mul(M, self.iA[b], self.d, self.tc)
            gstar = normal_form(_imat_to_group(W, ring))
            if not self.bounds.contains(gstar):
                return None
            letters = _collapse(
                _cusp_letters(gstar, inverse=True)
                + [(name_a, 1)]
                + _cusp_letters(g1)
                + [(name_b, 1)]
            )
            return RawRelation(a + 1, b + 1, None, g1, None, gstar, letters)
        X = _imat_vec(M, self.ilifts[b], self.d, self.tc)
        img = _boundary_from_lift(
            (ring.element(*X[0]), ring.element(*X[1]), ring.element(*X[2]))
        )
        rep, g = canonicalize(img)
        ci = self.index.get(rep.key())
        if ci is None:
            return None  # depth fine but the orbit has no witness (gap)
        g3 = g.inverse()
        W = _imat_mul(
            _imat_mul(self.iA_inv[ci], _imat(g.matrix()), self.d, self.tc),
            _imat_mul(M, self.iA[b], self.d, self.tc),
            self.d,
            self.tc,
        )
        gstar = normal_form(_imat_to_group(W, ring))
        if not self.bounds.contains(gstar) or not self.bounds.contains(g3):
            return None
        name_c = self.ws.witnesses[ci].name
        letters = _collapse(
            _cusp_letters(gstar, inverse=True)
            + [(name_c, -1)]
            + _cusp_letters(g3, inverse=True)
            + [(name_a, 1)]
            + _cusp_letters(g1)
            + [(name_b, 1)]
        )
        return RawRelation(a + 1, b + 1, ci + 1, g1, g3, gstar, letters)

    def case3(self) -> list[RawRelation]:
        """p_b = infinity: conjugation relations A_a^-1 g1 A_a = g*.

        A non-trivial cusp element fixes p_a iff it flips (p = 1) with
        translation part exactly -2*z_a and the forced vertical shift, so
        there is at most one candidate per witness.
        """
        ring = self.ring
        mpts4 = max_point_dist4(self.reps)
        cap = 16 * mpts4  # (2 * max point distance)^4
        out = []
        for a, w in enumerate(self.ws.witnesses):
            pa = w.point
            zh = pa.z.scaled(-2)
            if not zh.is_integer:
                continue
            twist = (
                (zh.b * pa.z.a - zh.a * pa.z.b)
                if ring.is_tau
                else 2 * (zh.b * pa.z.a - zh.a * pa.z.b)
            )
            try:
                g1 = CuspElement.from_parts(ring, 1, HeisPoint(zh, -twist))
            except ValueError:
                continue
            assert g1.act(pa) == pa
            h = g1.heis_part()
            d4 = h.z.norm() ** 2 + ring.d * h.t * h.t
            if d4 > cap:
                continue
            W = _imat_mul(
                _imat_mul(self.iA_inv[a], _imat(g1.matrix()), self.d, self.tc),
                self.iA[a],
                self.d,
                self.tc,
            )
            try:
                gstar = normal_form(_imat_to_group(W, ring))
            except ValueError:
                continue
            if not self.bounds.contains(gstar):
                continue
            letters = _collapse(
                _cusp_letters(gstar, inverse=True)
                + [(w.name, -1)]
                + _cusp_letters(g1)
                + [(w.name, 1)]
            )
            out.append(RawRelation(a + 1, None, a + 1, g1, None, gstar, letters))
        return out

    def verify(self, rel: RawRelation) -> bool:
        M = None
        for name, e in rel.letters:
            G = self.igens[name] if e > 0 else self.igens_inv[name]
            for _ in range(abs(e)):
                M = G if M is None else _imat_mul(M, G, self.d, self.tc)
        if M is None:
            return False
        return _imat_is_unit_scalar(M, self.d, self.tc)


def _boundary_from_lift(X) -> HeisPoint:
    z = X[1] / X[2]
    w = X[0] / X[2]
    rest = w.scaled(2) + z.norm()
    re, im = rest.sqrt_coords()
    if re != 0:
        raise ArithmeticError("non-isotropic image")
    return HeisPoint(z, im)


# -- parallel driver ---------------------------------------------------------------

_WORKER_CTX: _RelationContext | None = None


def _worker_init(ring_d, table, witnesses, bounds):
    global _WORKER_CTX
    _WORKER_CTX = _RelationContext(quad_ring(ring_d), table, witnesses, bounds)


def _worker_sweep(a: int):
    assert _WORKER_CTX is not None
    return _WORKER_CTX.sweep_a(a)


def _run_parallel(ctx: _RelationContext, a_indices, workers: int):
    import multiprocessing as mp

    mp_ctx = mp.get_context("fork")
    with mp_ctx.Pool(
        workers,
        initializer=_worker_init,
        initargs=(ctx.ring.d, ctx.table, ctx.ws, ctx.bounds),
    ) as pool:
        return pool.map(_worker_sweep, a_indices)


# -- presentation assembly ------------------------------------------------------------


def assemble_presentation(d: int, witnesses: WitnessSet, run: RelationRun):
    """Cusp presentation + witness generators + enumerated relators."""
    from .fpgroups import Presentation, parse_word, word_from_letters

    cp = cusp_presentation(d)
    gens = list(cp.generators) + [w.name for w in witnesses.witnesses]
    gi = {g: i for i, g in enumerate(gens)}
    relators = [parse_word(w, gi) for w in cp.relators]
    seen = set()
    for rel in run.relations:
        w = word_from_letters(list(rel.letters), gi)
        if w and w not in seen:
            seen.add(w)
            relators.append(w)
    return Presentation(gens, relators)
