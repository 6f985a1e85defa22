"""Heisenberg group law, Cygan metrics, cusp stabilizer and its normal form.

Boundary points carry t with v = t*sqrt(d).  The cusp stabilizer of
infinity is generated by two horizontal translations Tx, Ty, a vertical
translation Tv and the order-2 rotation R; every element has a unique
normal form R^p Tv^n Tx^m Ty^l (p in {0,1}).

Supported cusp lattices: d=2 with (Tx, Ty, Tv) translating by 2, i*sqrt(2)
and (0, 2*sqrt(2)); d=11 with translations by 1, tau and (0, 2*sqrt(11)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .hermitian import (
    GroupMatrix,
    HeisPoint,
    HVector,
    herm_product,
    identity_matrix,
    standard_lift,
)
from .rings import QuadElement, QuadRing

__all__ = [
    "heis_mul",
    "heis_inverse",
    "translation_matrix",
    "rotation_matrix_R",
    "cygan_dist4",
    "extended_cygan_dist4",
    "CuspElement",
    "normal_form",
    "canonicalize",
    "prism_vertices",
    "prism_contains",
    "CuspPresentation",
    "cusp_presentation",
]

CUSP_D = (2, 11)


def _twist(lam: QuadElement, z: QuadElement) -> Fraction:
    """2*Im(lam * conj(z)) in units of sqrt(d)."""
    if lam.ring.is_tau:
        return lam.b * z.a - lam.a * z.b
    return 2 * (lam.b * z.a - lam.a * z.b)


def heis_mul(p: HeisPoint, q: HeisPoint) -> HeisPoint:
    """(z1,v1)(z2,v2) = (z1+z2, v1+v2+2 Im(z1 conj z2)), v in t*sqrt(d) units."""
    return HeisPoint(p.z + q.z, p.t + q.t + _twist(p.z, q.z))


def heis_inverse(p: HeisPoint) -> HeisPoint:
    return HeisPoint(-p.z, -p.t)


def translation_matrix(p: HeisPoint):
    """The Heisenberg translation matrix T_{(z, t sqrt d)}.

    Returns a GroupMatrix when the corner entry is integral, else the raw
    row array (a field matrix) for callers that only need the action.
    """
    ring = p.ring
    corner = (ring.element(-p.z.norm()) + ring.sqrt_d().scaled(p.t)).scaled(
        Fraction(1, 2)
    )
    rows = [
        [ring.one(), -p.z.conjugate(), corner],
        [ring.zero(), ring.one(), p.z],
        [ring.zero(), ring.zero(), ring.one()],
    ]
    if all(e.is_integer for r in rows for e in r):
        return GroupMatrix(rows, name="T", check=False)
    return rows


def rotation_matrix_R(ring: QuadRing) -> GroupMatrix:
    """diag(1,-1,1): the order-2 Heisenberg rotation (z,t) -> (-z,t)."""
    one, zero = ring.one(), ring.zero()
    return GroupMatrix(
        [[one, zero, zero], [zero, -one, zero], [zero, zero, one]],
        name="R",
        check=False,
    )


def cygan_dist4(p: HeisPoint, q: HeisPoint) -> Fraction:
    """Fourth power of the Cygan distance, an exact rational."""
    dz = p.z - q.z
    tterm = p.t - q.t + _twist(p.z, q.z)
    d = p.ring.d
    return dz.norm() ** 2 + d * tterm * tterm


def extended_cygan_dist4(p: HeisPoint, up, q: HeisPoint, uq) -> Fraction:
    """Fourth power of the extended Cygan distance between points at heights up, uq."""
    dz = p.z - q.z
    tterm = p.t - q.t + _twist(p.z, q.z)
    d = p.ring.d
    return (dz.norm() + abs(Fraction(up) - Fraction(uq))) ** 2 + d * tterm * tterm


# -- cusp lattice parameters -------------------------------------------------


def _x_step(ring: QuadRing) -> int:
    # Tx translates by _x_step(ring) (real direction); Ty by omega
    return 2 if ring.d == 2 else 1


def _check_cusp_ring(ring: QuadRing) -> None:
    if ring.d not in CUSP_D:
        raise ValueError(f"cusp machinery supports d in {CUSP_D}, got d={ring.d}")


@dataclass(frozen=True)
class CuspElement:
    """Normal form R^p Tv^n Tx^m Ty^l of a cusp stabilizer element."""

    ring: QuadRing
    p: int
    n: int
    m: int
    l: int

    def __post_init__(self):
        _check_cusp_ring(self.ring)
        if self.p not in (0, 1):
            raise ValueError("p must be 0 or 1")

    # translation part as a lattice Heisenberg element (integer t units)
    def heis_part(self) -> HeisPoint:
        r = self.ring
        if r.d == 2:
            z = r.element(2 * self.m, self.l)
            t = 2 * self.n - 4 * self.m * self.l
        else:
            z = r.element(self.m, self.l)
            t = 2 * self.n + self.m + self.l - self.m * self.l
        return HeisPoint(z, t)

    @staticmethod
    def from_parts(ring: QuadRing, p: int, h: HeisPoint) -> "CuspElement":
        za, zb, t = h.z.a, h.z.b, h.t
        if za.denominator != 1 or zb.denominator != 1 or t.denominator != 1:
            raise ValueError("translation part is not a lattice element")
        za, zb, t = int(za), int(zb), int(t)
        if ring.d == 2:
            if za % 2 or t % 2:
                raise ValueError("not in the d=2 cusp lattice")
            m, l = za // 2, zb
            n = (t + 4 * m * l) // 2
        else:
            m, l = za, zb
            if (t - m - l + m * l) % 2:
                raise ValueError("not in the d=11 cusp lattice")
            n = (t - m - l + m * l) // 2
        return CuspElement(ring, p, n, m, l)

    @property
    def is_identity(self) -> bool:
        return self.p == 0 and self.n == 0 and self.m == 0 and self.l == 0

    def __mul__(self, other: "CuspElement") -> "CuspElement":
        # R^p1 T_h1 . R^p2 T_h2 = R^(p1+p2) T_{R^p2(h1) . h2}
        h1 = self.heis_part()
        if other.p:
            h1 = HeisPoint(-h1.z, h1.t)
        h = heis_mul(h1, other.heis_part())
        return CuspElement.from_parts(self.ring, (self.p + other.p) % 2, h)

    def inverse(self) -> "CuspElement":
        h = self.heis_part()
        hi = HeisPoint(-h.z, -h.t)
        if self.p:
            hi = HeisPoint(-hi.z, hi.t)
        return CuspElement.from_parts(self.ring, self.p, hi)

    def act(self, pt: HeisPoint) -> HeisPoint:
        """Boundary action of R^p T_h: translate by h, then flip when p = 1."""
        h = self.heis_part()
        z = h.z + pt.z
        t = h.t + pt.t + _twist(h.z, pt.z)
        return HeisPoint(-z if self.p else z, t)

    def matrix(self) -> GroupMatrix:
        R = rotation_matrix_R(self.ring)
        h = self.heis_part()
        T = translation_matrix(h)
        assert isinstance(T, GroupMatrix)
        return (R * T) if self.p else T

    def word(self) -> list[tuple[str, int]]:
        """Letters over (R, Tv, Tx, Ty) with exponents, identity -> []."""
        out = []
        if self.p:
            out.append(("R", 1))
        for name, e in (("Tv", self.n), ("Tx", self.m), ("Ty", self.l)):
            if e:
                out.append((name, e))
        return out

    def __repr__(self):
        return f"CuspElement(d={self.ring.d}, p={self.p}, n={self.n}, m={self.m}, l={self.l})"


def cusp_generators(ring: QuadRing) -> dict[str, CuspElement]:
    _check_cusp_ring(ring)
    return {
        "R": CuspElement(ring, 1, 0, 0, 0),
        "Tv": CuspElement(ring, 0, 1, 0, 0),
        "Tx": CuspElement(ring, 0, 0, 1, 0),
        "Ty": CuspElement(ring, 0, 0, 0, 1),
    }


def normal_form(M: GroupMatrix) -> CuspElement:
    """Exponents (p,n,m,l) with M projectively equal to R^p Tv^n Tx^m Ty^l.

    Raises ValueError when M does not stabilize infinity or falls outside
    the cusp lattice.
    """
    ring = M.ring
    _check_cusp_ring(ring)
    zero = ring.zero()
    if M.entry(1, 0) != zero or M.entry(2, 0) != zero or M.entry(2, 1) != zero:
        raise ValueError("matrix does not fix infinity in upper-triangular form")
    mu = M.entry(2, 2)
    if mu.norm() != 1:
        raise ValueError("corner entry is not a unit")
    # units are +-1 for d=2,11: rescale so the (3,3) entry is 1
    rows = [[e / mu for e in r] for r in M.rows]
    if rows[0][0] != ring.one():
        raise ValueError("not a cusp stabilizer element (diagonal)")
    m22 = rows[1][1]
    if m22 == ring.one():
        p = 0
    elif m22 == -ring.one():
        p = 1
    else:
        raise ValueError("middle diagonal entry is not a realizable unit")
    zh = rows[1][2] if p == 0 else -rows[1][2]
    if rows[0][1] != -zh.conjugate():
        raise ValueError("row 1 inconsistent with a Heisenberg translation")
    corner2 = rows[0][2].scaled(2) + zh.norm()  # = i t sqrt(d)
    re, im = corner2.sqrt_coords()
    if re != 0:
        raise ValueError("corner entry inconsistent with a Heisenberg translation")
    g = CuspElement.from_parts(ring, p, HeisPoint(zh, im))
    return g


# -- fundamental prism and canonical representatives --------------------------


def prism_vertices(ring: QuadRing) -> list[HeisPoint]:
    """The six vertices of the cusp fundamental prism."""
    _check_cusp_ring(ring)
    xs = _x_step(ring)
    base = [ring.zero(), ring.element(xs), ring.omega()]
    return [HeisPoint(z, t) for t in (0, 2) for z in base]


def _in_base_triangle(z: QuadElement) -> bool:
    a, b = z.a, z.b
    if a < 0 or b < 0:
        return False
    if z.ring.d == 2:
        return a / 2 + b <= 1
    return a + b <= 1


def prism_contains(pt: HeisPoint, closed_top: bool = False) -> bool:
    """Membership in the prism; t-window [0,2) by default, closed when asked."""
    tmax_ok = pt.t <= 2 if closed_top else pt.t < 2
    return _in_base_triangle(pt.z) and 0 <= pt.t and tmax_ok


def canonicalize(pt: HeisPoint) -> tuple[HeisPoint, CuspElement]:
    """Unique orbit representative in the prism plus the reducing element.

    Representative = lexicographic minimum of (Re-coeff, w-coeff, t) over
    the lattice reductions of pt and of R*pt that land in the closed base
    triangle with t in [0,2).  Returns (rep, g) with g.act(pt) == rep.
    """
    ring = pt.ring
    _check_cusp_ring(ring)
    xs = _x_step(ring)
    cands = []
    for pf in (0, 1):
        flip = CuspElement(ring, pf, 0, 0, 0)
        q = flip.act(pt)
        m = -math.floor(q.z.a / xs)
        l = -math.floor(q.z.b)
        g = CuspElement(ring, 0, 0, m, l) * flip
        q = g.act(pt)
        n = -math.floor(q.t / 2)
        g = CuspElement(ring, 0, n, 0, 0) * g
        q = HeisPoint(q.z, q.t + 2 * n)
        if _in_base_triangle(q.z):
            assert 0 <= q.t < 2
            cands.append((q.key(), q, g))
    if not cands:
        raise AssertionError(f"no prism candidate for {pt!r}")
    _, rep, g = min(cands, key=lambda c: c[0])
    return rep, g


# -- cusp presentations --------------------------------------------------------


@dataclass(frozen=True)
class CuspPresentation:
    d: int
    generators: tuple[str, ...]
    relators: tuple[str, ...]  # words in the presentation-file grammar


_CUSP_RELATORS = {
    # vertical period relation, commutation with Tv, R relations
    2: (
        "Tv^4 Tx Ty Tx^-1 Ty^-1",
        "Tx Tv Tx^-1 Tv^-1",
        "Ty Tv Ty^-1 Tv^-1",
        "R R",
        "R Tv R^-1 Tv^-1",
        "R Tx R Tx",
        "R Ty R Ty",
    ),
    11: (
        "Tv Tx Ty Tx^-1 Ty^-1",
        "Tx Tv Tx^-1 Tv^-1",
        "Ty Tv Ty^-1 Tv^-1",
        "R R",
        "R Tv R^-1 Tv^-1",
        "Tx R Tx^-1 R^-1 Tx^-2 Tv",
        "Ty R Ty^-1 R^-1 Ty^-2 Tv",
    ),
}


def cusp_presentation(d: int) -> CuspPresentation:
    if d not in _CUSP_RELATORS:
        raise ValueError(f"no cusp presentation for d={d}")
    return CuspPresentation(d, ("R", "Tv", "Tx", "Ty"), _CUSP_RELATORS[d])


def cusp_word_matrix(word: str, ring: QuadRing) -> GroupMatrix:
    """Evaluate a word over R/Tv/Tx/Ty as a matrix product."""
    gens = {k: v.matrix() for k, v in cusp_generators(ring).items()}
    M = identity_matrix(ring)
    for tok in word.split():
        name, _, exp = tok.partition("^")
        e = int(exp) if exp else 1
        G = gens[name] if e > 0 else gens[name].inverse()
        for _ in range(abs(e)):
            M = M * G
    return M
