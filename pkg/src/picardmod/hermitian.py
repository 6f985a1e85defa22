"""Siegel-model Hermitian form, integral lifts, levels and the projective action.

The form is <Z,W> = W* J Z with J anti-diagonal (1,1,1).  Boundary points
are either the distinguished point at infinity (the class of (1,0,0)^T) or
a Heisenberg point (z, t) meaning horospherical coordinates (z, t*sqrt(d), 0).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

from .rings import (
    QuadElement,
    QuadRing,
    format_element,
    gcd_many,
    is_primitive,
    parse_element,
    parse_rational,
    unit_canonical,
    units,
)

__all__ = [
    "HeisPoint",
    "Infinity",
    "INFINITY",
    "HVector",
    "GroupMatrix",
    "herm_product",
    "standard_lift",
    "primitive_integral_lift",
    "level",
    "depth",
    "is_unitary",
    "bergman_distance_cosh2",
    "read_matrix_file",
    "write_matrix_file",
]


class Infinity:
    """The cusp at infinity; a module-level singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = Infinity()


class HeisPoint:
    """Boundary point (z, t) with z in Q(i*sqrt(d)) and v = t*sqrt(d)."""

    __slots__ = ("z", "t")

    def __init__(self, z: QuadElement, t):
        self.z = z
        self.t = Fraction(t)

    @property
    def ring(self) -> QuadRing:
        return self.z.ring

    def key(self):
        return (self.z.a, self.z.b, self.t)

    def __eq__(self, other):
        if not isinstance(other, HeisPoint):
            return NotImplemented
        return self.z == other.z and self.t == other.t

    def __hash__(self):
        return hash((self.z, self.t))

    def __repr__(self):
        return f"<({format_element(self.z)} ; {self.t})>"

    def text(self) -> str:
        return f"{format_element(self.z)} ; {self.t}"

    @staticmethod
    def parse(text: str, ring: QuadRing) -> "HeisPoint":
        zs, _, ts = text.partition(";")
        if not ts:
            raise ValueError(f"expected 'z ; t', got {text!r}")
        return HeisPoint(parse_element(zs, ring), parse_rational(ts))


BoundaryPoint = HeisPoint | Infinity


class HVector:
    """Column vector in C^{2,1} with exact quadratic-field entries."""

    __slots__ = ("v",)

    def __init__(self, e1: QuadElement, e2: QuadElement, e3: QuadElement):
        self.v = (e1, e2, e3)

    def __getitem__(self, i):
        return self.v[i]

    def __iter__(self):
        return iter(self.v)

    def __eq__(self, other):
        return isinstance(other, HVector) and self.v == other.v

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        return "(" + ", ".join(format_element(e) for e in self.v) + ")^T"

    @property
    def ring(self) -> QuadRing:
        return self.v[0].ring

    def scaled(self, c: QuadElement) -> "HVector":
        return HVector(*(c * e for e in self.v))

    @property
    def is_integral(self) -> bool:
        return all(e.is_integer for e in self.v)


def herm_product(Z: HVector, W: HVector) -> QuadElement:
    """<Z,W> = W* J Z = conj(W1)Z3 + conj(W2)Z2 + conj(W3)Z1."""
    return (
        W[0].conjugate() * Z[2]
        + W[1].conjugate() * Z[1]
        + W[2].conjugate() * Z[0]
    )


def standard_lift(z: QuadElement, t, u=0) -> HVector:
    """psi(z, t*sqrt(d), u) = ((-|z|^2 - u + i t sqrt d)/2, z, 1)^T."""
    ring = z.ring
    t, u = Fraction(t), Fraction(u)
    top = (ring.element(-z.norm() - u) + ring.sqrt_d().scaled(t)).scaled(Fraction(1, 2))
    return HVector(top, z, ring.one())


def lift_point(p: BoundaryPoint, ring: QuadRing) -> HVector:
    if isinstance(p, Infinity):
        return HVector(ring.one(), ring.zero(), ring.zero())
    return standard_lift(p.z, p.t)


def primitive_integral_lift(p: BoundaryPoint, ring: QuadRing | None = None) -> HVector:
    """The primitive integral lift, unique up to units in a PID.

    Normalized so the last nonzero entry is the canonical representative
    of its unit class.  INFINITY maps to (1,0,0)^T.
    """
    if isinstance(p, Infinity):
        if ring is None:
            raise ValueError("need a ring to lift INFINITY")
        return HVector(ring.one(), ring.zero(), ring.zero())
    ring = p.ring
    P = lift_point(p, ring)
    den = reduce(
        _lcm, (c.denominator for e in P for c in (e.a, e.b)), 1
    )
    ints = [e.scaled(den) for e in P]
    g = gcd_many([e for e in ints if e])
    prim = [e / g for e in ints]
    assert all(e.is_integer for e in prim)
    return _unit_normalize(HVector(*prim))


def _unit_normalize(P: HVector) -> HVector:
    last = next(e for e in reversed(P.v) if e)
    _, u = unit_canonical(last)
    return P.scaled(u)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def level(p: BoundaryPoint, q: BoundaryPoint, ring: QuadRing) -> int:
    """|<P0,Q0>|^2 over primitive integral lifts; an integer by construction."""
    P = primitive_integral_lift(p, ring)
    Q = primitive_integral_lift(q, ring)
    n = herm_product(P, Q).norm()
    if n.denominator != 1:
        raise ArithmeticError(f"level came out non-integral: {n}")
    return int(n)


def depth(p: BoundaryPoint, ring: QuadRing) -> int:
    return level(p, INFINITY, ring)


class GroupMatrix:
    """3x3 integral matrix, unitary for J; equality is projective (up to units)."""

    __slots__ = ("rows", "name")

    def __init__(self, rows, name: str = "", check: bool = True):
        self.rows = tuple(tuple(r) for r in rows)
        self.name = name
        if check:
            if not all(e.is_integer for r in self.rows for e in r):
                raise ValueError(f"matrix {name or ''} has non-integral entries")
            if not is_unitary(self.rows):
                raise ValueError(f"matrix {name or self.rows} is not J-unitary")
            for j in range(3):
                if not is_primitive([self.rows[i][j] for i in range(3)]):
                    raise ValueError(f"column {j} of {name or 'matrix'} not primitive")

    @property
    def ring(self) -> QuadRing:
        return self.rows[0][0].ring

    def __repr__(self):
        nm = self.name or "GroupMatrix"
        return f"<{nm} d={self.ring.d}>"

    def entry(self, i: int, j: int) -> QuadElement:
        return self.rows[i][j]

    def column(self, j: int) -> HVector:
        return HVector(*(self.rows[i][j] for i in range(3)))

    def __mul__(self, other):
        if not isinstance(other, GroupMatrix):
            return NotImplemented
        rows = _mat_mul(self.rows, other.rows)
        return GroupMatrix(rows, check=False)

    def inverse(self) -> "GroupMatrix":
        # M^-1 = J M* J for J-unitary M
        ring = self.ring
        rows = [
            [self.rows[2 - j][2 - i].conjugate() for j in range(3)] for i in range(3)
        ]
        return GroupMatrix(rows, check=False)

    def mat_vec(self, P: HVector) -> HVector:
        out = []
        for i in range(3):
            s = self.ring.zero()
            for k in range(3):
                s = s + self.rows[i][k] * P[k]
            out.append(s)
        return HVector(*out)

    def apply(self, p: BoundaryPoint) -> BoundaryPoint:
        """Projective action on boundary points; exact zero tests decide infinity."""
        ring = self.ring
        P = primitive_integral_lift(p, ring)
        X = self.mat_vec(P)
        if not X[1] and not X[2]:
            return INFINITY
        z = X[1] / X[2]
        # 2*X0/X2 = -|z|^2 + i t sqrt(d): recover t and check the real part
        w = X[0] / X[2]
        rest = w.scaled(2) + z.norm()
        re, im = rest.sqrt_coords()
        if re != 0:
            raise ArithmeticError("image lift is not isotropic")
        return HeisPoint(z, im)

    def proj_key(self):
        """Canonical entry tuple for projective equality testing."""
        flat = [e for r in self.rows for e in r]
        first = next(e for e in flat if e)
        _, u = unit_canonical(first)
        return tuple((u * e).a for e in flat) + tuple((u * e).b for e in flat)

    def proj_eq(self, other: "GroupMatrix") -> bool:
        return self.proj_key() == other.proj_key()

    def is_unit_scalar(self) -> bool:
        """True iff this is u*Id for a unit u."""
        r = self.rows
        if any(r[i][j] for i in range(3) for j in range(3) if i != j):
            return False
        return r[0][0] == r[1][1] == r[2][2] and r[0][0].norm() == 1


def _mat_mul(A, B):
    return [
        [sum((A[i][k] * B[k][j] for k in range(3)), A[0][0].ring.zero()) for j in range(3)]
        for i in range(3)
    ]


def is_unitary(rows) -> bool:
    """Exact test of M* J M = J on a 3x3 array of ring elements."""
    ring = rows[0][0].ring
    J = [[ring.zero() for _ in range(3)] for _ in range(3)]
    J[0][2] = J[1][1] = J[2][0] = ring.one()
    star = [[rows[j][i].conjugate() for j in range(3)] for i in range(3)]
    lhs = _mat_mul(_mat_mul(star, J), rows)
    return [list(r) for r in lhs] == J


def identity_matrix(ring: QuadRing) -> GroupMatrix:
    one, zero = ring.one(), ring.zero()
    return GroupMatrix(
        [[one, zero, zero], [zero, one, zero], [zero, zero, one]],
        name="Id",
        check=False,
    )


def bergman_distance_cosh2(Z: HVector, W: HVector) -> Fraction:
    """cosh^2(d/2) = |<Z,W>|^2 / (<Z,Z><W,W>), exact; needs negative self-products."""
    zz = herm_product(Z, Z)
    ww = herm_product(W, W)
    if zz.b != 0 or ww.b != 0 or zz.a >= 0 or ww.a >= 0:
        raise ValueError("arguments must have negative real self-products")
    return herm_product(Z, W).norm() / (zz.a * ww.a)


# -- matrix file format ------------------------------------------------------
# One matrix per record: header line "name d", then 9 entries row-major in the
# ring grammar, whitespace separated over one or more lines.


def write_matrix_file(path, matrices) -> None:
    with open(path, "w") as fh:
        for M in matrices:
            fh.write(f"{M.name} {M.ring.d}\n")
            for row in M.rows:
                fh.write("  " + "  ".join(format_element(e) for e in row) + "\n")


def _is_header_name(tok: str) -> bool:
    # matrix names start with a letter and are not ring-element tokens
    return tok[0].isalpha() and tok != "w" and not tok.startswith("i*sqrt")


def read_matrix_file(path, ring: QuadRing | None = None) -> list[GroupMatrix]:
    from .rings import quad_ring

    out = []
    with open(path) as fh:
        tokens: list[str] = []
        name = None
        d = None
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 2 and parts[1].isdigit() and _is_header_name(parts[0]):
                if name is not None and tokens:
                    raise ValueError(f"matrix {name}: expected 9 entries")
                name, d = parts[0], int(parts[1])
                continue
            if name is None:
                raise ValueError(f"entries before any 'name d' header: {line!r}")
            tokens.extend(parts)
            if len(tokens) >= 9:
                r = ring or quad_ring(d)
                ents = [parse_element(t, r) for t in tokens[:9]]
                rows = [ents[0:3], ents[3:6], ents[6:9]]
                out.append(GroupMatrix(rows, name=name))
                tokens = tokens[9:]
                name = None
    return out
