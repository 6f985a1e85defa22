"""Enumeration of rational boundary points by depth, up to the cusp action.

A point (z, t) has depth N(q) where q is a least-norm integral multiplier
making q*psi(z,t,0) a primitive integral vector.  Depth-k points have
z = w/q with N(q) = k, and the admissible t form arithmetic progressions
cut out by integrality of the lift's first entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .hermitian import HeisPoint, depth as point_depth
from .heisenberg import CuspElement, canonicalize
from .rings import QuadElement, quad_ring, solve_norm_equation

__all__ = [
    "DepthTable",
    "enumerate_points",
    "depth_histogram",
    "orbit_match",
    "read_table",
    "write_table",
    "diff_against_fixture",
]


@dataclass
class DepthTable:
    d: int
    max_depth: int
    rows: dict[int, list[HeisPoint]] = field(default_factory=dict)

    def all_points(self) -> list[tuple[int, HeisPoint]]:
        return [(k, p) for k in sorted(self.rows) for p in self.rows[k]]

    def total(self) -> int:
        return sum(len(v) for v in self.rows.values())


def depth_histogram(table: DepthTable) -> dict[int, int]:
    return {k: len(v) for k, v in sorted(table.rows.items()) if v}


def orbit_match(a: HeisPoint, b: HeisPoint) -> CuspElement | None:
    """g with g.act(a) == b when the points share a cusp orbit, else None."""
    ra, ga = canonicalize(a)
    rb, gb = canonicalize(b)
    if ra != rb:
        return None
    return gb.inverse() * ga


def _progression(c0: Fraction, c1: Fraction):
    """Solutions t of c0 + c1*t in Z, as (offset, step) or 'all' or None."""
    if c1 == 0:
        return "all" if c0.denominator == 1 else None
    step = abs(Fraction(1) / c1)
    off = (-c0 / c1) % step
    return (off, step)


def _intersect(p1, p2):
    if p1 is None or p2 is None:
        return None
    if p1 == "all":
        return p2
    if p2 == "all":
        return p1
    o1, s1 = p1
    o2, s2 = p2
    # integer CRT over the common denominator
    den = math.lcm(o1.denominator, s1.denominator, o2.denominator, s2.denominator)
    O1, S1 = int(o1 * den), int(s1 * den)
    O2, S2 = int(o2 * den), int(s2 * den)
    g = math.gcd(S1, S2)
    if (O2 - O1) % g:
        return None
    lcm = S1 // g * S2
    # x = O1 + S1*k = O2 (mod S2)
    k = ((O2 - O1) // g * pow(S1 // g, -1, S2 // g)) % (S2 // g)
    off = (O1 + S1 * k) % lcm
    return (Fraction(off, den), Fraction(lcm, den))


def _t_candidates(q: QuadElement, z: QuadElement) -> list[Fraction]:
    """All t in [0,2) with q * (-|z|^2 + i t sqrt d)/2 integral."""
    ring = q.ring
    nz = z.norm()
    # first-entry coordinates as linear polynomials c0 + c1*t over the w-basis
    if ring.is_tau:
        base = (Fraction(-nz, 2), Fraction(0))  # plus t*(-1/2, 1)
        slope = (Fraction(-1, 2), Fraction(1))
    else:
        base = (Fraction(-nz, 2), Fraction(0))
        slope = (Fraction(0), Fraction(1, 2))
    # multiply (base + t*slope) by q in w-coordinates
    def mul_coords(x):
        xa, xb = x
        if ring.is_tau:
            return (
                q.a * xa - ring.tau_c * q.b * xb,
                q.a * xb + q.b * xa + q.b * xb,
            )
        return (q.a * xa - ring.d * q.b * xb, q.a * xb + q.b * xa)

    b0, b1 = mul_coords(base)
    s0, s1 = mul_coords(slope)
    prog = _intersect(_progression(b0, s0), _progression(b1, s1))
    if prog is None:
        return []
    if prog == "all":
        raise AssertionError("t unconstrained; q must be nonzero")
    off, step = prog
    out = []
    t = off % step
    while t < 2:
        out.append(t)
        t += step
    return out


def _z_candidates(q: QuadElement):
    """z = w/q over integral w, with z in the base triangle expanded by one step."""
    ring = q.ring
    xs = 2 if ring.d == 2 else 1
    lo_a, hi_a = Fraction(-xs), Fraction(2 * xs)
    lo_b, hi_b = Fraction(-1), Fraction(2)
    # w = q*z is linear in (za, zb); bound its coordinates over the box corners
    corners = [
        ring.element(a, b)
        for a in (lo_a, hi_a)
        for b in (lo_b, hi_b)
    ]
    wa = [(q * c).a for c in corners]
    wb = [(q * c).b for c in corners]
    for a in range(math.floor(min(wa)), math.ceil(max(wa)) + 1):
        for b in range(math.floor(min(wb)), math.ceil(max(wb)) + 1):
            w = ring.element(a, b)
            z = w / q
            if lo_a <= z.a <= hi_a and lo_b <= z.b <= hi_b:
                yield z


def enumerate_points(d: int, max_depth: int) -> DepthTable:
    """All cusp-orbit representatives of depth <= max_depth in the prism."""
    if d not in (2, 11):
        raise ValueError(f"point enumeration supports d in (2, 11), got {d}")
    ring = quad_ring(d)
    table = DepthTable(d, max_depth)
    seen: set[tuple] = set()
    for k in range(1, max_depth + 1):
        reps: dict[tuple, HeisPoint] = {}
        for q in solve_norm_equation(k, ring):
            for z in _z_candidates(q):
                for t in _t_candidates(q, z):
                    p = HeisPoint(z, t)
                    if point_depth(p, ring) != k:
                        continue  # lift not primitive at norm k
                    rep, _ = canonicalize(p)
                    key = rep.key()
                    if key not in seen:
                        seen.add(key)
                        reps[key] = rep
        row = [reps[k2] for k2 in sorted(reps)]
        if row:
            table.rows[k] = row
    return table


# -- table files ---------------------------------------------------------------
# One line per point: "depth k : z ; t" in the shared grammar.


def write_table(path, table: DepthTable) -> None:
    with open(path, "w") as fh:
        fh.write(f"# depth table d={table.d} max_depth={table.max_depth}\n")
        for k, p in table.all_points():
            fh.write(f"depth {k} : {p.text()}\n")


def read_table(path, d: int | None = None) -> DepthTable:
    if d is None:
        raise ValueError("pass d= to read_table")
    ring = quad_ring(d)
    rows: dict[int, list[HeisPoint]] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(":")
            parts = head.split()
            if len(parts) != 2 or parts[0] != "depth":
                raise ValueError(f"bad table line: {raw!r}")
            rows.setdefault(int(parts[1]), []).append(HeisPoint.parse(rest, ring))
    table = DepthTable(d, max(rows) if rows else 0)
    table.rows = rows
    return table


@dataclass
class TableDiff:
    matched: list[tuple[int, HeisPoint, HeisPoint]]
    fixture_only: list[tuple[int, HeisPoint, int]]   # (fixture depth, point, true depth)
    enumerated_only: list[tuple[int, HeisPoint]]
    fixture_duplicates: list[tuple[int, HeisPoint, HeisPoint]]

    @property
    def clean(self) -> bool:
        return not self.fixture_only and not self.enumerated_only


def diff_against_fixture(table: DepthTable, fixture: DepthTable) -> TableDiff:
    """Match fixture points to enumerated orbits (up to the cusp action)."""
    ring = quad_ring(table.d)
    enum_keys = {}
    for k, p in table.all_points():
        enum_keys[(k, p.key())] = p
    matched, fixture_only, dupes = [], [], []
    used: dict[tuple, HeisPoint] = {}
    for k, p in fixture.all_points():
        rep, _ = canonicalize(p)
        key = (k, rep.key())
        if key in enum_keys:
            if key in used:
                dupes.append((k, p, used[key]))
            else:
                used[key] = p
                matched.append((k, p, enum_keys[key]))
        else:
            fixture_only.append((k, p, point_depth(p, ring)))
    enumerated_only = [
        (k, p) for k, p in table.all_points() if (k, p.key()) not in used
    ]
    return TableDiff(matched, fixture_only, enumerated_only, dupes)
