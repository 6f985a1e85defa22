"""Horoball covering certificates: exact verification, audit and rendering.

A certificate fixes a horosphere height u and a list of extended Cygan
balls centered on rational boundary points (radius^4 = 4/depth), then
covers the cusp prism at height u by convex regions, each contained in
one ball.  Verification is exact: every region vertex must lie strictly
inside its ball (convexity does the rest), and a grid audit checks that
the region hulls cover the prism cross-section.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import kernels
from .hermitian import HeisPoint
from .heisenberg import extended_cygan_dist4
from .rings import QuadRing, parse_rational, quad_ring

__all__ = [
    "height_of_depth",
    "ball_radius4",
    "horoballs_meet",
    "Ball",
    "Region",
    "CoveringCertificate",
    "read_certificate",
    "write_certificate",
    "verify_region",
    "verify_certificate",
    "render_covering",
]


def height_of_depth(n: int) -> tuple[Fraction, float]:
    """(u^2 = 4/n exactly, display value of u = 2/sqrt(n))."""
    if n < 1:
        raise ValueError("depth must be >= 1")
    u2 = Fraction(4, n)
    return u2, 2.0 / math.sqrt(n)


def ball_radius4(depth: int) -> Fraction:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return Fraction(4, depth)


def horoballs_meet(depth: int, u) -> bool:
    """True iff a depth-n ball still meets the height-u horosphere: u^2 <= 4/n."""
    u = Fraction(u)
    return u * u <= ball_radius4(depth)


@dataclass(frozen=True)
class Ball:
    name: str
    center: HeisPoint
    depth: int

    @property
    def radius4(self) -> Fraction:
        return ball_radius4(self.depth)


@dataclass(frozen=True)
class Region:
    name: str
    ball: str
    vertices: tuple[str, ...]


@dataclass
class CoveringCertificate:
    d: int
    u: Fraction
    balls: list[Ball]
    vertices: dict[str, HeisPoint]
    regions: list[Region]

    def ball_by_name(self, name: str) -> Ball:
        for b in self.balls:
            if b.name == name:
                return b
        raise KeyError(name)


# -- certificate file format --------------------------------------------------
# Header "d <int>" and "u <rational>", then sections [balls] (name : z;t : depth),
# [vertices] (name : z;t) and [regions] (name : ball : vertex names).


def read_certificate(path) -> CoveringCertificate:
    d = None
    u = None
    balls: list[Ball] = []
    vertices: dict[str, HeisPoint] = {}
    regions: list[Region] = []
    section = None
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                section = line.strip("[]")
                continue
            if section is None:
                key, _, val = line.partition(" ")
                if key == "d":
                    d = int(val)
                elif key == "u":
                    u = parse_rational(val)
                else:
                    raise ValueError(f"unknown header {key!r}")
                continue
            ring = quad_ring(d)
            if section == "balls":
                name, _, rest = line.partition(":")
                pt, _, dep = rest.rpartition(":")
                balls.append(Ball(name.strip(), HeisPoint.parse(pt, ring), int(dep)))
            elif section == "vertices":
                name, _, rest = line.partition(":")
                vertices[name.strip()] = HeisPoint.parse(rest, ring)
            elif section == "regions":
                name, _, rest = line.partition(":")
                ball, _, vs = rest.partition(":")
                regions.append(Region(name.strip(), ball.strip(), tuple(vs.split())))
            else:
                raise ValueError(f"unknown section {section!r}")
    if d is None or u is None:
        raise ValueError("certificate must set d and u")
    return CoveringCertificate(d, u, balls, vertices, regions)


def write_certificate(path, cert: CoveringCertificate) -> None:
    with open(path, "w") as fh:
        fh.write(f"d {cert.d}\nu {cert.u}\n[balls]\n")
        for b in cert.balls:
            fh.write(f"{b.name} : {b.center.text()} : {b.depth}\n")
        fh.write("[vertices]\n")
        for name, p in cert.vertices.items():
            fh.write(f"{name} : {p.text()}\n")
        fh.write("[regions]\n")
        for r in cert.regions:
            fh.write(f"{r.name} : {r.ball} : {' '.join(r.vertices)}\n")


# -- region verification --------------------------------------------------------


@dataclass
class RegionReport:
    name: str
    ball: str
    passed: bool
    distances: list[tuple[str, Fraction, float]]  # vertex, dist^4, display dist
    failing: list[str]


def verify_region(cert: CoveringCertificate, region: Region) -> RegionReport:
    """Exact check: every vertex at height u lies strictly inside the ball."""
    ball = cert.ball_by_name(region.ball)
    r4 = ball.radius4
    distances = []
    failing = []
    for vn in region.vertices:
        p = cert.vertices[vn]
        d4 = extended_cygan_dist4(p, cert.u, ball.center, 0)
        distances.append((vn, d4, float(d4) ** 0.25))
        if not d4 < r4:
            failing.append(vn)
    return RegionReport(region.name, region.ball, not failing, distances, failing)


# -- exact convex hulls -----------------------------------------------------------


class ExactHull:
    """Convex hull of rational points in (a, b, t) coordinates, any rank.

    Stores integer data at a common scale; membership tests are exact.
    """

    def __init__(self, points: list[tuple[Fraction, Fraction, Fraction]]):
        if not points:
            raise ValueError("empty hull")
        self.scale = math.lcm(
            *(c.denominator for p in points for c in p), 1
        )
        self.pts = sorted({tuple(int(c * self.scale) for c in p) for p in points})
        self.rank, self.facets = self._build()

    def _build(self):
        pts = self.pts
        base = pts[0]
        dirs = [tuple(p[i] - base[i] for i in range(3)) for p in pts[1:]]
        rank = _rank3(dirs)
        if rank < 3:
            return rank, None
        facets = set()
        for i, j, k in combinations(range(len(pts)), 3):
            n = _cross(_sub(pts[j], pts[i]), _sub(pts[k], pts[i]))
            if n == (0, 0, 0):
                continue
            c = _dot(n, pts[i])
            side = [_dot(n, p) - c for p in pts]
            if all(s >= 0 for s in side):
                pass
            elif all(s <= 0 for s in side):
                n, c = tuple(-x for x in n), -c
            else:
                continue
            g = math.gcd(math.gcd(abs(n[0]), abs(n[1])), math.gcd(abs(n[2]), abs(c)))
            g = g or 1
            facets.add((tuple(x // g for x in n), c // g))
        return 3, sorted(facets)

    def contains(self, p: tuple[Fraction, Fraction, Fraction]) -> bool:
        den = math.lcm(*(Fraction(c).denominator for c in p), 1)
        s = tuple(int(Fraction(c) * self.scale * den) for c in p)
        if self.rank == 3:
            return all(_dot(n, s) >= c * den for n, c in self.facets)
        return self._contains_lowrank(s, den)

    def _contains_lowrank(self, s, den) -> bool:
        pts = [tuple(c * den for c in p) for p in self.pts]
        if self.rank == 0:
            return s == pts[0]
        base = pts[0]
        if self.rank == 1:
            # on the segment: collinear with the endpoints and between extremes
            dvec = _sub(pts[-1], base)
            rel = _sub(s, base)
            if _cross(dvec, rel) != (0, 0, 0):
                return False
            vals = [_dot(_sub(p, base), dvec) for p in pts]
            return min(vals) <= _dot(rel, dvec) <= max(vals)
        # rank 2: in the plane, then inside every edge half-plane
        dirs = [_sub(p, base) for p in pts[1:]]
        normal = next(
            n for n in (_cross(u, v) for u, v in combinations(dirs, 2)) if n != (0, 0, 0)
        )
        if _dot(normal, _sub(s, base)) != 0:
            return False
        for i, j in combinations(range(len(pts)), 2):
            edge = _sub(pts[j], pts[i])
            n2 = _cross(edge, normal)
            if n2 == (0, 0, 0):
                continue
            side = [_dot(n2, _sub(p, pts[i])) for p in pts]
            mine = _dot(n2, _sub(s, pts[i]))
            if all(x >= 0 for x in side):
                if mine < 0:
                    return False
            elif all(x <= 0 for x in side):
                if mine > 0:
                    return False
        return True


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _dot(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _rank3(vectors) -> int:
    basis: list[tuple] = []
    for v in vectors:
        if not basis:
            if any(v):
                basis.append(v)
        elif len(basis) == 1:
            if _cross(basis[0], v) != (0, 0, 0):
                basis.append(v)
        elif _dot(_cross(basis[0], basis[1]), v) != 0:
            return 3
    return len(basis)


def _point_coords(p: HeisPoint) -> tuple[Fraction, Fraction, Fraction]:
    return (p.z.a, p.z.b, p.t)


# -- certificate verification ------------------------------------------------------


@dataclass
class CertificateReport:
    region_reports: list[RegionReport]
    ball_heights_ok: bool
    audit_n: int
    uncovered: list[tuple[Fraction, Fraction, Fraction]]
    backend: str = ""

    @property
    def passed(self) -> bool:
        return (
            all(r.passed for r in self.region_reports)
            and self.ball_heights_ok
            and not self.uncovered
        )


def _prism_grid(ring: QuadRing, n: int):
    """Integer grid labels (i, j, k) for samples (xs*i/n, j/n, 2k/n) in the prism."""
    xs = 2 if ring.d == 2 else 1
    for i in range(n + 1):
        for j in range(n + 1):
            # base triangle: a/xs + b <= 1  <=>  i + j <= n
            if i + j > n:
                continue
            for k in range(n + 1):
                yield (i, j, k)


def verify_certificate(
    cert: CoveringCertificate, audit_n: int = 64
) -> CertificateReport:
    ring = quad_ring(cert.d)
    reports = [verify_region(cert, r) for r in cert.regions]
    heights_ok = all(horoballs_meet(b.depth, cert.u) for b in cert.balls)

    hulls = [
        ExactHull([_point_coords(cert.vertices[v]) for v in r.vertices])
        for r in cert.regions
    ]
    uncovered = _audit(ring, hulls, audit_n)
    return CertificateReport(reports, heights_ok, audit_n, uncovered, kernels.BACKEND)


def _audit(ring: QuadRing, hulls: list[ExactHull], n: int):
    """Exact membership of every prism grid sample in at least one hull."""
    import numpy as np

    xs = 2 if ring.d == 2 else 1
    full = [h for h in hulls if h.rank == 3]
    low = [h for h in hulls if h.rank != 3]
    scale = math.lcm(*(h.scale for h in full), 1)
    normals, offsets, starts = [], [], [0]
    maxn = maxc = 1
    for h in full:
        m = scale // h.scale
        for nvec, c in h.facets:
            normals.append(nvec)
            offsets.append(c * m * n)  # samples carry an extra factor n
            maxn = max(maxn, *(abs(x) for x in nvec))
            maxc = max(maxc, abs(c * m * n))
        starts.append(len(normals))
    labels = list(_prism_grid(ring, n))
    samples = np.array(
        [(xs * i * scale, j * scale, 2 * k * scale) for i, j, k in labels],
        dtype=np.int64,
    ).reshape(-1, 3)
    if full:
        kernels.check_int64_headroom(maxn, 2 * scale * n)
        if maxc >= 2**62:
            raise OverflowError("facet offsets exceed int64")
        covered = kernels.points_in_hulls(
            samples,
            np.array(normals, dtype=np.int64),
            np.array(offsets, dtype=np.int64),
            np.array(starts, dtype=np.int64),
        )
    else:
        covered = np.zeros(len(labels), dtype=bool)
    uncovered = []
    for idx in np.nonzero(~covered)[0]:
        i, j, k = labels[idx]
        p = (Fraction(xs * i, n), Fraction(j, n), Fraction(2 * k, n))
        if not any(h.contains(p) for h in low):
            uncovered.append(p)
    return uncovered


# -- rendering ---------------------------------------------------------------------


def render_covering(cert: CoveringCertificate, slice_spec: str, path) -> str:
    """Write a deterministic SVG cross-section; returns the document text.

    slice_spec: "t=<rational>" (horizontal cut, drawn in the z-plane) or
    "x=<rational>" (vertical cut at Re z = x, drawn in (Im z, v)).
    """
    kind, _, val = slice_spec.partition("=")
    if kind not in ("t", "x") or not val:
        raise ValueError("slice must look like 't=1/2' or 'x=0'")
    c0 = Fraction(val)
    doc = _render_slice(cert, kind, c0)
    with open(path, "w") as fh:
        fh.write(doc)
    return doc


def _render_slice(cert: CoveringCertificate, kind: str, c0: Fraction) -> str:
    d = cert.d
    sd = math.sqrt(d)
    xs = 2 if d == 2 else 1
    u = float(cert.u)
    if kind == "t":
        # draw in (x, y) = (Re z, Im z); prism section is the base triangle
        outline = [(0.0, 0.0), (float(xs), 0.0)]
        outline.append((0.0, sd) if d == 2 else (0.5, sd / 2))
        bounds = (-0.8, -0.8, xs + 0.8, (sd if d == 2 else sd / 2) + 0.8)
    else:
        # draw in (y, v) = (Im z, t*sqrt(d)) at Re z = c0
        ymax = sd * float(1 - c0 / xs) if d == 2 else sd / 2
        outline = [(0.0, 0.0), (max(ymax, 0.0), 0.0), (max(ymax, 0.0), 2 * sd), (0.0, 2 * sd)]
        bounds = (-0.8, -0.8, max(ymax, 0.5) + 0.8, 2 * sd + 0.8)

    def ball_field(ball: Ball):
        re, im = ball.center.z.sqrt_coords()
        zx, zy = float(re), float(im) * sd  # geometric (Re z, Im z)
        v0 = float(ball.center.t) * sd
        r4 = float(ball.radius4)

        def f(p1, p2):
            if kind == "t":
                x, y = p1, p2
                v = float(c0) * sd
            else:
                x, y, v = float(c0), p1, p2
            dz2 = (x - zx) ** 2 + (y - zy) ** 2
            tw = v - v0 + 2 * (y * zx - x * zy)
            return (dz2 + u) ** 2 + tw * tw - r4

        return f

    curves = []
    for ball in cert.balls:
        segs = _marching_squares(ball_field(ball), bounds, 160)
        if segs:
            curves.append((ball.name, segs))

    w, h = 640, 640
    x0, y0, x1, y1 = bounds
    sx = w / (x1 - x0)
    sy = h / (y1 - y0)
    s = min(sx, sy)

    def T(p):
        return (round((p[0] - x0) * s, 2), round(h - (p[1] - y0) * s, 2))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    pts = " ".join(f"{T(p)[0]},{T(p)[1]}" for p in outline)
    parts.append(
        f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="2"/>'
    )
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    for ci, (name, segs) in enumerate(curves):
        color = palette[ci % len(palette)]
        for a, b in segs:
            pa, pb = T(a), T(b)
            parts.append(
                f'<line x1="{pa[0]}" y1="{pa[1]}" x2="{pb[0]}" y2="{pb[1]}" '
                f'stroke="{color}" stroke-width="1"/>'
            )
        anchor = T(segs[0][0])
        parts.append(
            f'<text x="{anchor[0]}" y="{anchor[1]}" font-size="11" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _marching_squares(f, bounds, n):
    """Zero-contour segments of f on an n*n grid over bounds."""
    x0, y0, x1, y1 = bounds
    dx = (x1 - x0) / n
    dy = (y1 - y0) / n
    vals = [[f(x0 + i * dx, y0 + j * dy) for j in range(n + 1)] for i in range(n + 1)]
    segs = []
    for i in range(n):
        for j in range(n):
            corners = [
                (x0 + i * dx, y0 + j * dy, vals[i][j]),
                (x0 + (i + 1) * dx, y0 + j * dy, vals[i + 1][j]),
                (x0 + (i + 1) * dx, y0 + (j + 1) * dy, vals[i + 1][j + 1]),
                (x0 + i * dx, y0 + (j + 1) * dy, vals[i][j + 1]),
            ]
            crossings = []
            for a in range(4):
                xa, ya, va = corners[a]
                xb, yb, vb = corners[(a + 1) % 4]
                if (va < 0) != (vb < 0):
                    t = va / (va - vb)
                    crossings.append((xa + t * (xb - xa), ya + t * (yb - ya)))
            if len(crossings) >= 2:
                segs.append((crossings[0], crossings[1]))
    return segs
