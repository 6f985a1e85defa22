"""Exact arithmetic in Q(i*sqrt(d)) and its integer ring O_d.

Elements are stored as a + b*w with rational a, b, where w = i*sqrt(d)
for d = 1,2 mod 4 and w = (1+i*sqrt(d))/2 for d = 3 mod 4.  Everything
is Fraction-exact; there is no floating point in this module.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable

__all__ = [
    "QuadRing",
    "QuadElement",
    "quad_ring",
    "units",
    "euclidean_divmod",
    "ring_gcd",
    "solve_norm_equation",
    "is_primitive",
    "parse_element",
]

EUCLIDEAN_D = (1, 2, 3, 7, 11)


class QuadRing:
    """Ring parameters for Q(i*sqrt(d)); interned, one instance per d."""

    __slots__ = ("d", "is_tau", "tau_c")

    def __init__(self, d: int):
        if d <= 0 or any(d % (p * p) == 0 for p in range(2, math.isqrt(d) + 1)):
            raise ValueError(f"d must be a square-free positive integer, got {d}")
        self.d = d
        self.is_tau = d % 4 == 3  # w = (1+i*sqrt(d))/2
        self.tau_c = (1 + d) // 4 if self.is_tau else None  # w^2 = w - tau_c

    def __repr__(self):
        return f"QuadRing(d={self.d})"

    def element(self, a, b=0) -> QuadElement:
        return QuadElement(self, Fraction(a), Fraction(b))

    def zero(self) -> QuadElement:
        return self.element(0)

    def one(self) -> QuadElement:
        return self.element(1)

    def omega(self) -> QuadElement:
        return self.element(0, 1)

    def sqrt_d(self) -> QuadElement:
        """The element i*sqrt(d), exact in w-coordinates."""
        if self.is_tau:
            return self.element(-1, 2)  # 2w - 1
        return self.element(0, 1)

    def from_sqrt_coords(self, re, im) -> QuadElement:
        """Element re + im*i*sqrt(d) from rational coordinates."""
        re, im = Fraction(re), Fraction(im)
        if self.is_tau:
            return self.element(re - im, 2 * im)
        return self.element(re, im)


_RINGS: dict[int, QuadRing] = {}


def quad_ring(d: int) -> QuadRing:
    if d not in _RINGS:
        _RINGS[d] = QuadRing(d)
    return _RINGS[d]


class QuadElement:
    """a + b*w with exact rational a, b."""

    __slots__ = ("ring", "a", "b")

    def __init__(self, ring: QuadRing, a: Fraction, b: Fraction):
        self.ring = ring
        self.a = a
        self.b = b

    # -- basic structure ------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QuadElement):
            return NotImplemented
        return self.ring is other.ring and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.ring.d, self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"<{format_element(self)} (d={self.ring.d})>"

    @property
    def is_integer(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadElement):
            if other.ring is not self.ring:
                raise ValueError("mixed rings")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElement(self.ring, Fraction(other), Fraction(0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.ring, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.ring, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElement(self.ring, o.a - self.a, o.b - self.b)

    def __neg__(self):
        return QuadElement(self.ring, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = self.ring
        if r.is_tau:  # w^2 = w - c
            return QuadElement(
                r,
                self.a * o.a - r.tau_c * self.b * o.b,
                self.a * o.b + self.b * o.a + self.b * o.b,
            )
        return QuadElement(
            r, self.a * o.a - r.d * self.b * o.b, self.a * o.b + self.b * o.a
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic ring")
        num = self * o.conjugate()
        return QuadElement(self.ring, num.a / n, num.b / n)

    def conjugate(self) -> QuadElement:
        if self.ring.is_tau:  # conj(w) = 1 - w
            return QuadElement(self.ring, self.a + self.b, -self.b)
        return QuadElement(self.ring, self.a, -self.b)

    def norm(self) -> Fraction:
        """N(x) = x * conj(x), always a non-negative rational."""
        r = self.ring
        if r.is_tau:
            return self.a * self.a + self.a * self.b + r.tau_c * self.b * self.b
        return self.a * self.a + r.d * self.b * self.b

    def sqrt_coords(self) -> tuple[Fraction, Fraction]:
        """(re, im) with self = re + im*i*sqrt(d), exact."""
        if self.ring.is_tau:
            return self.a + self.b / 2, self.b / 2
        return self.a, self.b

    def scaled(self, s) -> QuadElement:
        s = Fraction(s)
        return QuadElement(self.ring, self.a * s, self.b * s)


# -- unit machinery -------------------------------------------------------


def units(ring: QuadRing) -> list[QuadElement]:
    """All x in O_d with N(x) = 1."""
    out = []
    bb = 2 if ring.is_tau else 1
    for a in range(-1, 2):
        for b in range(-bb, bb + 1):
            x = ring.element(a, b)
            if x.is_integer and x.norm() == 1:
                out.append(x)
    return out


def unit_canonical(x: QuadElement) -> tuple[QuadElement, QuadElement]:
    """Canonical representative of x's unit class.

    Returns (rep, u) with rep = u*x and rep the lexicographically largest
    associate having a > 0, or a = 0 and b > 0.
    """
    if not x:
        return x, x.ring.one()
    best = None
    for u in units(x.ring):
        y = u * x
        if y.a > 0 or (y.a == 0 and y.b > 0):
            if best is None or (y.a, y.b) > (best[0].a, best[0].b):
                best = (y, u)
    assert best is not None
    return best


# -- Euclidean structure ---------------------------------------------------


def euclidean_divmod(x: QuadElement, y: QuadElement) -> tuple[QuadElement, QuadElement]:
    """q, r with x = q*y + r and N(r) < N(y), for Euclidean d.

    The quotient starts from coordinate-wise rounding of x/y and is then
    refined over the 3x3 neighbouring lattice points; plain rounding can
    hit N(r) = N(y) ties for d in {7, 11}.
    """
    ring = x.ring
    if ring.d not in EUCLIDEAN_D:
        raise ValueError(f"O_{ring.d} is not Euclidean")
    if not y:
        raise ZeroDivisionError("euclidean_divmod by zero")
    exact = x / y
    qa0 = _round_half_up(exact.a)
    qb0 = _round_half_up(exact.b)
    best = None
    for da in (0, -1, 1):
        for db in (0, -1, 1):
            q = ring.element(qa0 + da, qb0 + db)
            r = x - q * y
            key = (r.norm(), q.a, q.b)
            if best is None or key < best[0]:
                best = (key, q, r)
    _, q, r = best
    assert r.norm() < y.norm()
    return q, r


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def ring_gcd(x: QuadElement, y: QuadElement) -> QuadElement:
    """A gcd via the Euclidean algorithm, normalized to the canonical unit class."""
    if not x and not y:
        raise ValueError("gcd(0, 0) is undefined")
    while y:
        _, r = euclidean_divmod(x, y)
        x, y = y, r
    return unit_canonical(x)[0]


def gcd_many(xs: Iterable[QuadElement]) -> QuadElement:
    it = iter(xs)
    g = next(it)
    for x in it:
        if not x:
            continue
        g = x if not g else ring_gcd(g, x)
    if not g:
        raise ValueError("gcd of all-zero input")
    return unit_canonical(g)[0]


def is_primitive(v: Iterable[QuadElement]) -> bool:
    """True iff the entries' gcd is a unit (no non-trivial integral submultiple)."""
    entries = list(v)
    if not any(entries):
        raise ValueError("zero vector has no primitivity")
    for e in entries:
        if not e.is_integer:
            raise ValueError("primitivity is only defined for integral vectors")
    return gcd_many(entries).norm() == 1


# -- norm equations --------------------------------------------------------


def solve_norm_equation(k: int, ring: QuadRing) -> list[QuadElement]:
    """All q in O_d with N(q) = k, one canonical representative per unit class.

    Sorted lexicographically on (a, b) in w-coordinates; empty when the
    norm form misses k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    sols = set()
    if ring.is_tau:
        # a^2 + ab + c b^2 = k; solve the quadratic in a per b
        bmax = math.isqrt(4 * k // ring.d)
        for b in range(-bmax, bmax + 1):
            disc = 4 * k - ring.d * b * b
            if disc < 0:
                continue
            s = math.isqrt(disc)
            if s * s != disc:
                continue
            for sgn in (s, -s):
                if (sgn - b) % 2 == 0:
                    sols.add((ring.element((sgn - b) // 2, b)))
    else:
        bmax = math.isqrt(k // ring.d)
        for b in range(-bmax, bmax + 1):
            rest = k - ring.d * b * b
            a = math.isqrt(rest)
            if a * a == rest:
                sols.add(ring.element(a, b))
                sols.add(ring.element(-a, b))
    reps = {unit_canonical(q)[0] for q in sols if q}
    return sorted(reps, key=lambda q: (q.a, q.b))


# -- shared text grammar ----------------------------------------------------

_TERM_RE = re.compile(
    r"^(?P<coef>[+-]?\d+(?:/\d+)?)?"
    r"(?P<star>\*)?"
    r"(?P<sym>w|i\*sqrt\(\d+\))?$"
)


def format_element(x: QuadElement) -> str:
    """Render as "a+b*w" with rationals in lowest terms."""
    a, b = x.a, x.b
    if b == 0:
        return _fmt_q(a)
    bs = "w" if b == 1 else ("-w" if b == -1 else f"{_fmt_q(b)}*w")
    if a == 0:
        return bs
    sep = "+" if not bs.startswith("-") else ""
    return f"{_fmt_q(a)}{sep}{bs}"


def _fmt_q(q: Fraction) -> str:
    return str(q)


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def parse_element(text: str, ring: QuadRing) -> QuadElement:
    """Parse the "a+b*w" grammar; "i*sqrt(d)" is accepted as a synonym."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty element")
    # split into signed terms at top level
    terms = []
    start = 0
    for i, ch in enumerate(s):
        if ch in "+-" and i > start and s[i - 1] not in "+-*(/":
            terms.append(s[start:i])
            start = i
    terms.append(s[start:])
    out = ring.zero()
    for term in terms:
        out = out + _parse_term(term, ring)
    return out


def _parse_term(term: str, ring: QuadRing) -> QuadElement:
    sign = 1
    while term and term[0] in "+-":
        if term[0] == "-":
            sign = -sign
        term = term[1:]
    m = _TERM_RE.match(term)
    if not m or (m.group("coef") is None and m.group("sym") is None):
        raise ValueError(f"bad ring element term: {term!r}")
    coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
    coef *= sign
    sym = m.group("sym")
    if sym is None:
        return ring.element(coef)
    if sym == "w":
        return ring.element(0, coef)
    dd = int(sym[len("i*sqrt("):-1])
    if dd != ring.d:
        raise ValueError(f"i*sqrt({dd}) used in ring with d={ring.d}")
    return ring.sqrt_d().scaled(coef)
