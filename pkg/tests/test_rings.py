import random
from fractions import Fraction as F

import pytest

from picardmod.rings import (
    EUCLIDEAN_D,
    euclidean_divmod,
    format_element,
    is_primitive,
    parse_element,
    quad_ring,
    ring_gcd,
    solve_norm_equation,
    unit_canonical,
    units,
)

R1 = quad_ring(1)
R2 = quad_ring(2)
R3 = quad_ring(3)
R11 = quad_ring(11)


def test_norm_examples():
    assert R2.element(1, 1).norm() == 3  # 1 + i*sqrt(2)
    assert R2.zero().norm() == 0
    assert R11.element(-1, 2).norm() == 11  # -1 + 2*tau


def test_norm_positive_definite():
    rng = random.Random(0)
    for ring in (R2, R11):
        for _ in range(200):
            x = ring.element(F(rng.randint(-9, 9), rng.randint(1, 5)),
                             F(rng.randint(-9, 9), rng.randint(1, 5)))
            n = x.norm()
            assert n >= 0 and (n == 0) == (not x)


def test_norm_multiplicative():
    rng = random.Random(1)
    for ring in (R1, R2, R3, R11):
        for _ in range(300):
            x = ring.element(rng.randint(-20, 20), rng.randint(-20, 20))
            y = ring.element(rng.randint(-20, 20), rng.randint(-20, 20))
            assert (x * y).norm() == x.norm() * y.norm()


def test_sqrt_coords_roundtrip():
    for ring in (R2, R11):
        x = ring.element(F(3, 4), F(-5, 6))
        re, im = x.sqrt_coords()
        assert ring.from_sqrt_coords(re, im) == x
        sd = ring.sqrt_d()
        assert sd * sd == ring.element(-ring.d)


def _brute_units(ring):
    out = set()
    for a in range(-3, 4):
        for b in range(-3, 4):
            x = ring.element(a, b)
            if x.norm() == 1:
                out.add((x.a, x.b))
    return out


@pytest.mark.parametrize("d,count", [(1, 4), (2, 2), (3, 6), (7, 2), (11, 2)])
def test_unit_counts_against_brute_force(d, count):
    ring = quad_ring(d)
    us = units(ring)
    assert len(us) == count
    assert {(u.a, u.b) for u in us} == _brute_units(ring)


def test_euclidean_divmod_examples():
    q, r = euclidean_divmod(R2.element(5), R2.element(2))
    assert q.a in (2, 3) and r.norm() <= 1 < 4
    x = R2.element(7, -3)
    q, r = euclidean_divmod(x, R2.one())
    assert q == x and not r
    q, r = euclidean_divmod(R2.element(1, 2), R2.element(1, 1))
    assert r.norm() < 3


def test_euclidean_divmod_property():
    rng = random.Random(2)
    for d in EUCLIDEAN_D:
        ring = quad_ring(d)
        for _ in range(300):
            x = ring.element(rng.randint(-40, 40), rng.randint(-40, 40))
            y = ring.element(rng.randint(-12, 12), rng.randint(-12, 12))
            if not y:
                continue
            q, r = euclidean_divmod(x, y)
            assert x == q * y + r
            assert r.norm() < y.norm()


def test_divmod_by_zero():
    with pytest.raises(ZeroDivisionError):
        euclidean_divmod(R2.one(), R2.zero())


def test_gcd_examples():
    x = R2.element(4, -7)
    assert ring_gcd(x, R2.zero()) == unit_canonical(x)[0]
    g = ring_gcd(R2.element(3), R2.element(1, 1))
    assert g.norm() == 3  # 3 = (1+w)(1-w)
    g = ring_gcd(R2.element(2), R2.element(0, 1))
    assert g.norm() == 2
    with pytest.raises(ValueError):
        ring_gcd(R2.zero(), R2.zero())


def test_gcd_divides_both():
    rng = random.Random(3)
    for d in EUCLIDEAN_D:
        ring = quad_ring(d)
        for _ in range(100):
            x = ring.element(rng.randint(-15, 15), rng.randint(-15, 15))
            y = ring.element(rng.randint(-15, 15), rng.randint(-15, 15))
            if not x and not y:
                continue
            g = ring_gcd(x, y)
            for v in (x, y):
                if v:
                    q = v / g
                    assert q.is_integer


def _brute_norm_solutions(ring, k):
    out = set()
    bound = 2 * k
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            x = ring.element(a, b)
            if x.norm() == k:
                out.add((x.a, x.b))
    return out


def test_solve_norm_equation_examples():
    sols = solve_norm_equation(9, R2)
    assert {format_element(q) for q in sols} == {"3", "1+2*w", "1-2*w"}
    assert solve_norm_equation(5, R2) == []
    assert [format_element(q) for q in solve_norm_equation(1, R2)] == ["1"]
    assert [format_element(q) for q in solve_norm_equation(1, R11)] == ["1"]


@pytest.mark.parametrize("d", [1, 2, 3, 11])
def test_norm_equation_covers_all_solutions(d):
    ring = quad_ring(d)
    us = units(ring)
    for k in range(1, 20):
        reps = solve_norm_equation(k, ring)
        expanded = {(y.a, y.b) for q in reps for y in (u * q for u in us)}
        assert expanded == _brute_norm_solutions(ring, k), (d, k)
        # one representative per unit class
        assert len(expanded) == len(reps) * len(us) or not reps


def test_is_primitive():
    assert is_primitive([R2.one(), R2.zero(), R2.zero()])
    assert not is_primitive([R2.element(2), R2.element(0, 2), R2.element(2)])
    assert is_primitive([R2.element(-1), R2.element(0, 1), R2.element(1, 1)])
    with pytest.raises(ValueError):
        is_primitive([R2.zero(), R2.zero(), R2.zero()])


def test_text_grammar_roundtrip():
    cases = ["2/3+1/3*w", "-1", "w", "-w", "0", "1-2*w", "107/100+2/35*w"]
    for s in cases:
        x = parse_element(s, R2)
        assert format_element(x) == s or parse_element(format_element(x), R2) == x
    # i*sqrt(d) synonyms
    assert parse_element("i*sqrt(2)", R2) == R2.element(0, 1)
    assert parse_element("1-2*i*sqrt(2)", R2) == R2.element(1, -2)
    assert parse_element("i*sqrt(11)", R11) == R11.element(-1, 2)
    assert parse_element("1/2+1/2*i*sqrt(11)", R11) == R11.element(0, 1)
    with pytest.raises(ValueError):
        parse_element("i*sqrt(3)", R2)
    with pytest.raises(ValueError):
        parse_element("", R2)


def test_ring_params_validation():
    with pytest.raises(ValueError):
        quad_ring(4)  # not square-free
    with pytest.raises(ValueError):
        quad_ring(12)
    assert quad_ring(7).is_tau and not quad_ring(2).is_tau
