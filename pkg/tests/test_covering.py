from fractions import Fraction as F
from importlib import resources

import pytest

from picardmod.covering import (
    Ball,
    CoveringCertificate,
    ExactHull,
    Region,
    ball_radius4,
    height_of_depth,
    horoballs_meet,
    read_certificate,
    render_covering,
    verify_certificate,
    verify_region,
    write_certificate,
)
from picardmod.hermitian import HeisPoint
from picardmod.rings import quad_ring

R2 = quad_ring(2)
CERT_PATH = str(resources.files("picardmod") / "fixtures" / "certificate_d2.txt")
U = F(4852, 10000)

# published strict upper bounds for the region-1 vertex distances
R1_BOUNDS = {
    "c_1_1": F("0.6967"), "q_1": F("1.2188"), "q_5": F("1.3903"),
    "q_3": F("1.4091"), "q_7": F("0.7813"), "q_19": F("1.3160"),
    "q_21": F("1.0042"), "q_29": F("1.3966"),
}


@pytest.fixture(scope="module")
def cert():
    return read_certificate(CERT_PATH)


def test_height_of_depth():
    u2, disp = height_of_depth(1)
    assert u2 == 4 and disp == 2.0
    u2, disp = height_of_depth(17)
    assert u2 == F(4, 17) and abs(disp - 0.485071) < 1e-6
    u2, disp = height_of_depth(44)
    assert abs(disp - 0.301511) < 1e-6


def test_ball_radius4():
    assert ball_radius4(1) == 4  # radius sqrt(2)
    assert ball_radius4(4) == 1  # radius 1
    assert ball_radius4(3) == F(4, 3)
    with pytest.raises(ValueError):
        ball_radius4(0)


def test_horoballs_meet_exact_flip():
    assert horoballs_meet(16, U)        # 0.4852^2 <= 1/4
    assert not horoballs_meet(17, U)    # 4/17 < 0.4852^2
    assert horoballs_meet(1, 2)         # boundary case, equality counts
    for k in range(1, 45):
        u2, _ = height_of_depth(k)
        # exact flip at u^2 = 4/k: meets at the height itself, not above
        assert horoballs_meet(k, _sqrt_exact_below(u2))
        assert not horoballs_meet(k, _sqrt_exact_above(u2))


def _sqrt_exact_below(u2: F) -> F:
    # a rational u with u^2 <= u2, close from below
    from math import isqrt

    num = isqrt(u2.numerator * 10**12 // u2.denominator)
    return F(num, 10**6)


def _sqrt_exact_above(u2: F) -> F:
    from math import isqrt

    num = isqrt(u2.numerator * 10**12 // u2.denominator) + 1
    return F(num, 10**6)


def test_region_distances_match_published_bounds(cert):
    rep = verify_region(cert, cert.regions[0])
    assert rep.passed
    for vname, d4, _ in rep.distances:
        bound = R1_BOUNDS[vname]
        assert d4 < bound**4  # strictly below the published bound
        assert d4 > (bound - F(2, 10**4)) ** 4  # and within 2e-4 of it


def test_all_regions_pass(cert):
    for region in cert.regions:
        assert verify_region(cert, region).passed, region.name


def test_region_fails_with_smaller_ball(cert):
    # shrink region 1's ball to radius 1.3: vertex q_3 (distance 1.4090) fails
    shrunk = CoveringCertificate(
        cert.d, cert.u,
        [Ball("bx", cert.balls[0].center, 6)] ,  # radius (4/6)^(1/4) < 1
        cert.vertices,
        [Region("R1", "bx", cert.regions[0].vertices)],
    )
    rep = verify_region(shrunk, shrunk.regions[0])
    assert not rep.passed and "q_3" in rep.failing
    # direct exact check against radius^4 = 1.3^4
    r4 = F("1.3") ** 4
    d4_q3 = dict((v, d) for v, d, _ in verify_region(cert, cert.regions[0]).distances)
    assert d4_q3["q_3"] > r4 and d4_q3["q_1"] < r4


def test_certificate_passes_at_n64(cert):
    rep = verify_certificate(cert, audit_n=64)
    assert rep.passed and rep.ball_heights_ok and not rep.uncovered


def test_dropping_region8_uncovers_samples(cert):
    cut = CoveringCertificate(
        cert.d, cert.u, cert.balls, cert.vertices,
        [r for r in cert.regions if r.name != "R8"],
    )
    rep = verify_certificate(cut, audit_n=16)
    assert not rep.passed and rep.uncovered
    # the hole is interior to R8, near (4/3 + 1/3 w, 2 sqrt 2)
    a, b, t = min(rep.uncovered, key=lambda p: (abs(p[0] - F(4, 3)), abs(p[2] - 2)))
    assert abs(a - F(4, 3)) <= F(1, 4) and abs(b - F(1, 3)) <= F(1, 4) and t > F(3, 2)


def test_empty_certificate_reports_everything_uncovered():
    empty = CoveringCertificate(2, U, [], {}, [])
    rep = verify_certificate(empty, audit_n=4)
    assert rep.region_reports == [] and rep.ball_heights_ok
    assert rep.uncovered  # the prism is nonempty, so nothing is covered


def test_region_monotone_in_height(cert):
    for region in cert.regions:
        for u2 in (cert.u / 2, cert.u / 3):
            smaller = CoveringCertificate(
                cert.d, u2, cert.balls, cert.vertices, [region]
            )
            assert verify_region(smaller, region).passed


def test_ball_heights_invariant(cert):
    for ball in cert.balls:
        assert horoballs_meet(ball.depth, cert.u)


def test_certificate_io_roundtrip(cert, tmp_path):
    path = tmp_path / "cert.txt"
    write_certificate(path, cert)
    back = read_certificate(path)
    assert back.d == cert.d and back.u == cert.u
    assert back.balls == cert.balls
    assert back.vertices == cert.vertices
    assert back.regions == cert.regions


def test_exact_hull_low_rank():
    pt = (F(1), F(2), F(3))
    h = ExactHull([pt])
    assert h.rank == 0 and h.contains(pt) and not h.contains((F(1), F(2), F(4)))
    seg = ExactHull([(F(0), F(0), F(0)), (F(2), F(2), F(0))])
    assert seg.rank == 1
    assert seg.contains((F(1), F(1), F(0)))
    assert not seg.contains((F(1), F(1), F(1)))
    assert not seg.contains((F(3), F(3), F(0)))
    tri = ExactHull([(F(0), F(0), F(0)), (F(1), F(0), F(0)), (F(0), F(1), F(0))])
    assert tri.rank == 2
    assert tri.contains((F(1, 4), F(1, 4), F(0)))
    assert not tri.contains((F(1, 4), F(1, 4), F(1, 100)))
    assert not tri.contains((F(2, 3), F(2, 3), F(0)))


def test_exact_hull_full_rank_membership():
    cube = ExactHull([(F(x), F(y), F(z)) for x in (0, 1) for y in (0, 1) for z in (0, 1)])
    assert cube.rank == 3
    assert cube.contains((F(1, 2), F(1, 2), F(1, 2)))
    assert cube.contains((F(0), F(1), F(1)))  # boundary included
    assert not cube.contains((F(1, 2), F(1, 2), F(3, 2)))


def test_render_deterministic(cert, tmp_path):
    a = render_covering(cert, "t=0", tmp_path / "a.svg")
    b = render_covering(cert, "t=0", tmp_path / "b.svg")
    assert a == b and a.startswith("<svg") and "polygon" in a
    c = render_covering(cert, "x=1/2", tmp_path / "c.svg")
    assert c != a and "<line" in c
    with pytest.raises(ValueError):
        render_covering(cert, "bogus", tmp_path / "d.svg")


def test_render_empty_certificate(tmp_path):
    empty = CoveringCertificate(2, U, [], {}, [])
    doc = render_covering(empty, "t=0", tmp_path / "e.svg")
    assert "polygon" in doc and "<line" not in doc


def test_d11_ball_fixture_loads():
    path = str(resources.files("picardmod") / "fixtures" / "balls_d11.txt")
    cert = read_certificate(path)
    assert cert.d == 11 and len(cert.balls) == 16
    for ball in cert.balls:
        assert horoballs_meet(ball.depth, cert.u)
