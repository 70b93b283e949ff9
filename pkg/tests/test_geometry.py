import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import circumcenter, descartes_inner_radius, inside, segment_hits, tangent_on_axis
from quadpack.geometry import (Circle, CollinearPoints, InvalidPolygon, NoSolution, NotTangent, Point,
                               Polygon, Tolerances, apollonius_inscribed, circumcircle, contains,
                               power, segment_inside, signed_area, tangency_point,
                               tangent_circle_to_two)
from quadpack.fixtures import FIXTURES, l_shape, unit_square

SQ3 = math.sqrt(3)
# frozen from the oracles in oracles.py
EQ_CIRCUMCENTER_Y = 0.5773502691896258
EQ_CIRCUMRADIUS = 1.1547005383792515
INSCRIBED_UNIT = 0.15470053837925146
THROUGH_11_Y = 0.75


def test_frozen_values_match_oracles():
    c, r = circumcenter((0, 0), (2, 0), (1, SQ3))
    assert c[1] == pytest.approx(EQ_CIRCUMCENTER_Y, abs=1e-15)
    assert r == pytest.approx(EQ_CIRCUMRADIUS, abs=1e-15)
    assert descartes_inner_radius(1, 1, 1) == pytest.approx(INSCRIBED_UNIT, abs=1e-15)
    # circle through (1,1) tangent to unit circles at (0,0),(2,0): center (1,y), radius 1-y
    y = tangent_on_axis(lambda y: math.hypot(1, y) - (1 - y) - 1, 0.0, 1.0)
    assert y == pytest.approx(THROUGH_11_Y, abs=1e-12)


class TestCircumcircle:
    def test_equilateral(self):
        c = circumcircle((0, 0), (2, 0), (1, SQ3))
        assert c.center.x == pytest.approx(1, abs=1e-12)
        assert c.center.y == pytest.approx(EQ_CIRCUMCENTER_Y, abs=1e-10)
        assert c.radius == pytest.approx(EQ_CIRCUMRADIUS, abs=1e-10)

    def test_right_triangle(self):
        c = circumcircle((0, 0), (1, 0), (0, 1))
        assert c.center == pytest.approx((0.5, 0.5))
        assert c.radius == pytest.approx(math.sqrt(2) / 2)

    def test_collinear(self):
        with pytest.raises(CollinearPoints):
            circumcircle((0, 0), (1, 0), (2, 0))

    @given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=3, max_size=3))
    def test_matches_linear_solve(self, pts):
        a, b, c = (np.array(p) for p in pts)
        scale = max(np.linalg.norm(b - a), np.linalg.norm(c - a), 1e-3)
        u, v = b - a, c - a
        assume(abs(u[0] * v[1] - u[1] * v[0]) > 1e-3 * scale ** 2)
        got = circumcircle(*pts)
        ref, r = circumcenter(*pts)
        assert math.dist(got.center, ref) <= 1e-7 * max(r, 1)
        for p in pts:
            assert abs(math.dist(p, got.center) - got.radius) <= 1e-9 * got.radius


class TestTangency:
    def test_equal_circles(self):
        assert tangency_point(Circle((0, 0), 1), Circle((2, 0), 1)) == pytest.approx((1, 0))

    def test_unequal_circles(self):
        assert tangency_point(Circle((0, 0), 1), Circle((3, 0), 2)) == pytest.approx((1, 0))

    def test_separated(self):
        with pytest.raises(NotTangent):
            tangency_point(Circle((0, 0), 1), Circle((3, 0), 1))

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0, 2 * math.pi),
           st.floats(-5, 5), st.floats(-5, 5))
    def test_point_on_both(self, ra, rb, ang, x, y):
        a = Circle((x, y), ra)
        b = Circle((x + (ra + rb) * math.cos(ang), y + (ra + rb) * math.sin(ang)), rb)
        t = tangency_point(a, b)
        assert abs(math.dist(t, a.center) - ra) <= 1e-9 * max(ra, rb, 1)
        assert abs(math.dist(t, b.center) - rb) <= 1e-9 * max(ra, rb, 1)


@pytest.mark.parametrize("p,c,expected", [
    ((3, 4), Circle((0, 0), 5), 0.0),
    ((0, 0), Circle((0, 2), 1), -3.0),
    ((0, 0), Circle((0, 0), 2), 4.0),
])
def test_power(p, c, expected):
    assert power(p, c) == pytest.approx(expected, abs=1e-12)


class TestApollonius:
    def test_unit_triple(self):
        c = apollonius_inscribed(Circle((0, 0), 1), Circle((2, 0), 1), Circle((1, SQ3), 1))
        assert c.center == pytest.approx((1, EQ_CIRCUMCENTER_Y), abs=1e-10)
        assert abs(c.radius - (2 / SQ3 - 1)) <= 1e-12

    def test_scaled_triple(self):
        c = apollonius_inscribed(Circle((0, 0), 2), Circle((4, 0), 2), Circle((2, 2 * SQ3), 2))
        assert c.radius == pytest.approx(2 * INSCRIBED_UNIT, abs=1e-12)
        assert round(c.radius, 7) == 0.3094011

    def test_far_third_circle(self):
        cs = [Circle((0, 0), 1), Circle((2, 0), 1), Circle((1, 10), 1)]
        c = apollonius_inscribed(*cs)
        for o in cs:
            assert abs(math.dist(c.center, o.center) - c.radius - o.radius) < 1e-9

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
    def test_descartes(self, r1, r2, r3):
        # place three mutually tangent circles
        a = Circle((0, 0), r1)
        b = Circle((r1 + r2, 0), r2)
        d13, d23, d12 = r1 + r3, r2 + r3, r1 + r2
        x = (d13 ** 2 - d23 ** 2 + d12 ** 2) / (2 * d12)
        c = Circle((x, math.sqrt(d13 ** 2 - x * x)), r3)
        got = apollonius_inscribed(a, b, c)
        ref = descartes_inner_radius(r1, r2, r3)
        assert got.radius == pytest.approx(ref, rel=1e-9)


class TestTangentToTwo:
    def test_residuals(self):
        a, b = Circle((0, 0), 1), Circle((4, 0), 1)
        c = tangent_circle_to_two(a, b, (2, 0.5))
        for o in (a, b):
            assert abs(math.dist(c.center, o.center) - c.radius - o.radius) < 1e-9
        assert abs(math.dist(c.center, (2, 0.5)) - c.radius) < 1e-9

    def test_symmetric(self):
        c = tangent_circle_to_two(Circle((0, 0), 1), Circle((2, 0), 1), (1, 1))
        assert c.center == pytest.approx((1, THROUGH_11_Y), abs=1e-9)
        assert c.radius == pytest.approx(1 - THROUGH_11_Y, abs=1e-9)

    def test_inside_disk(self):
        with pytest.raises(NoSolution):
            tangent_circle_to_two(Circle((0, 0), 1), Circle((4, 0), 1), (0.2, 0.1))


class TestContainment:
    def test_square(self):
        sq = unit_square()
        assert contains(sq, (0.5, 0.5))
        assert not contains(sq, (1.5, 0.5))

    def test_segment_through_reflex_corner(self):
        poly = l_shape()
        a, b = (0.5, 1.5), (1.5, 0.5)
        assert not segment_inside(poly, a, b)
        assert any(segment_hits(a, b, c, d) for _, c, d in poly.edges())

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_matches_path_oracle(self, name):
        poly = FIXTURES[name]()
        rng = np.random.default_rng(7)
        xs = [p.x for p in poly.outer]
        ys = [p.y for p in poly.outer]
        for p in rng.uniform([min(xs) - 0.1, min(ys) - 0.1], [max(xs) + 0.1, max(ys) + 0.1], (300, 2)):
            assert contains(poly, p) == inside(poly.loops, p)


class TestPolygon:
    def test_fixture_areas(self):
        assert unit_square().area == 1.0
        assert FIXTURES["holed"]().area == pytest.approx(8.0)
        assert l_shape().area == pytest.approx(3.0)

    def test_bowtie(self):
        with pytest.raises(InvalidPolygon, match="self-intersecting"):
            Polygon(((0, 0), (1, 1), (1, 0), (0, 1))).validate()

    def test_clockwise_outer(self):
        with pytest.raises(InvalidPolygon) as e:
            Polygon(((0, 0), (0, 1), (1, 1), (1, 0))).validate()
        assert e.value.loop == 0

    def test_signed_area_orientation(self):
        loop = [Point(0, 0), Point(1, 0), Point(0, 1)]
        assert signed_area(loop) == 0.5
        assert signed_area(loop[::-1]) == -0.5


def test_tolerance_bounds():
    with pytest.raises(ValueError):
        Tolerances(eps_rel=0.0)
    with pytest.raises(ValueError):
        Tolerances(eps_angle=1e-2)
