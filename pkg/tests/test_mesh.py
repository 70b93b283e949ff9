import json
import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import shoelace
from quadpack.fixtures import FIXTURES, unit_square
from quadpack.geometry import Polygon
from quadpack.mesh import (MeshBuilder, NonSimpleQuad, QuadMesh, element_count_ratio, max_angle,
                           quad_angles, quad_metrics, quality_report, validate)

SQ3 = math.sqrt(3)
KITE = ((0, 0), (1, 0), (1, 1 / SQ3), (0.5, SQ3 / 2))


def grid(n):
    b = MeshBuilder()
    for i in range(n):
        for j in range(n):
            x0, y0, h = i / n, j / n, 1 / n
            b.add([(x0, y0), (x0 + h, y0), (x0 + h, y0 + h), (x0, y0 + h)])
    return b.build(unit_square())


class TestCounts:
    def test_single_quad(self):
        m = grid(1)
        assert m.counts == {"x": 4, "i": 0, "q": 1, "e": 4}
        assert validate(m, unit_square()).ok

    def test_two_by_two(self):
        m = grid(2)
        assert m.counts == {"x": 8, "i": 1, "q": 4, "e": 12}
        c = m.counts
        assert 4 * c["q"] == 2 * c["e"] - c["x"]
        assert c["x"] + c["i"] + c["q"] - c["e"] == 1
        assert validate(m, unit_square()).ok

    def test_t_junction(self):
        b = MeshBuilder()
        b.add([(0, 0), (0.5, 0), (0.5, 1), (0, 1)])
        b.add([(0.5, 0), (1, 0), (1, 0.5), (0.5, 0.5)])
        b.add([(0.5, 0.5), (1, 0.5), (1, 1), (0.5, 1)])
        v = validate(b.build(unit_square()), unit_square())
        assert not v.ok
        assert any(x["check"] == "conformity" for x in v.violations)

    def test_missing_quad_breaks_area(self):
        m = grid(2)
        m = QuadMesh(m.vertices, m.boundary, m.quads[:3])
        v = validate(m, unit_square())
        assert any(x["check"] == "area" for x in v.violations)
        assert v.area_residual == pytest.approx(0.25)

    def test_holed_counts_match_euler(self, results):
        m = results("holed", "kite").mesh
        c = m.counts
        assert c["x"] + c["i"] + c["q"] - c["e"] == 0


class TestMetrics:
    def test_three_circle_kite(self):
        m = quad_metrics(KITE)
        assert m.angles == pytest.approx((60, 90, 120, 90))
        assert m.is_kite and m.is_cyclic
        assert m.cross_ratio == pytest.approx(1)
        assert m.has_opposite_right_angles

    def test_square(self):
        m = quad_metrics(((0, 0), (1, 0), (1, 1), (0, 1)))
        assert m.max_angle == m.min_angle == pytest.approx(90)
        assert m.is_kite and m.is_cyclic and m.has_opposite_right_angles

    def test_rectangle(self):
        m = quad_metrics(((0, 0), (2, 0), (2, 1), (0, 1)))
        assert m.cross_ratio == pytest.approx(4)
        assert not m.is_kite
        assert m.is_cyclic

    def test_parallelogram(self):
        pts = ((0, 0), (1, 0), (2, 1), (1, 1))
        assert quad_angles(pts) == pytest.approx([45, 135, 45, 135])
        assert not quad_metrics(pts).is_cyclic

    def test_clockwise_input(self):
        assert quad_metrics(KITE[::-1]).angles == pytest.approx((60, 90, 120, 90))

    def test_bowtie(self):
        with pytest.raises(NonSimpleQuad):
            quad_metrics(((0, 0), (1, 1), (1, 0), (0, 1)))

    @given(st.floats(0.01, 100), st.floats(0, 2 * math.pi), st.floats(-50, 50), st.floats(-50, 50),
           st.lists(st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)), min_size=4, max_size=4))
    def test_similarity_invariance(self, s, th, dx, dy, jitter):
        base = [(0, 0), (1, 0), (1, 1), (0, 1)]
        pts = [(x + a, y + b) for (x, y), (a, b) in zip(base, jitter)]
        c, sn = math.cos(th), math.sin(th)
        moved = [(s * (c * x - sn * y) + dx, s * (sn * x + c * y) + dy) for x, y in pts]
        m0, m1 = quad_metrics(pts), quad_metrics(moved)
        assert m1.angles == pytest.approx(m0.angles, abs=1e-7)
        assert m1.cross_ratio == pytest.approx(m0.cross_ratio, rel=1e-9)
        assert sum(m0.angles) == pytest.approx(360)

    @given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.2, 2.9))
    def test_kite_cross_ratio(self, a, b, half):
        # apex at origin, axis along x, sides a then b
        p1 = (a * math.cos(half), a * math.sin(half))
        p3 = (p1[0], -p1[1])
        h = math.sqrt(b * b - p1[1] ** 2) if b > p1[1] else None
        assume(h is not None)
        far = (p1[0] + h, 0.0)
        assume(far[0] > p1[0] + 1e-3 and far[0] > 1e-3)
        m = quad_metrics(((0, 0), p3, far, p1))
        assert m.is_kite
        assert m.cross_ratio == pytest.approx(1, rel=1e-9)


def test_max_angle_and_ratio():
    b = MeshBuilder()
    b.add([(0, 0), (1, 0), (2, 1), (1, 1)])
    m = b.build(None)
    assert max_angle(m) == pytest.approx(135)
    assert element_count_ratio(grid(2), unit_square()) == 1.0


def test_builder_merges_and_orients():
    b = MeshBuilder()
    q0 = b.add([(0, 0), (0, 1), (1, 1), (1, 0)])
    q1 = b.add([(1, 0), (1, 1), (2, 1), (2, 0)])
    assert len(b.vertices) == 6
    assert [tuple(b.vertices[v]) for v in q0] == [(1, 0), (1, 1), (0, 1), (0, 0)]
    m = b.build(Polygon(((0, 0), (2, 0), (2, 1), (0, 1))))
    shared = {tuple(b.vertices[v]) for v in set(q0) & set(q1)}
    assert shared == {(1, 0), (1, 1)}
    assert all(m.boundary)
    assert shoelace(m.quad_points(0)) == pytest.approx(1)


class TestSerialization:
    def test_json_round_trip(self, results):
        m = results("lshape", "rightangle").mesh
        back = QuadMesh.from_json(json.loads(m.dumps()))
        assert back == m

    def test_off(self):
        text = grid(1).to_off().splitlines()
        assert text[0] == "OFF"
        assert text[1] == "4 1 4"
        assert text[-1].startswith("4 ")


@pytest.mark.parametrize("name", ["square", "lshape", "holed"])
def test_quality_report_fields(results, name):
    res = results(name, "kite")
    rep = quality_report(res.mesh, FIXTURES[name]())
    assert rep["kite_fraction"] == 1.0
    assert rep["euler"]["h"] == len(FIXTURES[name]().holes)
    assert rep["area_residual"] <= 1e-9
    assert rep["validation"]["ok"]
    assert isinstance(rep["max_angle"], float)
