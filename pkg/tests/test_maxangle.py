import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import fermat_point_numeric, shoelace
from quadpack.fixtures import FIXTURES, unit_square
from quadpack.maxangle import LIMIT, NotAKite, fermat_point, mesh_120, subdivide_kite_120
from quadpack.mesh import is_simple_quad, quad_angles, validate


def kite(top, bottom):
    """Kite with apex angles ``top`` and ``bottom`` (degrees) on the y axis."""
    yt = 1 / math.tan(math.radians(top) / 2)
    yb = 1 / math.tan(math.radians(bottom) / 2)
    return [(0.0, -yb), (1.0, 0.0), (0.0, yt), (-1.0, 0.0)]


def check_partition(k, quads):
    assert len(quads) == 6
    for q in quads:
        assert is_simple_quad(q)
        a = shoelace(q)
        assert a > 0
        assert max(quad_angles(q)) <= LIMIT + 1e-6
    assert sum(shoelace(q) for q in quads) == pytest.approx(shoelace(k), rel=1e-9)


class TestCases:
    def test_square_kite(self):
        rep = {}
        quads = subdivide_kite_120(kite(90, 90), report=rep)
        assert rep["case"] == "a"
        check_partition(kite(90, 90), quads)

    def test_obtuse_top(self):
        rep = {}
        subdivide_kite_120(kite(150, 30), report=rep)
        assert rep["case"] == "c"

    def test_both_obtuse(self):
        rep = {}
        quads = subdivide_kite_120(kite(130, 130), report=rep)
        assert rep["case"] == "b"
        check_partition(kite(130, 130), quads)

    def test_three_circle_kite(self):
        s3 = math.sqrt(3)
        k = [(0, 0), (1, 0), (1, 1 / s3), (0.5, s3 / 2)]
        rep = {}
        check_partition(k, subdivide_kite_120(k, report=rep))
        assert rep["max_angle"] <= LIMIT + 1e-9

    def test_rectangle(self):
        with pytest.raises(NotAKite):
            subdivide_kite_120([(0, 0), (2, 0), (2, 1), (0, 1)])


@given(st.floats(10, 170), st.floats(10, 170))
def test_apex_sweep(top, bottom):
    k = kite(top, bottom)
    check_partition(k, subdivide_kite_120(k))


@given(st.floats(119.99, 120.01), st.floats(10, 170))
def test_apex_near_limit(top, bottom):
    k = kite(top, bottom)
    check_partition(k, subdivide_kite_120(k))


@given(st.floats(10, 170), st.floats(0.1, 10), st.floats(0, 2 * math.pi))
def test_similarity(top, s, th):
    assume(abs(top - LIMIT) > 1e-3)
    k = np.array(kite(top, 80))
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    moved = [tuple(p) for p in s * k @ rot.T + 3]
    r0, r1 = {}, {}
    subdivide_kite_120([tuple(p) for p in k], report=r0)
    subdivide_kite_120(moved, report=r1)
    assert r0["case"] == r1["case"]
    assert r1["max_angle"] == pytest.approx(r0["max_angle"], abs=1e-6)


@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=3, max_size=3))
def test_fermat_point(pts):
    a, b, c = (np.array(p) for p in pts)
    u, v = b - a, c - a
    area = abs(u[0] * v[1] - u[1] * v[0]) / 2
    if area < 0.5:
        return
    angles = []
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        x, y = q - p, r - p
        angles.append(math.degrees(math.acos(np.clip(x @ y / np.linalg.norm(x) / np.linalg.norm(y),
                                                     -1, 1))))
    if max(angles) > 119:
        return
    got = fermat_point(a, b, c)
    ref = fermat_point_numeric(a, b, c)
    assert np.linalg.norm(got - ref) <= 1e-5 * max(np.linalg.norm(u), np.linalg.norm(v))


def test_square_mesh():
    m = mesh_120(unit_square())
    assert len(m.quads) == 24
    assert validate(m, unit_square()).ok


@pytest.mark.parametrize("name", ["square", "gon8", "lshape", "holed"])
def test_fixture_meshes(results, name):
    res = results(name, "maxangle")
    kites = len(results(name, "kite").mesh.quads)
    assert len(res.mesh.quads) == 6 * kites
    assert res.report["quality"]["max_angle"] <= LIMIT + 1e-6
    assert res.report["quality"]["validation"]["ok"]
    assert FIXTURES[name]().n > 0
