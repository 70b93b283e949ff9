import math

import pytest

from oracles import shoelace
from quadpack.fixtures import FIXTURES
from quadpack.mesh import quad_metrics
from quadpack.rightangle import (FootOutsideEdge, foot, mesh_opposite_right_angles, right_angle_cells,
                                 simplify_sites, subdivide_cells)
from quadpack.voronoi import InvalidPackingMode

SQ3 = math.sqrt(3)
RHOMBUS = ((0.0, 0.0), (1.0, -1 / SQ3), (2.0, 0.0), (1.0, 1 / SQ3))
# frozen: projection of (1, 0) on the line through (0, 0) and (1, -1/sqrt3)
FOOT_X, FOOT_Y = 0.75, 0.4330127018922193


def test_foot():
    f, t = foot((1, 0), RHOMBUS[0], RHOMBUS[1])
    assert t == pytest.approx(0.75)
    assert f == pytest.approx((FOOT_X, -FOOT_Y), abs=1e-15)
    assert FOOT_Y == pytest.approx(SQ3 / 4, abs=1e-16)


def test_rhombus_cell():
    quads = subdivide_cells([((1.0, 0.0), RHOMBUS)])
    assert len(quads) == 4
    # corner (2, 0), foot on the next edge, the site, foot on the previous edge
    flat = [x for p in quads[2] for x in p]
    assert flat == pytest.approx([2, 0, 2 - FOOT_X, FOOT_Y, 1, 0, 2 - FOOT_X, -FOOT_Y])
    for q in quads:
        m = quad_metrics(q)
        assert m.is_cyclic and m.has_opposite_right_angles
    assert sum(shoelace(q) for q in quads) == pytest.approx(shoelace(RHOMBUS))


def test_square_cell_gives_squares():
    sq = ((0, 0), (2, 0), (2, 2), (0, 2))
    quads = subdivide_cells([((1, 1), sq)])
    for q in quads:
        assert quad_metrics(q).angles == pytest.approx((90, 90, 90, 90))
        assert shoelace(q) == pytest.approx(1)


def test_shared_feet_merge():
    left = ((0, 0), (1, 0), (1, 1), (0, 1))
    right = ((1, 0), (2, 0), (2, 1), (1, 1))
    rep = {}
    quads = subdivide_cells([((0.5, 0.5), left), ((1.5, 0.5), right)], rep)
    assert rep["foot_residual"] == 0
    assert len(quads) == 8


def test_foot_outside_edge():
    with pytest.raises(FootOutsideEdge):
        subdivide_cells([((3, 0.5), ((0, 0), (1, 0), (1, 1), (0, 1)))])


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures(results, name):
    res = results(name, "rightangle")
    assert res.ok
    assert res.report["foot_residual"] <= 1e-9
    assert len(res.mesh.quads) == 4 * len(res.packing.tangencies)


def test_simplify_keeps_guarantees(packings):
    pk = packings("lshape", "centered")
    cells = right_angle_cells(pk)
    reduced, removed = simplify_sites(cells)
    assert len(reduced) == len(cells) - removed
    rep = {}
    m = mesh_opposite_right_angles(pk, FIXTURES["lshape"](), simplify=True, report=rep)
    assert rep["sites_removed"] == removed
    assert all(quad_metrics(m.quad_points(k)).has_opposite_right_angles
               for k in range(len(m.quads)))


def test_simplify_rejects_flat_corner():
    # merging would leave a straight angle at (1, 0) and (1, 1)
    left = ((0, 0), (1, 0), (1, 1), (0, 1))
    right = ((1, 0), (2, 0), (2, 1), (1, 1))
    reduced, removed = simplify_sites([((0.5, 0.5), left), ((1.5, 0.5), right)])
    assert removed == 0 and len(reduced) == 2


def test_rejects_tangent_mode(packings):
    with pytest.raises(InvalidPackingMode):
        right_angle_cells(packings("square", "tangent"))
