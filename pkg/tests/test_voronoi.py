import math

import pytest

from oracles import circumcenter
from quadpack.fixtures import FIXTURES
from quadpack.mesh import QuadMesh, quad_metrics
from quadpack.voronoi import (Cell, InvalidPackingMode, PowerFamily, dual_residuals, mesh_voronoi,
                              power_duality_check, voronoi_cells)

SQ3 = math.sqrt(3)
A, B, C = (0.0, 0.0), (2.0, 0.0), (1.0, SQ3)
S = (1.0, 1 / SQ3)            # site of the gap between A, B, C
S_AB = (1.0, -1 / SQ3)        # mirror of S across AB
S_AC = (-0.5, SQ3 / 2)        # mirror of S across AC


def test_site_is_circumcenter_of_tangencies():
    c, r = circumcenter((1, 0), (0.5, SQ3 / 2), (1.5, SQ3 / 2))
    assert c == pytest.approx(S)
    assert r == pytest.approx(1 / SQ3)


def test_rhombus_cell():
    m = quad_metrics((A, S_AB, B, S))
    assert m.angles == pytest.approx((60, 120, 60, 120))
    assert m.is_kite


def test_dual_edges_bisect_tangency_segments():
    cells = [Cell((0, 1), (1.0, 0.0), (A, S_AB, B, S), (1, 0)),
             Cell((0, 2), (0.5, SQ3 / 2), (A, S, C, S_AC), (0, 2))]
    d = dual_residuals(cells)
    assert d["edges"] == 1
    assert d["midpoint"] < 1e-15
    assert d["angle"] < 1e-12
    assert d["not_crossing"] == []


def test_misplaced_site_detected():
    cells = [Cell((0, 1), (1.0, 0.1), (A, S_AB, B, S), (1, 0)),
             Cell((0, 2), (0.5, SQ3 / 2), (A, S, C, S_AC), (0, 2))]
    assert dual_residuals(cells)["angle"] > 1e-3


class TestSquare:
    def test_cells(self, packings):
        pk = packings("square", "centered")
        cells = voronoi_cells(pk)
        assert len(cells) == 4
        for cell in cells:
            i, j = cell.pair
            ci, cj = pk.circles[i], pk.circles[j]
            assert cell.corners[0] == ci.center and cell.corners[2] == cj.center
            assert math.dist(cell.site, ci.center) == pytest.approx(ci.radius)

    def test_mesh(self, packings):
        m = mesh_voronoi(packings("square", "centered"), FIXTURES["square"]())
        assert len(m.quads) == 4
        assert all(quad_metrics(m.quad_points(k)).is_kite for k in range(4))

    def test_power_duality(self, packings):
        pk = packings("square", "centered")
        m = mesh_voronoi(pk)
        rep = {}
        assert power_duality_check(m, PowerFamily.from_packing(pk), 1e-9, rep)
        assert rep["max_residual"] <= 1e-9

    def test_perturbed_vertex_fails(self, packings):
        pk = packings("square", "centered")
        m = mesh_voronoi(pk)
        k = next(i for i, b in enumerate(m.boundary) if not b)
        moved = list(m.vertices)
        moved[k] = (moved[k][0] + 0.1, moved[k][1])
        bad = QuadMesh(tuple(moved), m.boundary, m.quads)
        rep = {}
        assert not power_duality_check(bad, PowerFamily.from_packing(pk), 1e-9, rep)
        assert rep["failures"]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_duality(results, name):
    res = results(name, "voronoi")
    checks = {c.name: c for c in res.checks}
    assert checks["power_duality"].ok
    assert checks["dual_midpoint"].value <= 1e-9
    assert checks["dual_not_crossing"].value == 0
    assert len(res.mesh.quads) == len(res.packing.tangencies)


def test_rejects_tangent_mode(packings):
    with pytest.raises(InvalidPackingMode):
        mesh_voronoi(packings("square", "tangent"))
