"""Quadrilaterals formed by circle centers and gap sites around each tangency."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Circle, GeometryError, Point, Polygon, contains, orient, reflect
from .mesh import MeshBuilder, QuadMesh
from .packing import Mode, Packing, repair_bad_gaps


class InvalidPackingMode(ValueError):
    pass


class DegenerateCell(GeometryError):
    pass


@dataclass(frozen=True)
class Cell:
    """Mesh element generated by one tangency point."""
    pair: tuple          # circle indices
    site: Point          # the tangency point
    corners: tuple       # (center i, gap site, center j, gap site), counterclockwise
    gaps: tuple          # indices of the two gaps


def tangency_gaps(pk: Packing) -> dict:
    """Map each circle pair to the gaps meeting at its tangency, with the tangency point."""
    out: dict = {}
    for gi, g in enumerate(pk.gaps):
        n = len(g.arcs)
        for k in range(n):
            a, b = g.arcs[k - 1], g.arcs[k]
            if a.kind == "arc" and b.kind == "arc":
                key = (min(a.ref, b.ref), max(a.ref, b.ref))
                out.setdefault(key, []).append((gi, b.start))
    return out


def voronoi_cells(pk: Packing, diagnostics: list | None = None) -> list[Cell]:
    cells = []
    for key, entries in sorted(tangency_gaps(pk).items()):
        if len(entries) != 2:
            msg = {"pair": list(key), "reason": f"tangency borders {len(entries)} gaps"}
            if diagnostics is None:
                raise DegenerateCell(msg["reason"])
            diagnostics.append(msg)
            continue
        (g1, t), (g2, _) = entries
        ci, cj = pk.circles[key[0]].center, pk.circles[key[1]].center
        s1, s2 = pk.gaps[g1].center, pk.gaps[g2].center
        corners = [ci, s1, cj, s2]
        area = sum(corners[k][0] * corners[k - 3][1] - corners[k - 3][0] * corners[k][1]
                   for k in range(4))
        if area < 0:
            corners = [ci, s2, cj, s1]
            g1, g2 = g2, g1
        inside = all(orient(corners[k], corners[(k + 1) % 4], t) > 0 for k in range(4))
        if not inside:
            msg = {"pair": list(key), "reason": "tangency not strictly inside its cell"}
            if diagnostics is None:
                raise DegenerateCell(msg["reason"])
            diagnostics.append(msg)
        cells.append(Cell(key, t, tuple(corners), (g1, g2)))
    return cells


def mesh_voronoi(pk: Packing, poly: Polygon | None = None, repair: bool = True,
                 diagnostics: list | None = None) -> QuadMesh:
    """One quad per tangency: the two circle centers and the two adjacent gap sites."""
    if pk.mode != Mode.BOUNDARY_CENTERED:
        raise InvalidPackingMode("the Voronoi mesh needs a boundary-centered packing")
    if repair:
        pk = repair_bad_gaps(pk)
    mb = MeshBuilder()
    for cell in voronoi_cells(pk, diagnostics):
        mb.add(list(cell.corners))
    return mb.build(poly if poly is not None else pk.polygon)


def dual_residuals(cells: list[Cell]) -> dict:
    """Check that every shared cell edge is the perpendicular bisector of the
    segment joining the two cells' tangency points."""
    owner: dict = {}
    for k, c in enumerate(cells):
        for j in range(4):
            a, b = c.corners[j], c.corners[(j + 1) % 4]
            key = (a, b) if a < b else (b, a)
            owner.setdefault(key, []).append(k)
    worst_mid = worst_ang = 0.0
    failures = []
    for (a, b), ks in owner.items():
        if len(ks) != 2:
            continue
        t, u = (np.array(cells[k].site) for k in ks)
        a_, b_ = np.array(a), np.array(b)
        e, d = b_ - a_, u - t
        ang = abs(math.atan2(abs(e[0] * d[1] - e[1] * d[0]), e @ d) - math.pi / 2)
        M = np.column_stack([e, -d])
        try:
            s, r = np.linalg.solve(M, t - a_)
        except np.linalg.LinAlgError:
            failures.append((a, b))
            continue
        mid = abs(r - 0.5)
        worst_mid, worst_ang = max(worst_mid, mid), max(worst_ang, ang)
        if not (0 < s < 1 and 0 < r < 1):
            failures.append((a, b))
    return {"midpoint": worst_mid, "angle": worst_ang, "edges": sum(len(v) == 2 for v in owner.values()),
            "not_crossing": failures}


# ---------------------------------------------------------------- power diagram

@dataclass(frozen=True)
class PowerFamily:
    """Packing circles together with one circle per gap, centered at the gap's site
    and passing through its tangency points."""
    primal: tuple
    dual: tuple
    corners: tuple       # tangency points and their mirror images across the boundary
    polygon: object

    @classmethod
    def from_packing(cls, pk: Packing, repair: bool = True) -> "PowerFamily":
        if repair:
            pk = repair_bad_gaps(pk)
        dual = []
        pts = [p for _, p in pk.tangencies]
        for g in pk.gaps:
            ref = g.tangency_points[0]
            dual.append(Circle(g.center, math.dist(g.center, ref)))
            for s in g.arcs:
                if s.kind == "seg":
                    pts.extend(Point(*reflect(t, *s.edge)) for t in g.tangency_points)
        return cls(tuple(pk.circles), tuple(dual), tuple(pts), pk.polygon)

    def power(self, p, c: Circle) -> float:
        return c.radius ** 2 - (p[0] - c.center.x) ** 2 - (p[1] - c.center.y) ** 2


def _intersections(a: Circle, b: Circle):
    d = math.dist(a.center, b.center)
    if d == 0 or d > a.radius + b.radius or d < abs(a.radius - b.radius):
        return []
    x = (d * d + a.radius ** 2 - b.radius ** 2) / (2 * d)
    h = math.sqrt(max(a.radius ** 2 - x * x, 0.0))
    u = (np.array(b.center) - np.array(a.center)) / d
    base = np.array(a.center) + x * u
    n = np.array([-u[1], u[0]])
    return [Point(*(base + h * n)), Point(*(base - h * n))]


def power_duality_check(mesh: QuadMesh, fam: PowerFamily, tol: float = 1e-9,
                        report: dict | None = None) -> bool:
    """Every mesh edge joins a packing circle and a gap circle whose two crossing
    points are tangency points (or mirrored ones) of zero power for both and
    nonpositive power for all other family circles; no other such pair exists."""
    prim = {c.center: k for k, c in enumerate(fam.primal)}
    dual = {c.center: k for k, c in enumerate(fam.dual)}
    circles = list(fam.primal) + list(fam.dual)
    centers = np.array([c.center for c in circles])
    radii = np.array([c.radius for c in circles])
    rmax = radii.max()
    tree = cKDTree(centers)
    corner_tree = cKDTree(np.array(fam.corners))
    poly = fam.polygon
    bad = []
    max_res = 0.0

    def others_ok(p, skip):
        worst = 0.0
        for j in tree.query_ball_point(p, rmax):
            if j in skip:
                continue
            worst = max(worst, (radii[j] ** 2 - np.sum((centers[j] - p) ** 2)) / radii[j] ** 2)
        return worst <= tol

    edges = set()
    for (u, v) in mesh.edges:
        pu, pv = mesh.vertices[u], mesh.vertices[v]
        if pu in prim and pv in dual:
            i, j = prim[pu], len(fam.primal) + dual[pv]
        elif pv in prim and pu in dual:
            i, j = prim[pv], len(fam.primal) + dual[pu]
        else:
            bad.append({"edge": [u, v], "reason": "edge does not join a circle and a gap circle"})
            continue
        edges.add((i, j))
        pts = _intersections(circles[i], circles[j])
        if len(pts) != 2:
            bad.append({"edge": [u, v], "reason": "family circles do not cross"})
            continue
        for p in pts:
            r2 = min(circles[i].radius, circles[j].radius) ** 2
            res = max(abs(fam.power(p, circles[i])), abs(fam.power(p, circles[j])))
            dist, _ = corner_tree.query(p)
            res = max(res, dist ** 2)
            max_res = max(max_res, res / r2)
            if res > tol * r2:
                bad.append({"edge": [u, v], "reason": "lune corner is not a tangency point"})
            elif contains(poly, p) and not others_ok(np.array(p), {i, j}):
                bad.append({"edge": [u, v], "reason": "lune corner inside another family circle"})
    # pairwise lune enumeration for adjacencies the mesh misses
    n0 = len(fam.primal)
    for i in range(n0):
        for j in tree.query_ball_point(fam.primal[i].center, fam.primal[i].radius + rmax):
            if j < n0 or (i, j) in edges:
                continue
            for p in _intersections(circles[i], circles[j]):
                if contains(poly, p) and others_ok(np.array(p), {i, j}):
                    if min(fam.power(p, circles[i]), fam.power(p, circles[j])) < -tol * rmax ** 2:
                        continue
                    bad.append({"pair": [i, j], "reason": "power diagram adjacency missing from mesh"})
                    break
    if report is not None:
        report.update({"max_residual": max_res, "failures": bad})
    return not bad
