"""Cyclic quadrilaterals with two opposite right angles, from the Voronoi cells."""
from __future__ import annotations

import math

import numpy as np

from .geometry import GeometryError, Point, Polygon, signed_area
from .mesh import MeshBuilder, QuadMesh
from .packing import Mode, Packing, repair_bad_gaps
from .voronoi import InvalidPackingMode, voronoi_cells


class FootOutsideEdge(GeometryError):
    pass


class BadBoundaryGap(GeometryError):
    pass


def foot(p, a, b) -> tuple[Point, float]:
    """Orthogonal projection of p on line ab and its parameter along ab."""
    a_, b_, p_ = np.array(a), np.array(b), np.array(p)
    ab = b_ - a_
    t = float((p_ - a_) @ ab / (ab @ ab))
    return Point(*(a_ + t * ab)), t


def _key(a, b):
    return (a, b) if a < b else (b, a)


def _edge_owners(cells):
    owners: dict = {}
    for k, (_, corners) in enumerate(cells):
        m = len(corners)
        for j in range(m):
            owners.setdefault(_key(corners[j], corners[(j + 1) % m]), []).append(k)
    return owners


def _cell_ok(site, corners, owners, cells, me, tol=1e-9) -> bool:
    """Feet of the site fall strictly inside every edge and agree with the
    neighbour's foot on shared edges; the cell stays convex."""
    m = len(corners)
    if signed_area(corners) <= 0:
        return False
    for j in range(m):
        a, b, c = corners[j - 1], corners[j], corners[(j + 1) % m]
        cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cr <= tol * math.dist(a, b) * math.dist(b, c):
            return False
    for j in range(m):
        a, b = corners[j], corners[(j + 1) % m]
        f, t = foot(site, a, b)
        if not tol < t < 1 - tol:
            return False
        for k in owners.get(_key(a, b), []):
            if k == me:
                continue
            g, _ = foot(cells[k][0], a, b)
            if math.dist(f, g) > tol * math.dist(a, b):
                return False
    return True


def simplify_sites(cells, poly: Polygon | None = None):
    """Greedily merge cells into a neighbour while the neighbour's site still
    projects inside every edge of the merged cell, matching the feet of the
    cells across each edge.  Returns the reduced cells and the removal count."""
    cells = [(site, tuple(corners)) for site, corners in cells]
    removed = 0
    changed = True
    while changed:
        changed = False
        owners = _edge_owners(cells)
        order = sorted(range(len(cells)), key=lambda k: (abs(signed_area(cells[k][1])), k))
        for k in order:
            site, corners = cells[k]
            m = len(corners)
            for j in range(m):
                u, v = corners[j], corners[(j + 1) % m]
                others = [n for n in owners.get(_key(u, v), []) if n != k]
                if len(others) != 1:
                    continue
                n = others[0]
                merged = _merge(corners, cells[n][1], u, v)
                if merged is None:
                    continue
                trial = cells[:]
                trial[n] = (cells[n][0], merged)
                trial[k] = (None, ())
                tr_owners = _edge_owners([c for c in trial if c[0] is not None])
                live = [c for c in trial if c[0] is not None]
                me = live.index(trial[n])
                if _cell_ok(cells[n][0], merged, tr_owners, live, me):
                    cells = live
                    removed += 1
                    changed = True
                    break
            if changed:
                break
    return cells, removed


def _merge(a_corners, b_corners, u, v):
    """Union of two cells sharing the edge u->v (in a) / v->u (in b)."""
    a, b = list(a_corners), list(b_corners)
    if v not in a or u not in b:
        return None
    i, j = a.index(v), b.index(u)
    a_rot = a[i:] + a[:i]          # v ... u
    b_rot = b[j:] + b[:j]          # u ... v
    if a_rot[-1] != u or b_rot[-1] != v:
        return None
    merged = tuple(a_rot + b_rot[1:-1])
    if len(set(merged)) != len(merged):
        return None
    return merged


def right_angle_cells(pk: Packing, repair: bool = True):
    if pk.mode != Mode.BOUNDARY_CENTERED:
        raise InvalidPackingMode("the right-angle mesh needs a boundary-centered packing")
    if repair:
        pk = repair_bad_gaps(pk)
    return [(c.site, c.corners) for c in voronoi_cells(pk)]


def subdivide_cells(cells, report: dict | None = None):
    """Split each cell by perpendiculars from its site; feet are shared per edge."""
    feet: dict = {}
    residual = 0.0
    quads = []
    for site, corners in cells:
        m = len(corners)
        fs = []
        for j in range(m):
            a, b = corners[j], corners[(j + 1) % m]
            f, t = foot(site, a, b)
            if not 0.0 < t < 1.0:
                raise FootOutsideEdge(f"perpendicular foot at parameter {t:.6g}")
            key = _key(a, b)
            if key in feet:
                residual = max(residual, math.dist(feet[key], f) / math.dist(a, b))
                f = feet[key]
            else:
                feet[key] = f
            fs.append(f)
        for j in range(m):
            quads.append((corners[j], fs[j], site, fs[j - 1]))
    if report is not None:
        report["foot_residual"] = residual
    return quads


def mesh_opposite_right_angles(pk: Packing, poly: Polygon | None = None, simplify: bool = False,
                               report: dict | None = None) -> QuadMesh:
    """Four quads per Voronoi cell, each with right angles at the two feet."""
    cells = right_angle_cells(pk)
    rep = report if report is not None else {}
    if simplify:
        cells, removed = simplify_sites(cells, poly)
        rep["sites_removed"] = removed
    mb = MeshBuilder()
    for q in subdivide_cells(cells, rep):
        mb.add(list(q))
    return mb.build(poly if poly is not None else pk.polygon)
