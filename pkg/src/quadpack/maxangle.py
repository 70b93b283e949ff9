"""Refine kites into quads whose angles are all at most 120 degrees."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import DEFAULT_TOL, GeometryError, Point, Polygon, Tolerances, signed_area
from .kite import kite_quads
from .mesh import MeshBuilder, QuadMesh, is_simple_quad, quad_angles, quad_metrics
from .packing import Mode, PackOptions, Packing, pack

LIMIT = 120.0
GRID = np.linspace(0.02, 0.98, 49)


class NotAKite(GeometryError):
    pass


class AngleTargetMissed(GeometryError):
    def __init__(self, message, quad=None):
        super().__init__(message)
        self.quad = quad


def _mid(a, b) -> Point:
    # symmetric in a and b, so neighbouring kites produce bit-identical points
    return Point((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)


def fermat_point(a, b, c) -> np.ndarray:
    """Point seeing every side of the triangle under 120 degrees."""
    a, b, c = (np.asarray(p, float) for p in (a, b, c))

    def apex(p, q, away):
        m, d = (p + q) / 2, q - p
        n = np.array([-d[1], d[0]]) * math.sqrt(3) / 2
        return m - n if (away - m) @ n > 0 else m + n

    d1, d2 = apex(b, c, a) - a, apex(c, a, b) - b
    s, _ = np.linalg.solve(np.column_stack([d1, -d2]), b - a)
    return a + s * d1


def _triangle(k1, k2, k3, e12, e23, e31):
    try:
        p = Point(*fermat_point(e12, e23, e31))
    except np.linalg.LinAlgError:
        return None
    return [(k1, e12, p, e31), (k2, e23, p, e12), (k3, e31, p, e23)]


def orient_kite(pts, tol: Tolerances = DEFAULT_TOL):
    """Return (top, left, bottom, right), counterclockwise, with the larger apex angle on top."""
    pts = [Point(float(p[0]), float(p[1])) for p in pts]
    if len(pts) != 4:
        raise NotAKite("a kite has four vertices")
    try:
        m = quad_metrics(pts, tol)
    except GeometryError as e:
        raise NotAKite(str(e)) from e
    if not m.is_kite:
        raise NotAKite("no diagonal is an axis of symmetry")
    if signed_area(pts) < 0:
        pts = pts[::-1]
    s = [math.dist(pts[k], pts[(k + 1) % 4]) for k in range(4)]
    eq = lambda u, v: abs(u - v) <= tol.eps_rel * max(u, v)  # noqa: E731
    # apexes sit between equal sides; a rhombus has both diagonals, take 0-2
    apex = 0 if eq(s[3], s[0]) and eq(s[1], s[2]) else 1
    ang = quad_angles(pts)
    if ang[apex + 2] > ang[apex]:
        apex += 2
    t = pts[apex:] + pts[:apex]
    return tuple(t), ang[apex], ang[(apex + 2) % 4]


def _build(case, t, l, b, r, h):
    mtl, mlb, mbr, mrt = _mid(t, l), _mid(l, b), _mid(b, r), _mid(r, t)
    if case == "a":
        H = Point(l[0] + (r[0] - l[0]) * h, l[1] + (r[1] - l[1]) * h)
        parts = [_triangle(t, l, r, mtl, H, mrt), _triangle(b, r, l, mbr, H, mlb)]
    else:
        H = Point(b[0] + (t[0] - b[0]) * h, b[1] + (t[1] - b[1]) * h)
        parts = [_triangle(t, l, b, mtl, mlb, H), _triangle(b, r, t, mbr, mrt, H)]
    if None in parts:
        return None
    return parts[0] + parts[1]


def _worst(quads, area) -> float:
    if quads is None:
        return math.inf
    total = 0.0
    for q in quads:
        a = signed_area(q)
        if a <= 0 or not is_simple_quad(q):
            return math.inf
        total += a
    if abs(total - area) > 1e-9 * area:
        return math.inf
    return max(max(quad_angles(q)) for q in quads)


def _search(case, kite, area):
    f = lambda h: _worst(_build(case, *kite, h), area)  # noqa: E731
    # angles at the Fermat points are exactly 120, so reaching it is optimal
    for h in sorted(GRID, key=lambda h: (abs(h - 0.5), h)):
        v = f(h)
        if v <= LIMIT + 1e-9:
            return v, h
    vals = [f(h) for h in GRID]
    k = int(np.argmin(vals))
    if not math.isfinite(vals[k]):
        return math.inf, None
    lo, hi = GRID[max(k - 1, 0)], GRID[min(k + 1, len(GRID) - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    h = res.x if res.fun < vals[k] else GRID[k]
    return min(res.fun, vals[k]), h


def subdivide_kite_120(kite, tol: Tolerances = DEFAULT_TOL, report: dict | None = None) -> list:
    """Six quads partitioning the kite, all angles at most 120 degrees.

    Splits on the left-right diagonal (case a) when both apex angles are
    below 120, on the symmetry axis otherwise (case b, or case c when only
    the top angle is large); the split point position is found by a 1D search.
    """
    k, top, bottom = orient_kite(kite, tol)
    area = signed_area(k)
    cases = []
    if top < LIMIT and bottom < LIMIT:
        cases.append("a")
    if (top > 60 and bottom > 60) or top >= LIMIT:
        cases.append("b" if bottom >= LIMIT or top < LIMIT else "c")
    if not cases:
        cases.append("b")
    limit = LIMIT + math.degrees(tol.eps_angle)
    best = None
    for case in cases:
        worst, h = _search("a" if case == "a" else "b", k, area)
        if h is not None and (best is None or worst < best[0] - 1e-9):
            best = (worst, case, h)
    if cases == ["a"] and (best is None or best[0] > limit):
        # an apex at 120 up to round-off degenerates the diagonal split
        worst, h = _search("b", k, area)
        if h is not None and (best is None or worst < best[0]):
            best = (worst, "c" if top >= LIMIT - 1e-6 else "b", h)
    if best is None or best[0] > limit:
        raise AngleTargetMissed(f"best subdivision reaches {best[0] if best else math.inf:.6f} degrees",
                                quad=tuple(k))
    quads = _build("a" if best[1] == "a" else "b", *k, best[2])
    if report is not None:
        report.update({"case": best[1], "h": float(best[2]), "max_angle": best[0]})
    return quads


def mesh_120_from_packing(pk: Packing, poly: Polygon | None = None,
                          tol: Tolerances = DEFAULT_TOL) -> QuadMesh:
    mb = MeshBuilder()
    for kite in kite_quads(pk):
        for q in subdivide_kite_120(kite, tol):
            mb.add(list(q))
    return mb.build(poly if poly is not None else pk.polygon, tol)


def mesh_120(poly: Polygon, opts: PackOptions = PackOptions()) -> QuadMesh:
    """Kite mesh of a boundary-tangent packing, each kite split into six quads."""
    opts = replace(opts, mode=Mode.BOUNDARY_TANGENT)
    return mesh_120_from_packing(pack(poly, opts), poly, opts.tol)
