"""Gap classification, gap circumcircles and splitting of bad four-sided gaps."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy.optimize import minimize_scalar

from ..geometry import (Circle, CollinearPoints, DEFAULT_TOL, Point, Tolerances,
                        circumcircle, reflect, tangency_point)
from .model import CocircularityViolation, Degenerate, Gap, GapKind, GapSide, cw_span


def _best_triangle(pts):
    best, key = None, -1.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            for k in range(j + 1, len(pts)):
                a = abs((pts[j][0] - pts[i][0]) * (pts[k][1] - pts[i][1])
                        - (pts[j][1] - pts[i][1]) * (pts[k][0] - pts[i][0]))
                if a > key:
                    best, key = (pts[i], pts[j], pts[k]), a
    return best


def circle_through(pts, tol: Tolerances = DEFAULT_TOL) -> Circle:
    """Circle through 3 or 4 (nearly) cocircular points, from the best-conditioned triple."""
    return circumcircle(*_best_triangle(list(pts)), tol=tol)


def gap_circumcircle(g: Gap, tol: Tolerances = DEFAULT_TOL) -> Circle:
    if not g.all_arcs:
        raise ValueError("gap has straight sides")
    pts = g.tangency_points
    c = circle_through(pts, tol)
    res = max(abs(math.dist(p, c.center) - c.radius) for p in pts)
    if res > 10 * tol.eps_rel * c.radius:
        raise CocircularityViolation(f"tangency points off their circle by {res:.3g}")
    return c


def hull_margin(pts, p) -> float:
    """Signed distance from p to the boundary of the convex polygon ``pts`` (positive inside)."""
    pts = [np.asarray(q, float) for q in pts]
    n = len(pts)
    area2 = sum(pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n))
    sgn = 1.0 if area2 > 0 else -1.0
    out = math.inf
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        e = b - a
        L = math.hypot(*e)
        if L == 0:
            continue
        out = min(out, sgn * (e[0] * (p[1] - a[1]) - e[1] * (p[0] - a[0])) / L)
    return out


def four_gap_margin(pts, tol: Tolerances = DEFAULT_TOL) -> float:
    """Hull margin of the circumcenter, relative to the circumradius."""
    try:
        c = circle_through(pts, tol)
    except CollinearPoints:
        return -math.inf
    return hull_margin(pts, c.center) / c.radius


def classify_gap(g: Gap, tol: Tolerances = DEFAULT_TOL) -> GapKind:
    n = len(g.arcs)
    segs = sum(1 for s in g.arcs if s.kind == "seg")
    if n == 3 and segs == 0:
        return GapKind.THREE_SIDED
    if n == 4 and segs == 0:
        good = four_gap_margin(g.tangency_points, tol) >= -tol.eps_rel
        return GapKind.GOOD_FOUR_SIDED if good else GapKind.BAD_FOUR_SIDED
    if n == 3 and segs == 1:
        return GapKind.BOUNDARY_THREE_SIDED
    if n == 3 and segs == 2:
        return GapKind.CONVEX_VERTEX
    if n == 4 and segs == 2:
        return GapKind.REFLEX_VERTEX
    if n == 4 and segs == 1:
        return GapKind.BOUNDARY_FOUR_SIDED
    raise ValueError(f"not a terminal gap: {n} sides, {segs} straight")


def line_point_equidistant(a, b, p, q) -> Point:
    """Point on line ab at equal distance from p and q."""
    a, b, p, q = (np.asarray(v, float) for v in (a, b, p, q))
    u = b - a
    den = 2.0 * (u @ (q - p))
    if abs(den) < 1e-300:
        raise Degenerate("chord parallel to boundary edge")
    s = ((q @ q - p @ p) - 2.0 * (a @ (q - p))) / den
    return Point(*(a + s * u))


def chain_reflected_corners(g: Gap):
    """Corners of a boundary four-sided gap together with their mirror images."""
    seg = next(s for s in g.arcs if s.kind == "seg")
    t1, t2 = g.tangency_points
    a, b = seg.edge
    return (t1, t2, Point(*reflect(t2, a, b)), Point(*reflect(t1, a, b)))


def gap_site(g: Gap) -> Point:
    """Mesh vertex placed inside a gap."""
    if g.kind in (GapKind.CONVEX_VERTEX, GapKind.REFLEX_VERTEX):
        return g.vertex
    if g.kind == GapKind.BOUNDARY_THREE_SIDED:
        seg = next(s for s in g.arcs if s.kind == "seg")
        c = circumcircle(*g.corners)
        a, b = (np.asarray(v, float) for v in seg.edge)
        u = (b - a) / np.linalg.norm(b - a)
        return Point(*(a + ((np.asarray(c.center) - a) @ u) * u))
    if g.kind == GapKind.BOUNDARY_FOUR_SIDED:
        seg = next(s for s in g.arcs if s.kind == "seg")
        t1, t2 = g.tangency_points
        return line_point_equidistant(*seg.edge, t1, t2)
    return gap_circumcircle(g).center


def with_site(g: Gap) -> Gap:
    return replace(g, center=gap_site(g))


# ---------------------------------------------------------------- bad gaps

def _splitter(B: Circle, D: Circle, phi: float):
    u = np.array([math.cos(phi), math.sin(phi)])
    w = B.c + B.radius * u - D.c
    den = 2.0 * (w @ u - D.radius)
    if abs(den) < 1e-300:
        return None
    rho = (D.radius ** 2 - w @ w) / den
    if not rho > 0 or not math.isfinite(rho):
        return None
    return Circle(Point(*(B.c + (B.radius + rho) * u)), rho)


def _disjoint(a: Circle, b: Circle, tol: Tolerances) -> bool:
    return math.dist(a.center, b.center) >= (a.radius + b.radius) * (1 + 1e3 * tol.eps_rel)


def _children_margin(circles, i, E, tol):
    """Worst hull margin of the two gaps made by E tangent to circles i and i+2."""
    k = [(i + j) % 4 for j in range(4)]
    A, B, C, D = (circles[j] for j in (k[3], k[0], k[1], k[2]))
    try:
        first = [tangency_point(A, B), tangency_point(B, E), tangency_point(E, D), tangency_point(D, A)]
        second = [tangency_point(B, C), tangency_point(C, D), tangency_point(D, E), tangency_point(E, B)]
    except Exception:
        return -math.inf
    return min(four_gap_margin(first, tol), four_gap_margin(second, tol))


def split_candidates(g: Gap, tol: Tolerances = DEFAULT_TOL):
    """Best splitter for each opposite pair: (margin, i, circle)."""
    circles = g.circles
    out = []
    for i in range(4):
        B, D = circles[i], circles[(i + 2) % 4]
        others = (circles[(i + 1) % 4], circles[(i + 3) % 4])
        side = g.arcs[i]
        a0 = math.atan2(side.start[1] - B.center.y, side.start[0] - B.center.x)
        span = cw_span(B.center, side.start, side.end)

        def score(t):
            E = _splitter(B, D, a0 - span * t)
            if E is None or not all(_disjoint(E, o, tol) for o in others):
                return -math.inf
            return _children_margin(circles, i, E, tol)

        ts = np.linspace(0.0, 1.0, 81)[1:-1]
        vals = [score(t) for t in ts]
        j = int(np.argmax(vals))
        if not math.isfinite(vals[j]):
            continue
        lo, hi = ts[max(j - 1, 0)], ts[min(j + 1, len(ts) - 1)]
        res = minimize_scalar(lambda t: -score(t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        t = res.x if -res.fun > vals[j] else ts[j]
        out.append((score(t), i, _splitter(B, D, a0 - span * t)))
    out.sort(key=lambda m: (-m[0], m[1]))
    return out


def split_bad_gap(g: Gap, tol: Tolerances = DEFAULT_TOL) -> Circle:
    """Circle tangent to two opposite circles of a bad gap leaving two good gaps."""
    if g.kind != GapKind.BAD_FOUR_SIDED:
        raise ValueError("split_bad_gap requires a BadFourSided gap")
    return split_gap_children(g, tol)[0]


def split_gap_children(g: Gap, tol: Tolerances = DEFAULT_TOL):
    """Splitter circle, index of the first touched side and the two child gaps."""
    cands = split_candidates(g, tol)
    if not cands or cands[0][0] < -tol.eps_rel:
        raise Degenerate("no splitter leaves two good gaps")
    _, i, E = cands[0]
    circles = g.circles
    A, B, C, D = (circles[(i + j) % 4] for j in (3, 0, 1, 2))
    first = Gap.from_circles([A, B, E, D])
    second = Gap.from_circles([B, C, D, E])
    for child in (first, second):
        if child.kind != GapKind.GOOD_FOUR_SIDED:
            raise Degenerate("split produced a bad gap")
    return E, i, first, second


def make_side(kind, ref, start, end, circles, edges) -> GapSide:
    if kind == "arc":
        return GapSide("arc", ref, start, end, circle=circles[ref])
    return GapSide("seg", ref, start, end, edge=edges[ref])
