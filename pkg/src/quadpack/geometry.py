"""Geometric primitives: circles, tangency, power, Apollonius solving, polygons.

Points are plain ``(x, y)`` pairs (``Point`` named tuples on output).  All
tolerance comparisons are relative to the local feature scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np


class GeometryError(Exception):
    """Base class for geometric failures."""


class CollinearPoints(GeometryError):
    pass


class NotTangent(GeometryError):
    pass


class NoSolution(GeometryError):
    pass


class InvalidPolygon(GeometryError):
    def __init__(self, message: str, loop: int | None = None):
        super().__init__(message if loop is None else f"loop {loop}: {message}")
        self.loop = loop


class Point(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate {p!r}")
    return Point(x, y)


@dataclass(frozen=True)
class Tolerances:
    eps_rel: float = 1e-9
    eps_angle: float = 1e-6

    def __post_init__(self):
        for name in ("eps_rel", "eps_angle"):
            v = getattr(self, name)
            if not (0.0 < v < 1e-3):
                raise ValueError(f"{name} must lie in (0, 1e-3), got {v}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        r = float(self.radius)
        if not (r > 0.0 and math.isfinite(r)):
            raise GeometryError(f"circle radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def c(self) -> np.ndarray:
        return np.array(self.center)

    def point_at(self, angle: float) -> Point:
        return Point(self.center.x + self.radius * math.cos(angle),
                     self.center.y + self.radius * math.sin(angle))


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def cross2(u, v) -> float:
    return u[0] * v[1] - u[1] * v[0]


def orient(a, b, c) -> float:
    """Twice the signed area of triangle abc (positive when counterclockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def signed_area(loop: Sequence) -> float:
    pts = np.asarray(loop, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def interior_angle(prev, cur, nxt) -> float:
    """Interior angle at ``cur`` of a counterclockwise polygon, radians in [0, 2pi)."""
    a = (prev[0] - cur[0], prev[1] - cur[1])
    b = (nxt[0] - cur[0], nxt[1] - cur[1])
    # counterclockwise sweep from b to a
    t = math.atan2(cross2(b, a), a[0] * b[0] + a[1] * b[1])
    return t % (2.0 * math.pi)


# ---------------------------------------------------------------- circles

def circumcircle(p1, p2, p3, tol: Tolerances = DEFAULT_TOL) -> Circle:
    a, b, c = (np.asarray(p, dtype=float) for p in (p1, p2, p3))
    scale = max(np.ptp(np.array([a, b, c]), axis=0).max(), 1e-300)
    d = 2.0 * orient(a, b, c)
    if abs(d) <= tol.eps_rel * scale * scale:
        raise CollinearPoints(f"{p1}, {p2}, {p3} are collinear")
    # translate to a for conditioning
    bx, by = b - a
    cx, cy = c - a
    bb, cc = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * bb - by * cc) / d
    uy = (bx * cc - cx * bb) / d
    center = a + np.array([ux, uy])
    r = float(np.mean([np.linalg.norm(center - p) for p in (a, b, c)]))
    return Circle(Point(*center), r)


def tangency_point(a: Circle, b: Circle, tol: Tolerances = DEFAULT_TOL) -> Point:
    """Contact point of two tangent circles (external or internal)."""
    d = dist(a.center, b.center)
    bound = tol.eps_rel * max(a.radius, b.radius)
    u = (b.c - a.c) / d if d > 0 else None
    if abs(d - (a.radius + b.radius)) <= bound:
        # split the residual gap evenly
        s = a.radius + 0.5 * (d - a.radius - b.radius)
        return Point(*(a.c + s * u))
    if u is not None and abs(d - abs(a.radius - b.radius)) <= bound:
        if a.radius >= b.radius:
            return Point(*(a.c + a.radius * u))
        return Point(*(a.c - a.radius * u))
    raise NotTangent(f"circles {a} and {b} are not tangent (center distance {d})")


def power(p, c: Circle) -> float:
    dx, dy = p[0] - c.center.x, p[1] - c.center.y
    return c.radius * c.radius - (dx * dx + dy * dy)


def _polish_circle(sites, x, y, r, iters=30):
    """Newton iteration on a 3x3 tangency system.

    ``sites`` are ("circle", cx, cy, rad) for external tangency, ("line", px,
    py, nx, ny) for a line with unit normal pointing to the solution side, or
    ("point", px, py) for incidence.
    """
    v = np.array([x, y, r], dtype=float)
    for _ in range(iters):
        F = np.empty(3)
        J = np.empty((3, 3))
        for k, s in enumerate(sites):
            if s[0] == "circle":
                dx, dy = v[0] - s[1], v[1] - s[2]
                dd = math.hypot(dx, dy) or 1e-300
                F[k] = dd - (v[2] + s[3])
                J[k] = (dx / dd, dy / dd, -1.0)
            elif s[0] == "line":
                F[k] = (v[0] - s[1]) * s[3] + (v[1] - s[2]) * s[4] - v[2]
                J[k] = (s[3], s[4], -1.0)
            else:
                dx, dy = v[0] - s[1], v[1] - s[2]
                dd = math.hypot(dx, dy) or 1e-300
                F[k] = dd - v[2]
                J[k] = (dx / dd, dy / dd, -1.0)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return None
        # damp steps that would flip the radius sign
        lam = 1.0
        while v[2] - lam * step[2] <= 0 and lam > 1e-6:
            lam *= 0.5
        v = v - lam * step
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, abs(v[2]), abs(v[0]), abs(v[1])):
            break
    if not np.all(np.isfinite(v)) or v[2] <= 0:
        return None
    return v


def apollonius_inscribed(a: Circle, b: Circle, c: Circle,
                         tol: Tolerances = DEFAULT_TOL) -> Circle:
    """Circle externally tangent to three circles, inside the gap they bound.

    Radical-axis elimination reduces the system to a quadratic in the radius;
    near-singular configurations fall back to Newton iteration.
    """
    circles = (a, b, c)
    cs = np.array([ci.c for ci in circles])
    rs = np.array([ci.radius for ci in circles])
    A = np.array([2.0 * (cs[0] - cs[1]), 2.0 * (cs[0] - cs[2])])
    u = np.array([rs[i] ** 2 - rs[0] ** 2 - cs[i] @ cs[i] + cs[0] @ cs[0] for i in (1, 2)])
    v = np.array([2.0 * (rs[i] - rs[0]) for i in (1, 2)])
    candidates = []
    scale = max(np.ptp(cs, axis=0).max(), rs.max())
    if abs(np.linalg.det(A)) > 1e-12 * scale * scale:
        x0 = np.linalg.solve(A, u)
        x1 = np.linalg.solve(A, v)
        w = x0 - cs[0]
        qa = x1 @ x1 - 1.0
        qb = 2.0 * (w @ x1) - 2.0 * rs[0]
        qc = w @ w - rs[0] ** 2
        if abs(qa) < 1e-14:
            roots = [-qc / qb] if qb != 0 else []
        else:
            disc = qb * qb - 4 * qa * qc
            if disc >= -1e-12 * max(qb * qb, 1e-300):
                sq = math.sqrt(max(disc, 0.0))
                roots = [(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)]
            else:
                roots = []
        candidates = [(x0 + r * x1, r) for r in roots if r > 0]
    if not candidates:
        seed = (cs * (1.0 / rs)[:, None]).sum(axis=0) / (1.0 / rs).sum()
        sites = [("circle", *ci.center, ci.radius) for ci in circles]
        gaps = [np.linalg.norm(seed - cs[i]) - rs[i] for i in range(3)]
        sol = _polish_circle(sites, seed[0], seed[1], max(min(gaps), 1e-6 * scale))
        if sol is None:
            raise NoSolution("no circle tangent to all three")
        candidates = [(sol[:2], sol[2])]

    def inside_tri(p):
        s = [orient(cs[i], cs[(i + 1) % 3], p) for i in range(3)]
        return all(x >= 0 for x in s) or all(x <= 0 for x in s)

    candidates.sort(key=lambda cr: (not inside_tri(cr[0]), cr[1]))
    for center, r in candidates:
        sites = [("circle", *ci.center, ci.radius) for ci in circles]
        sol = _polish_circle(sites, center[0], center[1], r, iters=8)
        if sol is None:
            continue
        out = Circle(Point(sol[0], sol[1]), sol[2])
        res = [abs(dist(out.center, ci.center) - out.radius - ci.radius) for ci in circles]
        if max(res) <= tol.eps_rel * max(out.radius, 1.0):
            return out
    raise NoSolution("no circle tangent to all three")


def tangent_circle_to_two(a: Circle, b: Circle, through,
                          tol: Tolerances = DEFAULT_TOL) -> Circle:
    """Smallest circle through ``through`` externally tangent to ``a`` and ``b``."""
    p = np.array(as_point(through))
    for ci in (a, b):
        if dist(p, ci.center) <= ci.radius * (1 + tol.eps_rel):
            raise NoSolution(f"point {tuple(p)} lies inside {ci}")
    M = np.array([2.0 * (p - a.c), 2.0 * (p - b.c)])
    rhs0 = np.array([ci.radius ** 2 - ci.c @ ci.c + p @ p for ci in (a, b)])
    rhs1 = np.array([2.0 * a.radius, 2.0 * b.radius])
    sols = []
    scale = max(dist(a.center, b.center), a.radius, b.radius)
    if abs(np.linalg.det(M)) > 1e-12 * scale * scale:
        c0 = np.linalg.solve(M, rhs0)
        c1 = np.linalg.solve(M, rhs1)
        w = c0 - p
        qa = c1 @ c1 - 1.0
        qb = 2.0 * (w @ c1)
        qc = w @ w
        if abs(qa) < 1e-14:
            roots = [-qc / qb] if qb != 0 else []
        else:
            disc = qb * qb - 4 * qa * qc
            roots = []
            if disc >= 0:
                sq = math.sqrt(disc)
                roots = [(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)]
        sols = [(c0 + r * c1, r) for r in roots if r > 0]
    else:
        # p on the line of centers: search seeds on both sides of it
        n = np.array([-(b.c - a.c)[1], (b.c - a.c)[0]])
        n /= np.linalg.norm(n)
        for sgn in (1.0, -1.0):
            for h in (0.5, 2.0, 8.0):
                seed = p + sgn * h * scale * n
                sol = _polish_circle(
                    [("circle", *a.center, a.radius), ("circle", *b.center, b.radius),
                     ("point", *p)], seed[0], seed[1], h * scale)
                if sol is not None:
                    sols.append((sol[:2], sol[2]))
    out = []
    for center, r in sols:
        sol = _polish_circle([("circle", *a.center, a.radius), ("circle", *b.center, b.radius),
                              ("point", *p)], center[0], center[1], r, iters=8)
        if sol is None:
            continue
        cand = Circle(Point(sol[0], sol[1]), sol[2])
        res = max(abs(dist(cand.center, a.center) - cand.radius - a.radius),
                  abs(dist(cand.center, b.center) - cand.radius - b.radius),
                  abs(dist(cand.center, p) - cand.radius))
        if res <= tol.eps_rel * max(cand.radius, 1.0):
            out.append(cand)
    if not out:
        raise NoSolution("no circle through the point tangent to both circles")
    return min(out, key=lambda c: c.radius)


# ---------------------------------------------------------------- polygons

@dataclass(frozen=True)
class Polygon:
    outer: tuple
    holes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "outer", tuple(as_point(p) for p in self.outer))
        object.__setattr__(self, "holes",
                           tuple(tuple(as_point(p) for p in h) for h in self.holes))

    @property
    def loops(self) -> tuple:
        return (self.outer,) + self.holes

    @property
    def n(self) -> int:
        return sum(len(loop) for loop in self.loops)

    @property
    def area(self) -> float:
        return signed_area(self.outer) + sum(signed_area(h) for h in self.holes)

    @property
    def diameter(self) -> float:
        pts = np.array(self.outer)
        return float(np.hypot(*np.ptp(pts, axis=0)))

    def edges(self):
        """Yield ``(loop_index, a, b)`` for every boundary edge, region on the left."""
        for li, loop in enumerate(self.loops):
            for k in range(len(loop)):
                yield li, loop[k], loop[(k + 1) % len(loop)]

    def validate(self) -> None:
        if self.n < 3 or len(self.outer) < 3:
            raise InvalidPolygon("polygon needs at least 3 vertices")
        for li, loop in enumerate(self.loops):
            if len(loop) < 3:
                raise InvalidPolygon("loop has fewer than 3 vertices", li)
        segs = [(li, k, a, b) for li, loop in enumerate(self.loops)
                for k, (a, b) in enumerate(zip(loop, loop[1:] + loop[:1]))]
        for i in range(len(segs)):
            li, ki, a, b = segs[i]
            if dist(a, b) == 0:
                raise InvalidPolygon("repeated vertex", li)
            for j in range(i + 1, len(segs)):
                lj, kj, c, d = segs[j]
                adjacent = li == lj and (abs(ki - kj) == 1 or abs(ki - kj) == len(self.loops[li]) - 1)
                if adjacent:
                    continue
                if segments_intersect(a, b, c, d):
                    raise InvalidPolygon(
                        "self-intersecting" if li == lj else f"intersects loop {lj}", li)
        for li, loop in enumerate(self.loops):
            area = signed_area(loop)
            if li == 0 and area <= 0:
                raise InvalidPolygon("outer loop must be counterclockwise", li)
            if li > 0 and area >= 0:
                raise InvalidPolygon("hole loops must be clockwise", li)
        for hi, h in enumerate(self.holes, start=1):
            if not _point_in_loop(self.outer, h[0]):
                raise InvalidPolygon("hole lies outside the outer loop", hi)


def segments_intersect(a, b, c, d) -> bool:
    """Closed-segment intersection test (touching counts)."""
    d1, d2 = orient(c, d, a), orient(c, d, b)
    d3, d4 = orient(a, b, c), orient(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and \
            ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True

    def on_seg(p, q, r):
        return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
                and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))

    return ((d1 == 0 and on_seg(c, d, a)) or (d2 == 0 and on_seg(c, d, b))
            or (d3 == 0 and on_seg(a, b, c)) or (d4 == 0 and on_seg(a, b, d)))


def segments_cross_properly(a, b, c, d, eps: float = 0.0) -> bool:
    """True when the two segments cross at a point interior to both."""
    scale = max(dist(a, b), dist(c, d))
    e = eps * scale * scale
    d1, d2 = orient(c, d, a), orient(c, d, b)
    d3, d4 = orient(a, b, c), orient(a, b, d)
    return ((d1 > e and d2 < -e) or (d1 < -e and d2 > e)) and \
        ((d3 > e and d4 < -e) or (d3 < -e and d4 > e))


def _point_in_loop(loop, p) -> bool:
    inside = False
    x, y = p
    n = len(loop)
    for k in range(n):
        (x1, y1), (x2, y2) = loop[k], loop[(k + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def contains(poly: Polygon, p) -> bool:
    """Even-odd containment over all loops."""
    inside = False
    for loop in poly.loops:
        if _point_in_loop(loop, p):
            inside = not inside
    return inside


def segment_inside(poly: Polygon, a, b) -> bool:
    """Open segment ab avoids every boundary edge and its midpoint is inside."""
    for _, c, d in poly.edges():
        if _strictly_touches(a, b, c, d):
            return False
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    return contains(poly, mid)


def _on_open_segment(p, q, r, eps=1e-12) -> bool:
    L = dist(p, q)
    if L == 0 or abs(orient(p, q, r)) > eps * L * L:
        return False
    t = ((r[0] - p[0]) * (q[0] - p[0]) + (r[1] - p[1]) * (q[1] - p[1])) / (L * L)
    return eps < t < 1 - eps


def _strictly_touches(a, b, c, d) -> bool:
    """Does the open segment ab meet the closed segment cd?"""
    if segments_cross_properly(a, b, c, d):
        return True
    # c or d on the open segment ab, or collinear overlap
    if _on_open_segment(a, b, c) or _on_open_segment(a, b, d):
        return True
    return _on_open_segment(c, d, a) and _on_open_segment(c, d, b)


def point_segment_distance(p, a, b) -> tuple[float, np.ndarray, float]:
    """Distance from p to segment ab, the closest point and its parameter."""
    p, a, b = (np.asarray(q, dtype=float) for q in (p, a, b))
    ab = b - a
    L2 = ab @ ab
    t = 0.0 if L2 == 0 else float(np.clip((p - a) @ ab / L2, 0.0, 1.0))
    q = a + t * ab
    return float(np.linalg.norm(p - q)), q, t


def reflect(p, a, b) -> np.ndarray:
    """Mirror image of p across the line through a and b."""
    p, a, b = (np.asarray(q, dtype=float) for q in (p, a, b))
    u = (b - a) / np.linalg.norm(b - a)
    w = p - a
    return a + 2 * (w @ u) * u - w
