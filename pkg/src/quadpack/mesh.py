"""Quadrilateral meshes: storage, conformity and counting checks, element quality."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .geometry import (DEFAULT_TOL, GeometryError, Point, Polygon, Tolerances, contains,
                       point_segment_distance, segments_cross_properly, signed_area)


class NonSimpleQuad(GeometryError):
    pass


@dataclass(frozen=True)
class QuadMesh:
    vertices: tuple
    boundary: tuple
    quads: tuple

    @property
    def edges(self) -> tuple:
        return tuple(sorted(edge_counts(self.quads)))

    @property
    def counts(self) -> dict:
        x = sum(self.boundary)
        return {"x": x, "i": len(self.vertices) - x, "q": len(self.quads), "e": len(self.edges)}

    def quad_points(self, k: int) -> tuple:
        return tuple(self.vertices[v] for v in self.quads[k])

    def to_json(self) -> dict:
        return {"vertices": [[float(p[0]), float(p[1])] for p in self.vertices],
                "boundary": [bool(b) for b in self.boundary],
                "quads": [list(map(int, q)) for q in self.quads]}

    def dumps(self) -> str:
        # repr of a float is the shortest string that round-trips
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> "QuadMesh":
        return cls(tuple(Point(float(x), float(y)) for x, y in data["vertices"]),
                   tuple(bool(b) for b in data["boundary"]),
                   tuple(tuple(int(v) for v in q) for q in data["quads"]))

    def to_off(self) -> str:
        lines = ["OFF", f"{len(self.vertices)} {len(self.quads)} {len(self.edges)}"]
        lines += [f"{p[0]!r} {p[1]!r} 0.0" for p in self.vertices]
        lines += ["4 " + " ".join(map(str, q)) for q in self.quads]
        return "\n".join(lines) + "\n"


def edge_counts(quads) -> Counter:
    c: Counter = Counter()
    for q in quads:
        for k in range(4):
            a, b = q[k], q[(k + 1) % 4]
            c[(a, b) if a < b else (b, a)] += 1
    return c


def on_boundary(poly: Polygon, p, tol: float) -> bool:
    return any(point_segment_distance(p, a, b)[0] <= tol for _, a, b in poly.edges())


class MeshBuilder:
    """Collects quads given by coordinates, merging bit-identical vertices."""

    def __init__(self):
        self.index: dict = {}
        self.vertices: list = []
        self.quads: list = []

    def vertex(self, p) -> int:
        key = (float(p[0]), float(p[1]))
        k = self.index.get(key)
        if k is None:
            k = self.index[key] = len(self.vertices)
            self.vertices.append(Point(*key))
        return k

    def add(self, pts) -> tuple:
        if signed_area(pts) < 0:
            pts = pts[::-1]
        q = tuple(self.vertex(p) for p in pts)
        self.quads.append(q)
        return q

    def build(self, poly: Polygon | None, tol: Tolerances = DEFAULT_TOL) -> QuadMesh:
        if poly is None:
            flags = (False,) * len(self.vertices)
        else:
            eps = tol.eps_rel * poly.diameter
            flags = tuple(on_boundary(poly, p, eps) for p in self.vertices)
        return QuadMesh(tuple(self.vertices), flags, tuple(self.quads))


# ---------------------------------------------------------------- metrics

def quad_angles(pts) -> list[float]:
    """Interior angles in degrees of a counterclockwise quad."""
    out = []
    for i in range(4):
        p, c, n = pts[i - 1], pts[i], pts[(i + 1) % 4]
        a = (p[0] - c[0], p[1] - c[1])
        b = (n[0] - c[0], n[1] - c[1])
        t = math.atan2(b[0] * a[1] - b[1] * a[0], a[0] * b[0] + a[1] * b[1])
        out.append(math.degrees(t % (2 * math.pi)))
    return out


def is_simple_quad(pts) -> bool:
    return not (segments_cross_properly(pts[0], pts[1], pts[2], pts[3])
                or segments_cross_properly(pts[1], pts[2], pts[3], pts[0]))


@dataclass(frozen=True)
class QuadMetrics:
    angles: tuple
    max_angle: float
    min_angle: float
    cross_ratio: float
    is_kite: bool
    is_cyclic: bool
    has_opposite_right_angles: bool


def _cyclic(pts, tol: Tolerances) -> bool:
    from .geometry import CollinearPoints, circumcircle
    for skip in (3, 0, 1, 2):
        tri = [pts[j] for j in range(4) if j != skip]
        try:
            c = circumcircle(*tri)
        except CollinearPoints:
            continue
        return abs(math.dist(pts[skip], c.center) - c.radius) <= tol.eps_rel * c.radius
    return False


def quad_metrics(pts, tol: Tolerances = DEFAULT_TOL) -> QuadMetrics:
    pts = [Point(float(p[0]), float(p[1])) for p in pts]
    if not is_simple_quad(pts) or signed_area(pts) == 0:
        raise NonSimpleQuad("quad edges cross")
    if signed_area(pts) < 0:
        pts = pts[::-1]
    s = [math.dist(pts[k], pts[(k + 1) % 4]) for k in range(4)]
    ang = quad_angles(pts)
    eq = lambda u, v: abs(u - v) <= tol.eps_rel * max(u, v)  # noqa: E731
    kite = (eq(s[0], s[1]) and eq(s[2], s[3])) or (eq(s[1], s[2]) and eq(s[3], s[0]))
    rad = [math.radians(a) for a in ang]
    right = lambda a: abs(a - math.pi / 2) <= tol.eps_angle  # noqa: E731
    opposite = (right(rad[0]) and right(rad[2])) or (right(rad[1]) and right(rad[3]))
    return QuadMetrics(tuple(ang), max(ang), min(ang), s[0] * s[2] / (s[1] * s[3]),
                       kite, _cyclic(pts, tol), opposite)


def max_angle(mesh: QuadMesh) -> float:
    return max((max(quad_angles(mesh.quad_points(k))) for k in range(len(mesh.quads))),
               default=0.0)


def element_count_ratio(mesh: QuadMesh, poly: Polygon) -> float:
    return len(mesh.quads) / poly.n


# ---------------------------------------------------------------- validation

@dataclass
class Validation:
    counts: dict
    area_residual: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "counts": self.counts, "area_residual": self.area_residual,
                "violations": self.violations}


def _edge_on_boundary(poly: Polygon, a, b, eps: float) -> bool:
    for _, c, d in poly.edges():
        if point_segment_distance(a, c, d)[0] <= eps and point_segment_distance(b, c, d)[0] <= eps:
            return True
    return False


def validate(mesh: QuadMesh, poly: Polygon, tol: Tolerances = DEFAULT_TOL) -> Validation:
    """Conformity, counting identities, area coverage and containment."""
    counts = mesh.counts
    viol = []
    eps = tol.eps_rel * poly.diameter
    ec = edge_counts(mesh.quads)
    for (a, b), n in sorted(ec.items()):
        if n > 2:
            viol.append({"check": "conformity", "edge": [a, b], "reason": f"shared by {n} quads"})
        elif n == 1 and not _edge_on_boundary(poly, mesh.vertices[a], mesh.vertices[b], eps):
            viol.append({"check": "conformity", "edge": [a, b], "reason": "unmatched interior edge"})
    x, i, q, e = counts["x"], counts["i"], counts["q"], counts["e"]
    if 4 * q != 2 * e - x:
        viol.append({"check": "edge_count", "reason": f"4q={4 * q} but 2e-x={2 * e - x}"})
    h = len(poly.holes)
    if x + i + q - e != 1 - h:
        viol.append({"check": "euler", "reason": f"x+i+q-e={x + i + q - e}, expected {1 - h}"})
    total = 0.0
    edges = [(c, d) for _, c, d in poly.edges()]
    for k, quad in enumerate(mesh.quads):
        pts = mesh.quad_points(k)
        area = signed_area(pts)
        total += area
        if area <= 0 or not is_simple_quad(pts):
            viol.append({"check": "orientation", "quad": k, "reason": "not simple and counterclockwise"})
        cen = tuple(np.mean(np.array(pts), axis=0))
        if not contains(poly, cen):
            viol.append({"check": "containment", "quad": k, "reason": "centroid outside polygon"})
            continue
        for j in range(4):
            a, b = pts[j], pts[(j + 1) % 4]
            if any(segments_cross_properly(a, b, c, d, tol.eps_rel) for c, d in edges):
                viol.append({"check": "containment", "quad": k, "reason": "edge crosses boundary"})
                break
    res = abs(total - poly.area) / poly.area
    if res > 1e-6:
        viol.append({"check": "area", "reason": f"relative area residual {res:.3g}"})
    return Validation(counts, res, viol)


def quality_report(mesh: QuadMesh, poly: Polygon, tol: Tolerances = DEFAULT_TOL) -> dict:
    ms = [quad_metrics(mesh.quad_points(k), tol) for k in range(len(mesh.quads))]
    v = validate(mesh, poly, tol)
    q = max(len(ms), 1)
    return {
        "q": len(ms),
        "q_over_n": element_count_ratio(mesh, poly),
        "max_angle": max((m.max_angle for m in ms), default=0.0),
        "min_angle": min((m.min_angle for m in ms), default=0.0),
        "kite_fraction": sum(m.is_kite for m in ms) / q,
        "cyclic_fraction": sum(m.is_cyclic for m in ms) / q,
        "right_angle_fraction": sum(m.has_opposite_right_angles for m in ms) / q,
        "max_cross_ratio_error": max((abs(m.cross_ratio - 1) for m in ms), default=0.0),
        "area_residual": v.area_residual,
        "euler": {**v.counts, "h": len(poly.holes)},
        "validation": v.to_json(),
    }
