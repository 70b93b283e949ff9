"""Value types describing a circle packing and its gaps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..geometry import Circle, Point, Tolerances, DEFAULT_TOL, GeometryError


class PackingError(GeometryError):
    pass


class Overflow(PackingError):
    """More circles were requested than ``max_circles`` allows."""


class Degenerate(PackingError):
    pass


class CocircularityViolation(PackingError):
    pass


class Mode(str, Enum):
    BOUNDARY_TANGENT = "BoundaryTangent"
    BOUNDARY_CENTERED = "BoundaryCentered"


class Provenance(str, Enum):
    VERTEX_PROTECTION = "VertexProtection"
    HOLE_CONNECTOR = "HoleConnector"
    SIMPLIFIER = "Simplifier"
    BOUNDARY_REPLACEMENT = "BoundaryReplacement"
    AUXILIARY = "Auxiliary"


class ContactKind(str, Enum):
    CENTERED_ON = "CenteredOn"
    TANGENT_TO = "TangentTo"
    IGNORED_CROSSING = "IgnoredCrossing"


class GapKind(str, Enum):
    THREE_SIDED = "ThreeSided"
    GOOD_FOUR_SIDED = "GoodFourSided"
    BAD_FOUR_SIDED = "BadFourSided"
    BOUNDARY_FOUR_SIDED = "BoundaryFourSided"
    BOUNDARY_THREE_SIDED = "BoundaryThreeSided"
    REFLEX_VERTEX = "ReflexVertexGap"
    CONVEX_VERTEX = "ConvexVertexGap"


@dataclass(frozen=True)
class PackOptions:
    mode: Mode = Mode.BOUNDARY_TANGENT
    eps_sep: float = 0.05
    eps_inset: float = 0.25
    max_circles: int | None = None
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0.0 < self.eps_sep < 1.0:
            raise ValueError("eps_sep must lie in (0, 1)")
        if not 0.0 < self.eps_inset < 0.5:
            raise ValueError("eps_inset must lie in (0, 0.5)")

    def circle_cap(self, n: int) -> int:
        return self.max_circles if self.max_circles is not None else 100 * n


@dataclass(frozen=True)
class GapSide:
    """One side of a gap: an arc of a packing circle or a piece of a boundary edge.

    Arcs run clockwise around the circle center from ``start`` to ``end`` so
    the gap lies on the left of the walk.
    """
    kind: str                      # "arc" or "seg"
    ref: int                       # circle index or boundary edge index
    start: Point
    end: Point
    circle: Circle | None = None
    edge: tuple | None = None      # (a, b) endpoints of the full boundary edge


@dataclass(frozen=True)
class Gap:
    arcs: tuple
    kind: GapKind
    tangency_points: tuple
    center: Point | None = None    # the gap's site, used by the meshers
    vertex: Point | None = None    # polygon vertex at a two-edge corner

    @property
    def circles(self) -> tuple:
        return tuple(s.circle for s in self.arcs if s.kind == "arc")

    @property
    def corners(self) -> tuple:
        return tuple(s.start for s in self.arcs)

    @property
    def all_arcs(self) -> bool:
        return all(s.kind == "arc" for s in self.arcs)

    @classmethod
    def from_circles(cls, circles, kind: GapKind | None = None) -> "Gap":
        """Gap bounded by a counterclockwise cycle of pairwise tangent circles."""
        from ..geometry import tangency_point
        k = len(circles)
        pts = [tangency_point(circles[i], circles[(i + 1) % k]) for i in range(k)]
        arcs = tuple(GapSide("arc", i, pts[i - 1], pts[i], circle=circles[i]) for i in range(k))
        g = cls(arcs, kind or GapKind.THREE_SIDED, tuple(pts))
        if kind is None:
            from .gaps import classify_gap
            g = replace(g, kind=classify_gap(g))
        return g


@dataclass(frozen=True)
class BoundaryContact:
    circle: int
    edge: int
    kind: ContactKind
    point: Point


@dataclass(frozen=True)
class Packing:
    polygon: object
    mode: Mode
    circles: tuple
    provenance: tuple
    tangencies: tuple              # ((i, j), Point)
    boundary_contacts: tuple
    gaps: tuple
    overlaps: tuple = ()           # circle index pairs allowed to overlap

    @property
    def gap_census(self) -> dict:
        out: dict = {}
        for g in self.gaps:
            out[g.kind.value] = out.get(g.kind.value, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "circles": [
                {"center": list(c.center), "radius": c.radius, "provenance": p.value}
                for c, p in zip(self.circles, self.provenance)
            ],
            "tangencies": [{"circles": list(ij), "point": list(p)} for ij, p in self.tangencies],
            "boundary_contacts": [
                {"circle": b.circle, "edge": b.edge, "kind": b.kind.value, "point": list(b.point)}
                for b in self.boundary_contacts
            ],
            "gaps": [
                {"kind": g.kind.value,
                 "sides": [{"kind": s.kind, "ref": s.ref} for s in g.arcs],
                 "tangency_points": [list(p) for p in g.tangency_points],
                 "center": None if g.center is None else list(g.center)}
                for g in self.gaps
            ],
            "census": self.gap_census,
            "overlaps": [list(p) for p in self.overlaps],
        }


def transform_point(p, scale: float, offset) -> Point:
    return Point(p[0] * scale + offset[0], p[1] * scale + offset[1])


def transform_packing(pk: Packing, polygon, scale: float, offset) -> Packing:
    """Apply ``x -> scale * x + offset`` to every coordinate in a packing."""
    tp = lambda p: None if p is None else transform_point(p, scale, offset)  # noqa: E731
    circles = tuple(Circle(tp(c.center), c.radius * scale) for c in pk.circles)

    def side(s: GapSide) -> GapSide:
        return replace(
            s, start=tp(s.start), end=tp(s.end),
            circle=None if s.circle is None else circles[s.ref],
            edge=None if s.edge is None else (tp(s.edge[0]), tp(s.edge[1])))

    gaps = tuple(
        replace(g, arcs=tuple(side(s) for s in g.arcs),
                tangency_points=tuple(tp(p) for p in g.tangency_points),
                center=tp(g.center), vertex=tp(g.vertex))
        for g in pk.gaps)
    return replace(
        pk, polygon=polygon, circles=circles,
        tangencies=tuple((ij, tp(p)) for ij, p in pk.tangencies),
        boundary_contacts=tuple(replace(b, point=tp(b.point)) for b in pk.boundary_contacts),
        gaps=gaps)


def angle_of(center, p) -> float:
    return math.atan2(p[1] - center[1], p[0] - center[0])


def cw_span(center, start, end, full: bool = False) -> float:
    """Clockwise angle swept from ``start`` to ``end`` around ``center``."""
    if full:
        return 2.0 * math.pi
    s = (angle_of(center, start) - angle_of(center, end)) % (2.0 * math.pi)
    return s


def arc_points(circle: Circle, start, end, count: int, full: bool = False) -> np.ndarray:
    a0 = angle_of(circle.center, start)
    span = cw_span(circle.center, start, end, full)
    t = a0 - span * np.linspace(0.0, 1.0, count)
    return np.column_stack([circle.center.x + circle.radius * np.cos(t),
                            circle.center.y + circle.radius * np.sin(t)])
