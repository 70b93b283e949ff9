"""Kite meshes: every element has an axis of symmetry along a diagonal."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .geometry import Circle, GeometryError, Point, Polygon, tangency_point
from .mesh import MeshBuilder, QuadMesh
from .packing import (Gap, GapKind, GapSide, Mode, PackOptions, Packing, repair_bad_gaps,
                      simplify_gap)
from .packing.gaps import gap_site, with_site
from .voronoi import InvalidPackingMode

ASPECT_THRESHOLD = 4.0

KITES_PER_GAP = {
    GapKind.THREE_SIDED: 3,
    GapKind.GOOD_FOUR_SIDED: 4,
    GapKind.BOUNDARY_THREE_SIDED: 2,
    GapKind.CONVEX_VERTEX: 1,
    GapKind.REFLEX_VERTEX: 2,
}


class UnhandledGap(GeometryError):
    pass


class ThresholdNotMet(GeometryError):
    pass


class AspectViolation(GeometryError):
    pass


class UnsupportedGap(GeometryError):
    pass


def gap_kites(g: Gap) -> list[tuple]:
    """One kite per arc: circle center, arc start, gap site, arc end."""
    site = g.center if g.center is not None else gap_site(g)
    return [(s.circle.center, s.start, site, s.end) for s in g.arcs if s.kind == "arc"]


def kite_quads(pk: Packing, repair: bool = True) -> list[tuple]:
    if pk.mode != Mode.BOUNDARY_TANGENT:
        raise InvalidPackingMode("kite meshes need a boundary-tangent packing")
    if repair:
        pk = repair_bad_gaps(pk)
    quads = []
    for gi, g in enumerate(pk.gaps):
        if g.kind not in KITES_PER_GAP:
            raise UnhandledGap(f"gap {gi} of kind {g.kind.value} with "
                               f"{len(g.arcs)} sides has no kite decomposition")
        quads.extend(gap_kites(g))
    return quads


def mesh_kites(pk: Packing, poly: Polygon | None = None, repair: bool = True) -> QuadMesh:
    mb = MeshBuilder()
    for q in kite_quads(pk, repair):
        mb.add(list(q))
    return mb.build(poly if poly is not None else pk.polygon)


def expected_kites(census: dict) -> int:
    """Kite count implied by a gap census (bad gaps count as their two good halves)."""
    total = 0
    for kind, n in census.items():
        k = GapKind(kind)
        total += n * (8 if k == GapKind.BAD_FOUR_SIDED else KITES_PER_GAP.get(k, 0))
    return total


# ---------------------------------------------------------------- boundary gaps

def _arc(circles, i, start, end):
    return GapSide("arc", i, start, end, circle=circles[i])


@dataclass(frozen=True)
class GapMesh:
    quads: tuple
    circles: tuple          # auxiliary circles added
    gaps: tuple             # gaps of the auxiliary arrangement
    boundary_circles: int = 0


def _strip_frame(g: Gap, tol=1e-9):
    kinds = [s.kind for s in g.arcs]
    if len(kinds) != 4 or kinds.count("seg") != 2 or kinds[0] == kinds[1]:
        raise UnsupportedGap("need a gap with two opposite straight sides")
    k = 0 if kinds[0] == "seg" else 1
    L1, B, L2, A = (g.arcs[(k + j) % 4] for j in range(4))
    pA0, pB0, pB1, pA1 = (np.array(p, float) for p in (L1.start, L1.end, L2.start, L2.end))
    D = np.linalg.norm(pB0 - pA0)
    u = (pB0 - pA0) / D
    n = np.array([-u[1], u[0]])
    W = (pA1 - pA0) @ n
    scale = max(D, W)
    if (np.linalg.norm(pA1 - pA0 - W * n) > tol * scale
            or np.linalg.norm(pB1 - pB0 - W * n) > tol * scale
            or abs(A.circle.radius - W / 2) > tol * scale
            or abs(B.circle.radius - W / 2) > tol * scale):
        raise UnsupportedGap("straight sides must be parallel with circles spanning the strip")
    return A, B, pA0, u, n, D, W


def mesh_two_boundary_gap(g: Gap) -> GapMesh:
    """Kites for a long gap between two parallel boundary edges.

    At each end two equal circles centered on the edges meet on the end
    circle; two large circles centered on the edges join them along the
    strip; a small circle fills each end.  The eight circles leave six
    three-sided gaps and one good four-sided gap.
    """
    A, B, o, u, n, D, W = _strip_frame(g)
    if D / W < ASPECT_THRESHOLD:
        raise ThresholdNotMet(f"aspect ratio {D / W:.3g} below {ASPECT_THRESHOLD}")
    to = lambda x, y: Point(*(o + x * u + y * n))  # noqa: E731
    R = D / 2 - W
    half = W / 2

    def s_of(x):
        return math.hypot(x - half, half) - half

    x_s = brentq(lambda x: math.hypot(D / 2 - x, half) - R - s_of(x), half, D / 2, xtol=1e-15 * D)
    s = s_of(x_s)
    c = [Circle(to(half, 0), half), Circle(to(half, W), half),            # P0 P1
         Circle(to(D - half, 0), half), Circle(to(D - half, W), half),    # Q0 Q1
         Circle(to(D / 2, 0), R), Circle(to(D / 2, W), R),                # G0 G1
         Circle(to(x_s, half), s), Circle(to(D - x_s, half), s)]          # S_L S_R
    P0, P1, Q0, Q1, G0, G1, SL, SR = range(8)
    t = lambda i, j: tangency_point(c[i], c[j])  # noqa: E731
    pts = {(P0, P1): to(half, half), (Q0, Q1): to(D - half, half),
           (P0, G0): to(W, 0), (P1, G1): to(W, W),
           (Q0, G0): to(D - W, 0), (Q1, G1): to(D - W, W)}
    for i, j in [(P0, SL), (P1, SL), (G0, SL), (G1, SL), (Q0, SR), (Q1, SR), (G0, SR), (G1, SR)]:
        pts[(i, j)] = t(i, j)
    T = lambda i, j: pts[(i, j)] if (i, j) in pts else pts[(j, i)]  # noqa: E731

    def gap(cyc):
        arcs = tuple(_arc(c, cyc[k], T(cyc[k - 1], cyc[k]), T(cyc[k], cyc[(k + 1) % len(cyc)]))
                     for k in range(len(cyc)))
        kind = GapKind.THREE_SIDED if len(cyc) == 3 else GapKind.GOOD_FOUR_SIDED
        return with_site(Gap(arcs, kind, tuple(a.start for a in arcs)))

    # counterclockwise cycles of circles around each gap
    gaps = [gap((P0, SL, P1)), gap((P0, G0, SL)), gap((P1, SL, G1)),
            gap((Q0, Q1, SR)), gap((Q0, SR, G0)), gap((Q1, G1, SR)),
            gap((SL, G0, SR, G1))]
    quads = [(A.circle.center, to(0, 0), c[P0].center, pts[(P0, P1)]),
             (A.circle.center, pts[(P0, P1)], c[P1].center, to(0, W)),
             (B.circle.center, to(D, W), c[Q1].center, pts[(Q0, Q1)]),
             (B.circle.center, pts[(Q0, Q1)], c[Q0].center, to(D, 0))]
    for gg in gaps:
        quads.extend(gap_kites(gg))
    return GapMesh(tuple(quads), tuple(c), tuple(gaps))


def mesh_one_boundary_gap(g: Gap, opts: PackOptions = PackOptions()) -> GapMesh:
    """Line the boundary side of a gap with tangent circles until only
    three-sided gaps touch the edge, then pack the interior."""
    segs = [s for s in g.arcs if s.kind == "seg"]
    if len(segs) != 1 or len(g.arcs) not in (3, 4):
        raise UnsupportedGap("need a three- or four-sided gap with one straight side")
    a, b = (np.array(p, float) for p in segs[0].edge)
    u = (b - a) / np.linalg.norm(b - a)
    for s in g.arcs:
        if s.kind != "arc":
            continue
        c = s.circle
        off = abs(u[0] * (c.center.y - a[1]) - u[1] * (c.center.x - a[0])) - c.radius
        if 1e-9 * c.radius < off < opts.eps_sep * c.radius * (1 - 1e-9):
            raise AspectViolation("circle closer to the boundary than eps_sep allows")
    if len(g.arcs) == 3:
        gg = with_site(g)
        return GapMesh(tuple(gap_kites(gg)), (), (gg,), 0)
    added, gaps = simplify_gap(g, PackOptions(mode=Mode.BOUNDARY_TANGENT, eps_sep=opts.eps_sep,
                                              tol=opts.tol))
    on_edge = sum(1 for c in added
                  if abs(abs(u[0] * (c.center.y - a[1]) - u[1] * (c.center.x - a[0])) - c.radius)
                  <= 1e-9 * c.radius)
    quads = [q for gg in gaps for q in gap_kites(gg)]
    return GapMesh(tuple(quads), tuple(added), tuple(gaps), on_edge)
