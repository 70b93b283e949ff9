"""Entry points for building and repairing packings."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..geometry import Circle, Point, Polygon, tangency_point
from .builder import (Builder, assemble_packing, centered_radii, chain_margin, inset_member,
                      protect_tangent)
from .gaps import classify_gap, split_gap_children, with_site
from .model import (Degenerate, Gap, GapKind, GapSide, Mode, PackOptions, Packing, Provenance,
                    transform_packing)
from .region import Region, Side


def _scale_of(poly: Polygon) -> float:
    """Power of two bringing the polygon to roughly unit size (exact in floating point)."""
    return 2.0 ** -math.ceil(math.log2(poly.diameter))


def _scaled(poly: Polygon, s: float) -> Polygon:
    sc = lambda loop: tuple(Point(p.x * s, p.y * s) for p in loop)  # noqa: E731
    return Polygon(sc(poly.outer), tuple(sc(h) for h in poly.holes))


def protect_vertices(poly: Polygon, opts: PackOptions = PackOptions()) -> list[Circle]:
    """Protection circles: a tangent pair at each reflex vertex, or one circle
    centered on every vertex."""
    poly.validate()
    if opts.mode == Mode.BOUNDARY_TANGENT:
        pairs = protect_tangent(poly, opts)
        return [c for key in sorted(pairs) for c in pairs[key][:2]]
    radii = centered_radii(poly)
    pts = [p for loop in poly.loops for p in loop]
    return [Circle(p, r) for p, r in zip(pts, radii)]


def replace_boundary_tangent(c: Circle, contact, neighbors=(),
                             opts: PackOptions = PackOptions()) -> list[Circle]:
    """Inset family replacing a circle that touches the boundary at ``contact``.

    Returns the boundary dot, one half-size circle per neighbour tangency
    point in ``neighbors``, and the shrunken concentric circle, in that order.
    """
    eps = opts.eps_inset * c.radius
    return ([inset_member(c, contact, eps, True)]
            + [inset_member(c, t, eps, False) for t in neighbors]
            + [Circle(c.center, c.radius - eps)])


def _start(poly: Polygon, opts: PackOptions) -> tuple[Builder, Region]:
    b = Builder(poly, opts)
    if opts.mode == Mode.BOUNDARY_TANGENT:
        region = b.start_tangent(protect_tangent(poly, opts))
    else:
        region = b.start_centered([0.5 * r for r in centered_radii(poly)])
    return b, region


def connect_holes(poly: Polygon, existing=None, opts: PackOptions = PackOptions()) -> list[Circle]:
    """Circles joining every hole to the outer boundary.

    The protection circles are placed as in :func:`pack`; ``existing`` is
    accepted for symmetry with that pipeline and is not otherwise used.
    """
    poly.validate()
    if not poly.holes:
        return []
    s = _scale_of(poly)
    b, region = _start(_scaled(poly, s), opts)
    n0 = len(b.circles)
    b.connect(region)
    return [Circle(Point(c.center.x / s, c.center.y / s), c.radius / s) for c in b.circles[n0:]]


def _corner(a, b):
    """Meeting point of consecutive region sides ``a`` then ``b``."""
    if isinstance(a, Circle) and isinstance(b, Circle):
        return tangency_point(a, b)
    if isinstance(a, Circle) or isinstance(b, Circle):
        c, (p, q) = (a, b) if isinstance(a, Circle) else (b, a)
        end = p if isinstance(a, Circle) else q
        if abs(math.dist(end, c.center) - c.radius) <= 1e-9 * c.radius:
            return Point(*end)      # the circle crosses the segment at its endpoint
        p, q = np.array(p, float), np.array(q, float)
        u = (q - p) / np.linalg.norm(q - p)
        return Point(*(p + ((np.array(c.center) - p) @ u) * u))
    return Point(*b[0])


def simplify_region(boundary, opts: PackOptions = PackOptions(),
                    gaps: list | None = None) -> list[Circle]:
    """Circles splitting a region into terminal gaps.

    ``boundary`` lists the region's sides counterclockwise: each item is a
    ``Circle`` (the region touches it from outside) or a segment ``(a, b)``
    directed with the region on its left.  Consecutive items meet at tangency
    points or shared segment endpoints.  The resulting gaps are appended to
    ``gaps`` when it is given.
    """
    edges, items = [], []
    for it in boundary:
        if isinstance(it, Circle):
            items.append(("arc", it))
        else:
            items.append(("seg", len(edges)))
            edges.append((Point(*it[0]), Point(*it[1])))
    b = Builder(None, opts, edges=edges, size=len(boundary))
    refs = []
    for kind, it in items:
        refs.append(b.add(it, Provenance.AUXILIARY) if kind == "arc" else it)
    k = len(boundary)
    objs = [it if isinstance(it, Circle) else edges[items[i][1]] for i, it in enumerate(boundary)]
    corners = [_corner(objs[i - 1], objs[i]) for i in range(k)]
    sides = [Side(items[i][0], refs[i], corners[i], corners[(i + 1) % k]) for i in range(k)]
    n0 = len(b.circles)
    b.simplify([Region([sides])])
    if gaps is not None:
        gaps.extend(b.gap_from_loop(loop, v) for loop, v in b.finished)
    return list(b.circles[n0:])


def simplify_gap(g: Gap, opts: PackOptions = PackOptions()) -> tuple[list[Circle], list[Gap]]:
    """Pack circles into one gap; returns the added circles and the resulting gaps.

    Straight sides must carry their boundary edge; circles keep the gap's
    own tangency points as region corners.
    """
    edges = [(Point(*s.edge[0]), Point(*s.edge[1])) for s in g.arcs if s.kind == "seg"]
    b = Builder(None, opts, edges=edges, size=len(g.arcs))
    sides, k = [], 0
    for s in g.arcs:
        if s.kind == "arc":
            sides.append(Side("arc", b.add(s.circle, Provenance.AUXILIARY), s.start, s.end))
        else:
            sides.append(Side("seg", k, s.start, s.end))
            k += 1
    n0 = len(b.circles)
    b.simplify([Region([sides])])
    return list(b.circles[n0:]), [b.gap_from_loop(loop, v) for loop, v in b.finished]


def pack(poly: Polygon, opts: PackOptions = PackOptions()) -> Packing:
    """Pack circles into ``poly`` until every gap has three or four sides."""
    poly.validate()
    s = _scale_of(poly)
    b, region = _start(_scaled(poly, s), opts)
    b.simplify(b.connect(region))
    pk = b.packing()
    out = transform_packing(pk, poly, 1.0 / s, (0.0, 0.0))
    # boundary edges keep the caller's exact coordinates
    edges = [(a, c) for _, a, c in poly.edges()]
    gaps = tuple(replace(g, arcs=tuple(replace(sd, edge=edges[sd.ref]) if sd.kind == "seg" else sd
                                       for sd in g.arcs)) for g in out.gaps)
    return replace(out, gaps=gaps)


# ---------------------------------------------------------------- repair

def _arc(ref, start, end, circles):
    return GapSide("arc", ref, start, end, circle=circles[ref])


def _split_four(g: Gap, circles: list, new_index: int):
    E, i, _, _ = split_gap_children(g)
    circles.append(E)
    arcs = g.arcs
    ia, ib, ic, idd = (arcs[(i + j) % 4] for j in (3, 0, 1, 2))
    tAB, tBC, tCD, tDA = ib.start, ic.start, idd.start, ia.start
    B, D = circles[ib.ref], circles[idd.ref]
    tBE, tED = tangency_point(B, E), tangency_point(E, D)
    first = (_arc(ia.ref, tDA, tAB, circles), _arc(ib.ref, tAB, tBE, circles),
             _arc(new_index, tBE, tED, circles), _arc(idd.ref, tED, tDA, circles))
    second = (_arc(ib.ref, tBE, tBC, circles), _arc(ic.ref, tBC, tCD, circles),
              _arc(idd.ref, tCD, tED, circles), _arc(new_index, tED, tBE, circles))
    kids = []
    for arcs_ in (first, second):
        kid = Gap(arcs_, GapKind.GOOD_FOUR_SIDED, tuple(a.start for a in arcs_))
        kid = replace(kid, kind=classify_gap(kid))
        if kid.kind != GapKind.GOOD_FOUR_SIDED:
            raise Degenerate("split produced a bad gap")
        kids.append(with_site(kid))
    return kids


def _chain_parts(g: Gap):
    k = next(i for i, s in enumerate(g.arcs) if s.kind == "seg")
    return tuple(g.arcs[(k + j) % 4] for j in range(4))


def chain_is_good(g: Gap) -> bool:
    L, Q, M, P = _chain_parts(g)
    return chain_margin(Q.end, M.end, g.center, *L.edge) >= -1e-9


def _split_chain(g: Gap, circles: list, new_index: int):
    """Circle centered on the boundary side, tangent to the middle circle."""
    L, Q, M, P = _chain_parts(g)
    a, b = np.array(L.start, float), np.array(L.end, float)
    length = np.linalg.norm(b - a)
    u = (b - a) / length
    Mc = circles[M.ref]
    Pc, Qc = circles[P.ref], circles[Q.ref]

    def build(t):
        p = a + t * u
        rho = np.linalg.norm(p - Mc.c) - Mc.radius
        if rho <= 0:
            return None
        S = Circle(Point(*p), rho)
        for O in (Pc, Qc):
            if math.dist(S.center, O.center) < (S.radius + O.radius) * (1 + 1e-6):
                return None
        if t - rho <= 0 or t + rho >= length:
            return None
        xin, xout = Point(*(p - rho * u)), Point(*(p + rho * u))
        tSM = tangency_point(S, Mc)
        cs = circles + [S]
        first = (GapSide("seg", L.ref, L.start, xin, edge=L.edge), _arc(new_index, xin, tSM, cs),
                 _arc(M.ref, tSM, M.end, cs), _arc(P.ref, P.start, P.end, cs))
        second = (GapSide("seg", L.ref, xout, L.end, edge=L.edge), _arc(Q.ref, Q.start, Q.end, cs),
                  _arc(M.ref, M.start, tSM, cs), _arc(new_index, tSM, xout, cs))
        kids = []
        for arcs_ in (first, second):
            tang = tuple(arcs_[j].start for j in (2, 3))
            kid = Gap(arcs_, GapKind.BOUNDARY_FOUR_SIDED, tang)
            try:
                kid = with_site(kid)
            except Degenerate:
                return None
            if not 0 < (np.array(kid.center) - a) @ u < length:
                return None
            kids.append(kid)
        margin = min(chain_margin(k.tangency_points[0], k.tangency_points[1], k.center, *L.edge)
                     for k in kids)
        return margin, S, kids

    best = None
    for t in np.linspace(0, length, 201)[1:-1]:
        res = build(t)
        if res is not None and (best is None or res[0] > best[0]):
            best = res
    if best is None or best[0] < -1e-9:
        raise Degenerate("cannot repair boundary gap")
    circles.append(best[1])
    return best[2]


def repair_bad_gaps(pk: Packing) -> Packing:
    """Split bad four-sided gaps (and mirrored-bad boundary gaps) until all are good."""
    circles = list(pk.circles)
    prov = list(pk.provenance)
    centered = {}
    for bc in pk.boundary_contacts:
        if bc.kind.value == "CenteredOn":
            centered.setdefault(bc.circle, set()).add(bc.edge)
    gaps = []
    todo = list(pk.gaps)
    while todo:
        g = todo.pop(0)
        if g.kind == GapKind.BAD_FOUR_SIDED:
            idx = len(circles)
            gaps.extend(_split_four(g, circles, idx))
            prov.append(Provenance.AUXILIARY)
        elif g.kind == GapKind.BOUNDARY_FOUR_SIDED and not chain_is_good(g):
            idx = len(circles)
            L = _chain_parts(g)[0]
            todo[:0] = _split_chain(g, circles, idx)
            prov.append(Provenance.AUXILIARY)
            centered[idx] = {L.ref}
        else:
            gaps.append(g)
    if len(circles) == len(pk.circles):
        return pk
    new = assemble_packing(pk.polygon, pk.mode, circles, prov, tuple(gaps), centered, pk.overlaps)
    return new
