"""Incremental construction of a circle packing inside a polygon."""
from __future__ import annotations

import math

import numpy as np

from ..geometry import Circle, Point, Polygon, interior_angle
from .gaps import classify_gap, hull_margin, line_point_equidistant, reflect, with_site
from .model import (BoundaryContact, ContactKind, Degenerate, Gap, GapKind, GapSide, Mode,
                    Overflow, PackOptions, Packing, Provenance, cw_span)
from .region import (Contact, Geometry, Region, Side, insert_circle, medial_seeds,
                     solve_tangent)

CONTACT = 1e-8      # relative distance under which a circle touches a side
CORNER = 1e-6       # contacts closer than this (relative) to a corner are refused
SEP_CIRCLE = 1e-4   # minimum relative clearance between non-tangent circles
SEP_LINE_CENTERED = 1e-3
MAX_ARC = math.radians(175.0)  # wider arcs would give non-convex cells


def _unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def _left(u):
    return np.array([-u[1], u[0]])


class Builder:
    """Mutable packing state: circles, boundary edges and the uncovered regions."""

    def __init__(self, poly: Polygon | None, opts: PackOptions, edges=None, size=None):
        self.poly = poly
        self.opts = opts
        self.kite = opts.mode == Mode.BOUNDARY_TANGENT
        self.edges = list(edges or [])
        self.edge_ids = []              # per loop, list of global edge indices
        for loop in (poly.loops if poly is not None else ()):
            ids = []
            for k in range(len(loop)):
                ids.append(len(self.edges))
                self.edges.append((loop[k], loop[(k + 1) % len(loop)]))
            self.edge_ids.append(ids)
        self.geo = Geometry(self.edges)
        self.prov: list[Provenance] = []
        self.centered: dict[int, set] = {}
        self.finished: list[tuple] = []     # (loop of sides, vertex or None)
        self.cap = opts.circle_cap(size if size is not None else poly.n)

    # -- bookkeeping ---------------------------------------------------------
    @property
    def circles(self):
        return self.geo.circles

    def add(self, c: Circle, prov: Provenance, centered_on=()) -> int:
        if len(self.circles) >= self.cap:
            raise Overflow(f"more than {self.cap} circles needed")
        self.circles.append(c)
        self.prov.append(prov)
        if centered_on:
            self.centered[len(self.circles) - 1] = set(centered_on)
        return len(self.circles) - 1

    def rollback(self, n: int):
        del self.circles[n:]
        del self.prov[n:]
        for k in [k for k in self.centered if k >= n]:
            del self.centered[k]

    def line_sep(self) -> float:
        return self.opts.eps_sep if self.kite else SEP_LINE_CENTERED

    # -- candidate validation ------------------------------------------------
    def evaluate(self, region: Region, c: Circle, polys=None, allow_lines=None, own_seg=None):
        """Contacts of ``c`` with the region's sides, or None if ``c`` does not fit.

        ``own_seg`` names a straight side the circle is centered on; it yields a
        pair of crossing contacts instead of a tangency.
        """
        if allow_lines is None:
            allow_lines = self.kite
        r = c.radius
        if own_seg is None and not region.contains(self.geo, np.array([c.center]), polys)[0]:
            return None
        contacts = []
        for li, si, s in region.sides:
            if (li, si) == own_seg:
                a, b = np.array(s.start), np.array(s.end)
                u = _unit(b - a)
                p = np.array(c.center)
                t0, t1 = (p - r * u - a) @ u, (p + r * u - a) @ u
                L = np.linalg.norm(b - a)
                if t0 <= CORNER * r or t1 >= L - CORNER * r:
                    return None
                contacts.append(Contact(li, si, Point(*(p - r * u)), "cross_in"))
                contacts.append(Contact(li, si, Point(*(p + r * u)), "cross_out"))
                continue
            d, q, _ = self.geo.closest(s, c.center)
            gap = d - r
            if abs(gap) <= CONTACT * r:
                island = s.full and len(region.loops[li]) == 1
                if not island and min(math.dist(q, s.start), math.dist(q, s.end)) < CORNER * r:
                    return None
                if s.kind == "seg" and not allow_lines:
                    return None
                contacts.append(Contact(li, si, q, "tangent"))
            elif gap < 0:
                return None
            elif gap < (self.line_sep() if s.kind == "seg" else SEP_CIRCLE) * r:
                return None
        return contacts

    def candidates(self, region: Region, site_ok, allow_lines, polys):
        out = []
        seen = set()
        for triple, seed, r0 in medial_seeds(self.geo, region, site_ok, polys=polys):
            c = solve_tangent(self.geo, region, triple, seed, r0)
            if c is None:
                continue
            key = (round(c.center.x, 9), round(c.center.y, 9), round(c.radius, 9))
            if key in seen:
                continue
            seen.add(key)
            contacts = self.evaluate(region, c, polys, allow_lines=allow_lines)
            if contacts is not None and len(contacts) >= 3:
                out.append((c, contacts))
        out.sort(key=lambda cc: (-cc[0].radius, cc[0].center.x, cc[0].center.y))
        return out

    # -- terminal gaps -------------------------------------------------------
    def on_line(self, circle_idx: int, edge: int) -> bool:
        if edge in self.centered.get(circle_idx, ()):
            return True
        a, b = self.edges[edge]
        c = self.circles[circle_idx].center
        u = _unit(np.subtract(b, a))
        off = abs(u[0] * (c[1] - a[1]) - u[1] * (c[0] - a[0]))
        return off <= 1e-12 * max(1.0, self.circles[circle_idx].radius)

    def is_terminal(self, region: Region) -> bool:
        if len(region.loops) != 1:
            return False
        loop = region.loops[0]
        for s in loop:
            if s.kind == "arc" and (s.full or cw_span(self.circles[s.ref].center, s.start, s.end)
                                    > MAX_ARC):
                return False
        n = len(loop)
        nseg = sum(s.kind == "seg" for s in loop)
        if nseg == 0:
            return n in (3, 4)
        if self.kite:
            return n == 3 and nseg in (1, 2)
        if n != 4 or nseg != 1:
            return False
        return self.chain_site(loop) is not None

    def chain_site(self, loop):
        """Site of a boundary four-sided gap [L, Q, M, P] if it is well formed."""
        k = next(i for i, s in enumerate(loop) if s.kind == "seg")
        L, Q, M, P = (loop[(k + j) % 4] for j in range(4))
        if Q.ref == P.ref or not (self.on_line(Q.ref, L.ref) and self.on_line(P.ref, L.ref)):
            return None
        if self.on_line(M.ref, L.ref):
            return None
        try:
            g = line_point_equidistant(L.start, L.end, Q.end, M.end)
        except Degenerate:
            return None
        a, b = np.array(L.start), np.array(L.end)
        length = np.linalg.norm(b - a)
        t = (np.array(g) - a) @ (b - a) / length
        margin = CORNER * length
        if not margin < t < length - margin:
            return None
        return g

    # -- region operations ---------------------------------------------------
    def place(self, region: Region, c: Circle, prov, contacts, centered_on=()):
        idx = self.add(c, prov, centered_on)
        return insert_circle(self.geo, region, idx, contacts)

    def score(self, region, c, contacts):
        n0 = len(self.circles)
        self.circles.append(c)
        try:
            pieces = insert_circle(self.geo, region, n0, contacts)
            open_sizes = [p.n_sides for p in pieces if not self.is_terminal(p)]
        except Exception:
            return None
        finally:
            self.circles.pop()
        return (max(open_sizes, default=0), len(open_sizes), -c.radius)

    def simplify(self, regions):
        stack = list(regions)
        while stack:
            region = stack.pop()
            if self.is_terminal(region):
                self.finished.append((region.loops[0], None))
                continue
            polys = region.polylines(self.geo)
            site_ok = (lambda s: True) if self.kite else (lambda s: s.kind == "arc")
            best = None
            n_sides = region.n_sides
            for c, contacts in self.candidates(region, site_ok, self.kite, polys)[:10]:
                sc = self.score(region, c, contacts)
                if sc is None:
                    continue
                if best is None or sc < best[0]:
                    best = (sc, c, contacts)
            if best is not None and (best[0][0] < n_sides or self.kite):
                stack.extend(self.place(region, best[1], Provenance.SIMPLIFIER, best[2]))
                continue
            if self.kite:
                raise Degenerate("no splitting circle found for a region")
            stack.extend(self.add_dot(region, polys))

    def add_dot(self, region: Region, polys):
        """Boundary-centered circle on the longest straight side of a region."""
        segs = sorted(((self.geo.length(s), li, si) for li, si, s in region.sides
                       if s.kind == "seg"), reverse=True)
        for length, li, si in segs:
            s = region.loops[li][si]
            a, b = np.array(s.start), np.array(s.end)
            p = Point(*((a + b) / 2))
            rho = 0.45 * length
            for lj, sj, o in region.sides:
                if (lj, sj) == (li, si):
                    continue
                d, _, _ = self.geo.closest(o, p)
                if o.kind == "arc" and not self.on_line(o.ref, s.ref):
                    rho = min(rho, d)
                else:
                    rho = min(rho, 0.5 * d)
            for shrink in (1.0, 0.5, 0.25):
                c = Circle(p, rho * shrink)
                contacts = self.evaluate(region, c, polys, own_seg=(li, si))
                if contacts is not None:
                    return self.place(region, c, Provenance.AUXILIARY, contacts,
                                      centered_on=(s.ref,))
        raise Degenerate("no room for a boundary-centered circle")

    # -- holes -----------------------------------------------------------------
    def connect(self, region: Region):
        """Add circles until the region boundary is a single loop."""
        regions = [region]
        out = []
        while regions:
            reg = regions.pop()
            if len(reg.loops) == 1:
                out.append(reg)
                continue
            polys = reg.polylines(self.geo)
            best = None
            for c, contacts in self.candidates(reg, lambda s: True, True, polys):
                if len({ct.loop for ct in contacts}) >= 2:
                    best = (c, contacts)
                    break
            if best is None:
                raise Degenerate("no circle connects the holes")
            c, contacts = best
            if not self.kite and any(reg.loops[ct.loop][ct.side].kind == "seg" for ct in contacts):
                regions.extend(self.replace_connector(reg, c, contacts))
            else:
                regions.extend(self.place(reg, c, Provenance.HOLE_CONNECTOR, contacts))
        return out

    def replace_connector(self, region: Region, c: Circle, contacts):
        """Insert the inset family in place of a connector that touches straight sides."""
        eps = self.opts.eps_inset * c.radius
        n0 = len(self.circles)
        for _ in range(8):
            try:
                return self._insert_family(region, c, contacts, eps)
            except Degenerate:
                self.rollback(n0)
                eps *= 0.5
        raise Degenerate("inset family does not fit")

    def _insert_family(self, region, c, contacts, eps):
        inner = Circle(c.center, c.radius - eps)
        idx = self.add(inner, Provenance.BOUNDARY_REPLACEMENT)
        p0 = inner.point_at(0.0)
        regions = [Region(region.loops + [[Side("arc", idx, p0, p0, full=True)]])]
        for ct in contacts:
            side = region.loops[ct.loop][ct.side]
            on_line = side.kind == "seg"
            member = inset_member(c, ct.point, eps, on_line)
            regions = self._insert_into(regions, member, side if on_line else None)
        return regions

    def _insert_into(self, regions, member: Circle, own: Side | None):
        for k, reg in enumerate(regions):
            key = None
            if own is not None:
                key = next(((li, si) for li, si, s in reg.sides if s == own
                            or (s.kind == "seg" and s.ref == own.ref
                                and self._on_side(s, member.center))), None)
                if key is None:
                    continue
            polys = reg.polylines(self.geo)
            if own is None and not reg.contains(self.geo, np.array([member.center]), polys)[0]:
                continue
            contacts = self.evaluate(reg, member, polys, allow_lines=False, own_seg=key)
            if contacts is None:
                raise Degenerate("inset circle does not fit")
            centered = (own.ref,) if own is not None else ()
            pieces = self.place(reg, member, Provenance.BOUNDARY_REPLACEMENT, contacts, centered)
            return regions[:k] + pieces + regions[k + 1:]
        raise Degenerate("inset circle lies in no region")

    @staticmethod
    def _on_side(s: Side, p) -> bool:
        a, b = np.array(s.start), np.array(s.end)
        t = (np.array(p) - a) @ (b - a) / ((b - a) @ (b - a))
        return 0.0 < t < 1.0

    # -- initial regions ---------------------------------------------------------
    def start_centered(self, radii):
        """Vertex circles centered on every vertex; the region between them."""
        loops = []
        vid = 0
        for li, loop in enumerate(self.poly.loops):
            m = len(loop)
            ids = self.edge_ids[li]
            idx, xin, xout = [], [], []
            for k in range(m):
                v = np.array(loop[k])
                u_in = _unit(v - np.array(loop[k - 1]))
                u_out = _unit(np.array(loop[(k + 1) % m]) - v)
                rho = radii[vid + k]
                idx.append(self.add(Circle(loop[k], rho), Provenance.VERTEX_PROTECTION,
                                    centered_on=(ids[k - 1], ids[k])))
                xin.append(Point(*(v - rho * u_in)))
                xout.append(Point(*(v + rho * u_out)))
            vid += m
            sides = []
            for k in range(m):
                sides.append(Side("arc", idx[k], xin[k], xout[k]))
                sides.append(Side("seg", ids[k], xout[k], xin[(k + 1) % m]))
            loops.append(sides)
        return Region(loops)

    def start_tangent(self, protections):
        """Boundary loops with the reflex-vertex circle pairs cut out."""
        loops = []
        for li, loop in enumerate(self.poly.loops):
            m = len(loop)
            ids = self.edge_ids[li]
            prot = {}
            for k in range(m):
                pr = protections.get((li, k))
                if pr is None:
                    continue
                A, B, pA, pB, t = pr
                ia = self.add(A, Provenance.VERTEX_PROTECTION)
                ib = self.add(B, Provenance.VERTEX_PROTECTION)
                prot[k] = (ia, ib, pA, pB, t)
                rv = [Side("seg", ids[k - 1], pA, loop[k]), Side("seg", ids[k], loop[k], pB),
                      Side("arc", ib, pB, t), Side("arc", ia, t, pA)]
                self.finished.append((rv, loop[k]))
            sides = []
            cursor = prot[0][3] if 0 in prot else loop[0]
            for j in range(1, m + 1):
                k = j % m
                if k in prot:
                    ia, ib, pA, pB, t = prot[k]
                    sides.append(Side("seg", ids[k - 1], cursor, pA))
                    sides.append(Side("arc", ia, pA, t))
                    sides.append(Side("arc", ib, t, pB))
                    cursor = pB
                else:
                    sides.append(Side("seg", ids[k - 1], cursor, loop[k]))
                    cursor = loop[k]
            loops.append(sides)
        return Region(loops)

    # -- output ----------------------------------------------------------------
    def gap_from_loop(self, loop, vertex) -> Gap:
        sides = []
        for s in loop:
            if s.kind == "arc":
                sides.append(GapSide("arc", s.ref, s.start, s.end, circle=self.circles[s.ref]))
            else:
                sides.append(GapSide("seg", s.ref, s.start, s.end, edge=self.edges[s.ref]))
        n = len(loop)
        tang = []
        for i in range(n):
            a, b = loop[i - 1], loop[i]
            if a.kind == "arc" and b.kind == "arc":
                tang.append(b.start)
            elif self.kite and a.kind != b.kind:
                tang.append(b.start)
        if vertex is None and self.kite and sum(s.kind == "seg" for s in loop) == 2:
            vertex = next(loop[i].start for i in range(n)
                          if loop[i].kind == "seg" and loop[i - 1].kind == "seg")
        g = Gap(tuple(sides), GapKind.THREE_SIDED, tuple(tang), vertex=vertex)
        return with_site(_reclassify(g))

    def packing(self) -> Packing:
        gaps = tuple(self.gap_from_loop(loop, v) for loop, v in self.finished)
        return assemble_packing(self.poly, self.opts.mode, self.circles, self.prov,
                                gaps, self.centered)


def inset_member(c: Circle, contact, eps: float, on_line: bool) -> Circle:
    """Inset family member for one contact of ``c``: a dot of radius eps centered
    on a boundary contact, or a circle of radius eps/2 touching ``c`` from inside
    at a circle contact."""
    if on_line:
        return Circle(Point(*contact), eps)
    t = np.array(contact, float)
    w = _unit(t - np.array(c.center))
    return Circle(Point(*(t - 0.5 * eps * w)), 0.5 * eps)


def _reclassify(g: Gap) -> Gap:
    from dataclasses import replace
    return replace(g, kind=classify_gap(g))


def assemble_packing(poly, mode, circles, prov, gaps, centered, overlaps=()) -> Packing:
    tangencies = {}
    contacts = {}
    for g in gaps:
        n = len(g.arcs)
        for i in range(n):
            a, b = g.arcs[i - 1], g.arcs[i]
            if a.kind == "arc" and b.kind == "arc":
                key = tuple(sorted((a.ref, b.ref)))
                tangencies.setdefault(key, b.start)
            elif mode == Mode.BOUNDARY_TANGENT and a.kind != b.kind:
                arc, seg = (a, b) if a.kind == "arc" else (b, a)
                contacts.setdefault((arc.ref, seg.ref),
                                    BoundaryContact(arc.ref, seg.ref, ContactKind.TANGENT_TO, b.start))
    for ci, edges in centered.items():
        for e in sorted(edges):
            contacts[(ci, e)] = BoundaryContact(ci, e, ContactKind.CENTERED_ON, circles[ci].center)
    return Packing(
        polygon=poly, mode=mode, circles=tuple(circles), provenance=tuple(prov),
        tangencies=tuple(sorted(tangencies.items())),
        boundary_contacts=tuple(contacts[k] for k in sorted(contacts)),
        gaps=gaps, overlaps=tuple(overlaps))


# ---------------------------------------------------------------- protection

def reflex_vertices(poly: Polygon):
    for li, loop in enumerate(poly.loops):
        m = len(loop)
        for k in range(m):
            if interior_angle(loop[k - 1], loop[k], loop[(k + 1) % m]) > math.pi:
                yield li, k


def _edge_clearance(poly: Polygon, c: Circle, skip) -> float:
    best = math.inf
    for ei, (_, a, b) in enumerate(poly.edges()):
        if ei in skip:
            continue
        a, b, p = np.array(a), np.array(b), np.array(c.center)
        ab = b - a
        t = np.clip((p - a) @ ab / (ab @ ab), 0, 1)
        best = min(best, np.linalg.norm(p - a - t * ab) - c.radius)
    return best


def reflex_pair(v, prev, nxt, d):
    """Two equal circles tangent to the edges at distance d from a reflex vertex
    and tangent to each other."""
    v = np.array(v, float)
    u1 = _unit(v - np.array(prev))
    u2 = _unit(np.array(nxt) - v)
    n1, n2 = _left(u1), _left(u2)
    s, m = u1 + u2, n1 - n2
    qa = m @ m - 4.0
    qb = -2.0 * d * (s @ m)
    qc = d * d * (s @ s)
    if abs(qa) < 1e-14:
        roots = [-qc / qb] if qb != 0 else []
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            return None
        sq = math.sqrt(disc)
        roots = [(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)]
    roots = sorted(r for r in roots if r > 0)
    if not roots:
        return None
    r = roots[0]
    pA, pB = v - d * u1, v + d * u2
    A = Circle(Point(*(pA + r * n1)), r)
    B = Circle(Point(*(pB + r * n2)), r)
    t = Point(*((A.c + B.c) / 2))
    return A, B, Point(*pA), Point(*pB), t


def protect_tangent(poly: Polygon, opts: PackOptions):
    """Circle pairs for every reflex vertex, keyed by (loop, vertex)."""
    out = {}
    placed = []
    offsets = np.cumsum([0] + [len(loop) for loop in poly.loops])
    for li, k in reflex_vertices(poly):
        loop = poly.loops[li]
        m = len(loop)
        prev, v, nxt = loop[k - 1], loop[k], loop[(k + 1) % m]
        d = 0.25 * min(math.dist(prev, v), math.dist(v, nxt))
        e_in, e_out = offsets[li] + (k - 1) % m, offsets[li] + k
        for _ in range(60):
            pr = reflex_pair(v, prev, nxt, d)
            if pr is not None:
                A, B = pr[0], pr[1]
                ok = all(_edge_clearance(poly, C, {e_in if C is A else e_out})
                         >= opts.eps_sep * C.radius for C in (A, B))
                ok = ok and all(_edge_clearance(poly, C, {e_in, e_out}) >= opts.eps_sep * C.radius
                                for C in (A, B))
                ok = ok and all(math.dist(C.center, P.center) >= (C.radius + P.radius) * (1 + opts.eps_sep)
                                for C in (A, B) for P in placed)
                if ok:
                    out[(li, k)] = pr
                    placed.extend([A, B])
                    break
            d *= 0.5
        else:
            raise Degenerate("cannot protect reflex vertex")
    return out


def centered_radii(poly: Polygon):
    """Half the minimum vertex distance, clipped by each vertex's distance to
    non-adjacent edges."""
    pts = [p for loop in poly.loops for p in loop]
    dmin = min(math.dist(pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts)))
    radii = []
    edges = list(poly.edges())
    offsets = np.cumsum([0] + [len(loop) for loop in poly.loops])
    for li, loop in enumerate(poly.loops):
        m = len(loop)
        for k in range(m):
            adj = {offsets[li] + (k - 1) % m, offsets[li] + k}
            r = 0.5 * dmin
            for ei, (_, a, b) in enumerate(edges):
                if ei in adj:
                    continue
                a_, b_, p = np.array(a), np.array(b), np.array(loop[k])
                ab = b_ - a_
                t = np.clip((p - a_) @ ab / (ab @ ab), 0, 1)
                r = min(r, 0.5 * float(np.linalg.norm(p - a_ - t * ab)))
            radii.append(r)
    return radii


def reflect_point(p, a, b) -> Point:
    return Point(*reflect(p, a, b))


def chain_margin(t1, t2, g, a, b) -> float:
    """Relative hull margin of a boundary four-sided gap's site after mirroring."""
    pts = (t1, t2, reflect_point(t2, a, b), reflect_point(t1, a, b))
    return hull_margin(pts, g) / math.dist(g, t1)
