"""Regions of the domain left uncovered by the circles placed so far.

A region is a list of boundary loops; each loop is a cyclic list of sides
(arcs of packing circles or pieces of polygon edges) walked with the region
on the left.  Inserting a circle that touches some of the sides re-traces
the loops into the boundaries of the pieces the circle leaves behind.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Voronoi, cKDTree

from ..geometry import Circle, Point, _polish_circle, point_segment_distance, signed_area
from .model import PackingError, angle_of, arc_points, cw_span


@dataclass(frozen=True)
class Side:
    kind: str          # "arc" | "seg"
    ref: int           # circle index | edge index
    start: Point
    end: Point
    full: bool = False


@dataclass(frozen=True)
class Contact:
    loop: int
    side: int
    point: Point
    kind: str          # "tangent" | "cross_in" | "cross_out"


ENTRY = ("tangent", "cross_in")
EXIT = ("tangent", "cross_out")


class Geometry:
    """Lookup of circles and boundary edges referenced by sides."""

    def __init__(self, edges, circles=None):
        self.edges = list(edges)          # list of (a: Point, b: Point)
        self.circles = list(circles or [])

    # -- measurements ------------------------------------------------------
    def length(self, s: Side) -> float:
        if s.kind == "seg":
            return math.dist(s.start, s.end)
        c = self.circles[s.ref]
        return c.radius * cw_span(c.center, s.start, s.end, s.full)

    def samples(self, s: Side, count: int, ends: bool = False) -> np.ndarray:
        t0, t1 = (0.0, 1.0) if ends else (0.5 / count, 1.0 - 0.5 / count)
        t = np.linspace(t0, t1, count)
        if s.kind == "seg":
            a, b = np.array(s.start), np.array(s.end)
            return a + t[:, None] * (b - a)
        c = self.circles[s.ref]
        a0 = angle_of(c.center, s.start)
        span = cw_span(c.center, s.start, s.end, s.full)
        ang = a0 - span * t
        return np.column_stack([c.center.x + c.radius * np.cos(ang),
                                c.center.y + c.radius * np.sin(ang)])

    def closest(self, s: Side, p) -> tuple[float, Point, float]:
        """Signed distance from p to the side, closest point, parameter in [0, 1].

        For arcs the distance is negative when p lies inside the circle.
        """
        if s.kind == "seg":
            d, q, t = point_segment_distance(p, s.start, s.end)
            return d, Point(*q), t
        c = self.circles[s.ref]
        span = cw_span(c.center, s.start, s.end, s.full)
        dc = math.dist(p, c.center)
        if dc > 0:
            q = Point(c.center.x + c.radius * (p[0] - c.center.x) / dc,
                      c.center.y + c.radius * (p[1] - c.center.y) / dc)
            off = cw_span(c.center, s.start, q) if not s.full else 0.0
            if s.full or off <= span:
                return dc - c.radius, q, (off / span if span > 0 else 0.0)
        ds, de = math.dist(p, s.start), math.dist(p, s.end)
        return (ds, s.start, 0.0) if ds <= de else (de, s.end, 1.0)

    def param(self, s: Side, p) -> float:
        if s.kind == "seg":
            a, b = np.array(s.start), np.array(s.end)
            ab = b - a
            return float((np.array(p) - a) @ ab / (ab @ ab))
        c = self.circles[s.ref]
        span = cw_span(c.center, s.start, s.end, s.full)
        return cw_span(c.center, s.start, p) / span

    def site(self, s: Side):
        if s.kind == "arc":
            c = self.circles[s.ref]
            return ("circle", c.center.x, c.center.y, c.radius)
        a, b = self.edges[s.ref]
        d = np.array(b) - np.array(a)
        d /= np.linalg.norm(d)
        return ("line", a[0], a[1], -d[1], d[0])

    # -- polygons approximating loops -----------------------------------------
    def loop_polyline(self, loop, per_radian: float = 24.0) -> np.ndarray:
        pts = []
        for s in loop:
            if s.kind == "seg":
                pts.append(np.array([s.start]))
            else:
                c = self.circles[s.ref]
                span = cw_span(c.center, s.start, s.end, s.full)
                k = max(3, int(span * per_radian))
                pts.append(arc_points(c, s.start, s.end, k + 1, s.full)[:-1])
        return np.vstack(pts)


def points_in_polygon(poly: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Vectorised even-odd test of many points against one closed polyline."""
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    x1, y1 = poly[:, 0][None, :], poly[:, 1][None, :]
    x2, y2 = np.roll(poly[:, 0], -1)[None, :], np.roll(poly[:, 1], -1)[None, :]
    cond = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hits = cond & (xc > x)
    return (hits.sum(axis=1) % 2) == 1


class Region:
    """Loops bounding one connected uncovered piece of the domain."""

    def __init__(self, loops):
        self.loops = [list(loop) for loop in loops]

    @property
    def sides(self):
        for li, loop in enumerate(self.loops):
            for si, s in enumerate(loop):
                yield li, si, s

    @property
    def n_sides(self) -> int:
        return sum(len(loop) for loop in self.loops)

    def polylines(self, geo: Geometry):
        return [geo.loop_polyline(loop) for loop in self.loops]

    def contains(self, geo: Geometry, pts: np.ndarray, polys=None) -> np.ndarray:
        polys = polys if polys is not None else self.polylines(geo)
        inside = np.zeros(len(pts), dtype=bool)
        for poly in polys:
            inside ^= points_in_polygon(poly, pts)
        return inside


# ---------------------------------------------------------------- insertion

def insert_circle(geo: Geometry, region: Region, new: int, contacts: list[Contact]) -> list[Region]:
    """Split ``region`` by circle ``new`` touching the given sides.

    Walking the boundary, every contact switches from the region's loop onto
    the new circle (clockwise around it) until the next contact, and back.
    Loops the circle does not touch are handed to whichever piece contains
    them.
    """
    circle = geo.circles[new]
    by_side: dict = {}
    for ci, c in enumerate(contacts):
        by_side.setdefault((c.loop, c.side), []).append(ci)

    # expand loops into sides and contact markers
    items: dict = {}
    where: dict = {}
    for li in {c.loop for c in contacts}:
        seq = []
        for si, s in enumerate(region.loops[li]):
            cids = by_side.get((li, si))
            if not cids:
                seq.append(s)
                continue
            cids = sorted(cids, key=lambda ci: geo.param(s, contacts[ci].point))
            if s.full and len(region.loops[li]) == 1:
                for k, ci in enumerate(cids):
                    nxt = contacts[cids[(k + 1) % len(cids)]].point
                    seq.append(("mark", ci))
                    seq.append(Side(s.kind, s.ref, contacts[ci].point, nxt, full=len(cids) == 1))
                continue
            cur = s.start
            for ci in cids:
                seq.append(Side(s.kind, s.ref, cur, contacts[ci].point))
                seq.append(("mark", ci))
                cur = contacts[ci].point
            seq.append(Side(s.kind, s.ref, cur, s.end))
        items[li] = seq
        for k, it in enumerate(seq):
            if isinstance(it, tuple):
                where[it[1]] = (li, k)

    order = sorted(range(len(contacts)),
                   key=lambda ci: -angle_of(circle.center, contacts[ci].point))
    rank = {ci: k for k, ci in enumerate(order)}

    def next_exit(ci):
        m = len(order)
        for step in range(1, m + 1):
            cj = order[(rank[ci] + step) % m]
            if contacts[cj].kind in EXIT:
                return cj
        raise PackingError("no exit contact on inserted circle")

    faces = []
    used = set()
    for e0 in range(len(contacts)):
        if contacts[e0].kind not in ENTRY or e0 in used:
            continue
        face = []
        cur = e0
        for _guard in range(4 * (len(contacts) + sum(len(v) for v in items.values())) + 8):
            used.add(cur)
            x = next_exit(cur)
            face.append(Side("arc", new, contacts[cur].point, contacts[x].point, full=(x == cur)))
            li, k = where[x]
            seq = items[li]
            j = k + 1
            while True:
                it = seq[j % len(seq)]
                if isinstance(it, tuple):
                    break
                face.append(it)
                j += 1
            cur = it[1]
            if contacts[cur].kind not in ENTRY:
                raise PackingError("inconsistent contact order during face tracing")
            if cur == e0:
                break
        else:
            raise PackingError("face tracing did not close")
        faces.append([s for s in face if s.full or s.start != s.end])

    untouched = [loop for li, loop in enumerate(region.loops) if li not in items]
    return assemble(geo, faces + untouched)


def assemble(geo: Geometry, loops) -> list[Region]:
    """Group loops into regions: counterclockwise loops are outer boundaries."""
    polys = [geo.loop_polyline(loop) for loop in loops]
    areas = [signed_area(p) for p in polys]
    outers = [k for k, a in enumerate(areas) if a > 0]
    holes = [k for k, a in enumerate(areas) if a <= 0]
    groups = {k: [k] for k in outers}
    for h in holes:
        probe = polys[h][:1]
        best = None
        for o in outers:
            if points_in_polygon(polys[o], probe)[0] and (best is None or areas[o] < areas[best]):
                best = o
        if best is None:
            raise PackingError("hole loop not enclosed by any piece")
        groups[best].append(h)
    return [Region([loops[k] for k in groups[o]]) for o in outers]


# ---------------------------------------------------------------- candidates

@dataclass
class Candidate:
    circle: Circle
    contacts: list
    sites: tuple


def medial_seeds(geo: Geometry, region: Region, site_ok, target: int = 700,
                 polys=None) -> list[tuple]:
    """Approximate vertices of the region's medial axis.

    Sites are sampled densely; Voronoi vertices of the samples that fall inside
    the region and have samples from three different sides as nearest
    neighbours approximate points equidistant from three sides.
    Returns ``(side keys, seed center, seed radius)`` per distinct triple.
    """
    keys, lens = [], []
    for li, si, s in region.sides:
        if site_ok(s):
            keys.append((li, si))
            lens.append(geo.length(s))
    if len(keys) < 3:
        return []
    total = sum(lens)
    spacing = total / target
    pts, labels = [], []
    for lab, ((li, si), L) in enumerate(zip(keys, lens)):
        cnt = int(min(200, max(8, math.ceil(L / spacing))))
        pts.append(geo.samples(region.loops[li][si], cnt))
        labels.append(np.full(cnt, lab))
    pts = np.vstack(pts)
    labels = np.concatenate(labels)
    try:
        vor = Voronoi(pts)
    except Exception:
        return []
    verts = vor.vertices
    if len(verts) == 0:
        return []
    polys = polys if polys is not None else region.polylines(geo)
    inside = region.contains(geo, verts, polys)
    verts = verts[inside]
    if len(verts) == 0:
        return []
    tree = cKDTree(pts)
    k = min(12, len(pts))
    d, idx = tree.query(verts, k=k)
    local = np.maximum(spacing, 1e-12)
    seeds: dict = {}
    for v, dd, ii in zip(verts, d, idx):
        d0 = dd[0]
        found = []
        for dj, ij in zip(dd, ii):
            if dj > d0 + 1.5 * local + 0.02 * d0:
                break
            lab = labels[ij]
            if lab not in found:
                found.append(lab)
        if len(found) < 3:
            continue
        triple = tuple(sorted(keys[f] for f in found[:3]))
        prev = seeds.get(triple)
        if prev is None or d0 > prev[1]:
            seeds[triple] = (v, d0)
    return [(t, v, r) for t, (v, r) in seeds.items()]


def solve_tangent(geo: Geometry, region: Region, triple, seed, r0):
    sites = [geo.site(region.loops[li][si]) for li, si in triple]
    sol = _polish_circle(sites, seed[0], seed[1], r0, iters=40)
    if sol is None:
        return None
    res = 0.0
    for s in sites:
        if s[0] == "circle":
            res = max(res, abs(math.hypot(sol[0] - s[1], sol[1] - s[2]) - sol[2] - s[3]))
        else:
            res = max(res, abs((sol[0] - s[1]) * s[3] + (sol[1] - s[2]) * s[4] - sol[2]))
    if res > 1e-10 * max(sol[2], 1e-300) + 1e-14:
        return None
    return Circle(Point(sol[0], sol[1]), sol[2])
