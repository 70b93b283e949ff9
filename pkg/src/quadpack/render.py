"""Static SVG (and optional PNG) pictures of packings and meshes."""
from __future__ import annotations

import math
from pathlib import Path

from .geometry import Circle, Polygon
from .io import IoError
from .mesh import QuadMesh
from .packing import Packing

COLORS = {
    "VertexProtection": "#d62728",
    "HoleConnector": "#9467bd",
    "Simplifier": "#1f77b4",
    "BoundaryReplacement": "#ff7f0e",
    "Auxiliary": "#2ca02c",
}
WIDTH = 800
PAD = 10


def _fmt(v: float) -> str:
    return repr(round(float(v), 9))


class _Canvas:
    """Maps model coordinates (y up) into a fixed-width SVG viewport (y down)."""

    def __init__(self, poly: Polygon):
        xs = [p.x for loop in poly.loops for p in loop]
        ys = [p.y for loop in poly.loops for p in loop]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, self.y1 - min(ys)) or 1.0
        self.s = (WIDTH - 2 * PAD) / span
        self.w = (max(xs) - self.x0) * self.s + 2 * PAD
        self.h = (self.y1 - min(ys)) * self.s + 2 * PAD
        self.layers: list[tuple[str, list[str]]] = []

    def pt(self, p) -> tuple[float, float]:
        return (p[0] - self.x0) * self.s + PAD, (self.y1 - p[1]) * self.s + PAD

    def xy(self, p) -> str:
        x, y = self.pt(p)
        return f"{_fmt(x)},{_fmt(y)}"

    def r(self, r: float) -> str:
        return _fmt(r * self.s)

    def layer(self, name: str, items: list[str]):
        self.layers.append((name, items))

    def circle_path(self, c: Circle) -> str:
        # two half arcs; drawn as a path so circle elements stay reserved for packed disks
        left, right = (c.center.x - c.radius, c.center.y), (c.center.x + c.radius, c.center.y)
        r = self.r(c.radius)
        return f"M{self.xy(left)}A{r},{r} 0 1 0 {self.xy(right)}A{r},{r} 0 1 0 {self.xy(left)}Z"

    def svg(self) -> str:
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.w)}" '
               f'height="{_fmt(self.h)}" viewBox="0 0 {_fmt(self.w)} {_fmt(self.h)}">']
        for name, items in self.layers:
            out.append(f'<g id="{name}">')
            out.extend(items)
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _domain(cv: _Canvas, poly: Polygon):
    cv.layer("domain", [f'<polygon points="{" ".join(cv.xy(p) for p in loop)}" '
                        f'fill="none" stroke="black" stroke-width="1.5"/>' for loop in poly.loops])


def _marker(cv: _Canvas, p) -> str:
    x, y = cv.pt(p)
    return f'<rect x="{_fmt(x - 1.5)}" y="{_fmt(y - 1.5)}" width="3" height="3" fill="black"/>'


def packing_svg(pk: Packing) -> str:
    """Domain, one circle element per packed circle, tangency points and dashed gap circles."""
    cv = _Canvas(pk.polygon)
    _domain(cv, pk.polygon)
    disks = []
    for c, p in zip(pk.circles, pk.provenance):
        x, y = cv.pt(c.center)
        disks.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{cv.r(c.radius)}" '
                     f'fill="none" stroke="{COLORS[p.value]}"/>')
    cv.layer("circles", disks)
    cv.layer("tangencies", [_marker(cv, p) for _, p in pk.tangencies])
    gaps = []
    for g in pk.gaps:
        if g.center is None or not g.tangency_points:
            continue
        c = Circle(g.center, math.dist(g.center, g.tangency_points[0]))
        gaps.append(f'<path d="{cv.circle_path(c)}" fill="none" stroke="gray" '
                    f'stroke-dasharray="4,3"/>')
    cv.layer("gap-circles", gaps)
    return cv.svg()


def mesh_svg(mesh: QuadMesh, poly: Polygon, circles=()) -> str:
    """Domain, one path per quad, and one path per supplied circle."""
    cv = _Canvas(poly)
    _domain(cv, poly)
    cv.layer("circles", [f'<path d="{cv.circle_path(c)}" fill="none" stroke="#1f77b4" '
                         f'stroke-opacity="0.5"/>' for c in circles])
    cv.layer("mesh", [
        f'<path d="M{"L".join(cv.xy(mesh.vertices[v]) for v in q)}Z" fill="none" '
        f'stroke="black" stroke-width="0.6"/>' for q in mesh.quads])
    return cv.svg()


def render_svg(obj, path, poly: Polygon | None = None, circles=()) -> None:
    if isinstance(obj, Packing):
        text = packing_svg(obj)
    else:
        if poly is None:
            raise ValueError("rendering a mesh needs its polygon")
        text = mesh_svg(obj, poly, circles)
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise IoError(f"cannot write {path}: {e.strerror}") from e


def render_png(path, poly: Polygon, mesh: QuadMesh | None = None, circles=(), dpi: int = 150):
    """Raster companion of the SVG, drawn with matplotlib."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.collections import PolyCollection
    from matplotlib.patches import Circle as Disk

    fig, ax = plt.subplots(figsize=(6, 6))
    for loop in poly.loops:
        xs, ys = zip(*(loop + loop[:1]))
        ax.plot(xs, ys, color="black", lw=1.2)
    for c in circles:
        ax.add_patch(Disk(c.center, c.radius, fill=False, color="#1f77b4", lw=0.6, alpha=0.6))
    if mesh is not None and mesh.quads:
        ax.add_collection(PolyCollection([mesh.quad_points(k) for k in range(len(mesh.quads))],
                                         facecolors="none", edgecolors="black", linewidths=0.4))
    ax.set_aspect("equal")
    ax.axis("off")
    try:
        fig.savefig(path, dpi=dpi, bbox_inches="tight", metadata={"Software": None})
    except OSError as e:
        raise IoError(f"cannot write {path}: {e.strerror}") from e
    finally:
        plt.close(fig)
