"""Reference domains used by the tests and the command line demo."""
from __future__ import annotations

import math

from .geometry import Polygon


def unit_square() -> Polygon:
    return Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def rectangle(w: float = 2.0, h: float = 1.0) -> Polygon:
    return Polygon([(0, 0), (w, 0), (w, h), (0, h)])


def regular(m: int, radius: float = 1.0) -> Polygon:
    return Polygon([(radius * math.cos(2 * math.pi * k / m), radius * math.sin(2 * math.pi * k / m))
                    for k in range(m)])


def l_shape() -> Polygon:
    return Polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


def star(points: int = 8, outer: float = 1.0, inner: float = 0.5) -> Polygon:
    pts = []
    for k in range(2 * points):
        r = outer if k % 2 == 0 else inner
        a = math.pi * k / points
        pts.append((r * math.cos(a), r * math.sin(a)))
    return Polygon(pts)


def square_with_hole() -> Polygon:
    return Polygon([(0, 0), (3, 0), (3, 3), (0, 3)], [[(1, 1), (1, 2), (2, 2), (2, 1)]])


FIXTURES = {
    "square": unit_square,
    "rect2x1": rectangle,
    "gon8": lambda: regular(8),
    "gon16": lambda: regular(16),
    "gon32": lambda: regular(32),
    "gon64": lambda: regular(64),
    "lshape": l_shape,
    "star8": star,
    "holed": square_with_hole,
}
