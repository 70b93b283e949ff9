"""Reading polygons and writing meshes, packings and reports."""
from __future__ import annotations

import json
import logging
import math
from pathlib import Path

from .geometry import InvalidPolygon, Point, Polygon, signed_area
from .mesh import QuadMesh

log = logging.getLogger(__name__)


class ParseError(ValueError):
    pass


class IoError(OSError):
    pass


def _loop(raw, where: str) -> tuple:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected a list of [x, y] pairs")
    pts = []
    for k, p in enumerate(raw):
        if (not isinstance(p, (list, tuple)) or len(p) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
            raise ParseError(f"{where}[{k}]: expected [x, y]")
        x, y = float(p[0]), float(p[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"{where}[{k}]: coordinates must be finite")
        pts.append(Point(x, y))
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    return tuple(pts)


def polygon_from_json(data) -> Polygon:
    """Build a polygon from ``{"outer": [...], "holes": [[...], ...]}``.

    Loops given in the wrong orientation are reversed with a warning.
    """
    if not isinstance(data, dict) or "outer" not in data:
        raise ParseError('expected an object with an "outer" loop')
    holes_raw = data.get("holes", [])
    if not isinstance(holes_raw, list):
        raise ParseError('"holes" must be a list of loops')
    outer = _loop(data["outer"], "outer")
    holes = [_loop(h, f"holes[{k}]") for k, h in enumerate(holes_raw)]
    if signed_area(outer) < 0:
        log.warning("outer loop is clockwise; reversing it")
        outer = outer[::-1]
    for k, h in enumerate(holes):
        if signed_area(h) > 0:
            log.warning("hole %d is counterclockwise; reversing it", k)
            holes[k] = h[::-1]
    poly = Polygon(outer, tuple(holes))
    poly.validate()
    return poly


def load_polygon(path) -> Polygon:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e}") from e
    return polygon_from_json(data)


def polygon_to_json(poly: Polygon) -> dict:
    return {"outer": [[p.x, p.y] for p in poly.outer],
            "holes": [[[p.x, p.y] for p in h] for h in poly.holes]}


def save_mesh(mesh: QuadMesh, path) -> None:
    _write(path, mesh.dumps())


def load_mesh(path) -> QuadMesh:
    try:
        return QuadMesh.from_json(json.loads(Path(path).read_text()))
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: not a mesh file ({e})") from e


def save_json(obj, path) -> None:
    _write(path, json.dumps(obj, indent=2, sort_keys=True))


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise IoError(f"cannot write {path}: {e.strerror}") from e


__all__ = ["IoError", "InvalidPolygon", "ParseError", "load_mesh", "load_polygon",
           "polygon_from_json", "polygon_to_json", "save_json", "save_mesh"]
