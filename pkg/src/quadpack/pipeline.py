"""Pack, mesh, check the method's guarantee and assemble a report."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .geometry import DEFAULT_TOL, GeometryError, Polygon, Tolerances
from .kite import kite_quads, mesh_kites
from .maxangle import LIMIT, mesh_120_from_packing
from .mesh import QuadMesh, quad_metrics, quality_report, validate
from .packing import Mode, PackOptions, Packing, pack, repair_bad_gaps
from .rightangle import mesh_opposite_right_angles
from .voronoi import PowerFamily, dual_residuals, mesh_voronoi, power_duality_check, voronoi_cells

METHODS = ("voronoi", "rightangle", "kite", "maxangle", "pack-only")
MODE_OF = {"voronoi": Mode.BOUNDARY_CENTERED, "rightangle": Mode.BOUNDARY_CENTERED,
           "kite": Mode.BOUNDARY_TANGENT, "maxangle": Mode.BOUNDARY_TANGENT}


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    ok: bool

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "limit": self.limit, "ok": self.ok}


@dataclass
class Result:
    method: str
    packing: Packing
    mesh: QuadMesh | None
    checks: list = field(default_factory=list)
    report: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _le(name, value, limit) -> Check:
    return Check(name, float(value), float(limit), bool(value <= limit))


def _ge(name, value, limit) -> Check:
    return Check(name, float(value), float(limit), bool(value >= limit))


def cocircularity_residual(pk: Packing) -> float:
    worst = 0.0
    for g in pk.gaps:
        if g.center is None or len(g.tangency_points) < 3:
            continue
        ds = [math.dist(g.center, t) for t in g.tangency_points]
        worst = max(worst, (max(ds) - min(ds)) / max(ds))
    return worst


def packing_checks(pk: Packing, tol: Tolerances) -> list[Check]:
    sides = max((len(g.arcs) for g in pk.gaps), default=0)
    return [_le("gap_sides", sides, 4),
            _le("cocircularity", cocircularity_residual(pk), 10 * tol.eps_rel)]


def _fraction(ms, attr) -> float:
    return sum(getattr(m, attr) for m in ms) / max(len(ms), 1)


def method_checks(method: str, pk: Packing, mesh: QuadMesh, tol: Tolerances,
                  extra: dict) -> list[Check]:
    ms = [quad_metrics(mesh.quad_points(k), tol) for k in range(len(mesh.quads))]
    if method == "kite":
        return [_ge("kite_fraction", _fraction(ms, "is_kite"), 1.0),
                _le("cross_ratio_error", max((abs(m.cross_ratio - 1) for m in ms), default=0.0), 1e-9)]
    if method == "maxangle":
        kites = len(kite_quads(pk, repair=False))
        return [_le("max_angle", max((m.max_angle for m in ms), default=0.0),
                    LIMIT + math.degrees(tol.eps_angle)),
                _le("count_vs_6_kites", abs(len(mesh.quads) - 6 * kites), 0)]
    if method == "rightangle":
        return [_ge("cyclic_fraction", _fraction(ms, "is_cyclic"), 1.0),
                _ge("right_angle_fraction", _fraction(ms, "has_opposite_right_angles"), 1.0),
                _le("foot_residual", extra.get("foot_residual", 0.0), 1e-9)]
    if method == "voronoi":
        diag: list = []
        cells = voronoi_cells(pk, diag)
        dual = dual_residuals(cells)
        rep: dict = {}
        power_ok = power_duality_check(mesh, PowerFamily.from_packing(pk, repair=False), 1e-9, rep)
        extra["power"] = {"max_residual": rep["max_residual"], "failures": rep["failures"][:20]}
        extra["cells"] = diag
        return [_le("site_outside_cell", len(diag), 0),
                _le("dual_midpoint", dual["midpoint"], 1e-9),
                _le("dual_angle_rad", dual["angle"], 1e-6),
                _le("dual_not_crossing", len(dual["not_crossing"]), 0),
                _le("power_residual", rep["max_residual"], 1e-9),
                _ge("power_duality", float(power_ok), 1.0)]
    return []


def run_method(poly: Polygon, method: str, opts: PackOptions | None = None,
               tol: Tolerances = DEFAULT_TOL, simplify: bool = False,
               packing: Packing | None = None) -> Result:
    """Build the packing and mesh for ``method`` and evaluate its guarantees.

    Geometry failures propagate as :class:`GeometryError`.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    opts = opts or PackOptions()
    if method != "pack-only":
        opts = replace(opts, mode=MODE_OF[method], tol=tol)
    pk = packing if packing is not None else pack(poly, opts)
    checks = packing_checks(pk, tol)
    report: dict = {"method": method, "mode": pk.mode.value, "n": poly.n,
                    "circles": len(pk.circles), "census": pk.gap_census}
    if method == "pack-only":
        return Result(method, pk, None, checks, report)
    rpk = repair_bad_gaps(pk)
    extra: dict = {}
    if method == "voronoi":
        mesh = mesh_voronoi(rpk, poly, repair=False)
    elif method == "rightangle":
        mesh = mesh_opposite_right_angles(rpk, poly, simplify=simplify, report=extra)
    elif method == "kite":
        mesh = mesh_kites(rpk, poly, repair=False)
    else:
        mesh = mesh_120_from_packing(rpk, poly, tol)
    val = validate(mesh, poly, tol)
    checks.append(_ge("validation", float(val.ok), 1.0))
    checks += method_checks(method, rpk, mesh, tol, extra)
    report.update({"circles_after_repair": len(rpk.circles),
                   "quality": quality_report(mesh, poly, tol), **extra})
    return Result(method, rpk, mesh, checks, report)


__all__ = ["Check", "GeometryError", "METHODS", "Result", "cocircularity_residual",
           "packing_checks", "run_method"]
