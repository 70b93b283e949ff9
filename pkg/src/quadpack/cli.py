"""Command line: ``quadpack pack|mesh|validate|render``.

Exit codes: 0 success, 1 validation failure, 2 input error,
3 internal guarantee violation.
"""
from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass, replace

import click

from .geometry import DEFAULT_TOL, GeometryError, InvalidPolygon, Tolerances
from .io import IoError, ParseError, load_mesh, load_polygon, save_json, save_mesh
from .mesh import quality_report
from .packing import Mode, PackingError, PackOptions
from .pipeline import METHODS, run_method
from .render import render_png, render_svg

OK, INVALID, INPUT_ERROR, INTERNAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    input: str
    method: str
    mesh_json: str | None = None
    off: str | None = None
    report: str | None = None
    svg: str | None = None
    png: str | None = None
    eps_rel: float | None = None
    eps_sep: float = 0.05
    eps_inset: float = 0.25
    simplify: bool = False
    seed: int | None = None        # reserved; the pipeline is deterministic


def _tol(eps_rel) -> Tolerances:
    return DEFAULT_TOL if eps_rel is None else replace(DEFAULT_TOL, eps_rel=eps_rel)


def _diagnostic(kind: str, err: Exception) -> dict:
    d = {"error": kind, "type": type(err).__name__, "message": str(err)}
    loop = getattr(err, "loop", None)
    if loop is not None:
        d["loop"] = loop
    return d


def _emit(status: int, report: dict, cfg: RunConfig) -> int:
    report["exit_code"] = status
    if cfg.report:
        try:
            save_json(report, cfg.report)
        except IoError as e:
            click.echo(f"error\t{e}", err=True)
            return INPUT_ERROR
    return status


def run(cfg: RunConfig) -> int:
    """Pack, mesh, validate and write the requested outputs; returns the exit status."""
    report: dict = {"input": cfg.input, "method": cfg.method}
    try:
        if cfg.method not in METHODS:
            raise ValueError(f"unknown method {cfg.method!r}")
        poly = load_polygon(cfg.input)
        tol = _tol(cfg.eps_rel)
        opts = PackOptions(eps_sep=cfg.eps_sep, eps_inset=cfg.eps_inset, tol=tol,
                           mode=Mode.BOUNDARY_CENTERED if cfg.method in ("voronoi", "rightangle")
                           else Mode.BOUNDARY_TANGENT)
    except (ParseError, InvalidPolygon, IoError, ValueError) as e:
        report["diagnostics"] = [_diagnostic("input", e)]
        click.echo(f"error\t{type(e).__name__}\t{e}", err=True)
        return _emit(INPUT_ERROR, report, cfg)
    try:
        res = run_method(poly, cfg.method, opts, tol, simplify=cfg.simplify)
    except (GeometryError, PackingError, ValueError) as e:
        report["diagnostics"] = [_diagnostic("internal", e)]
        click.echo(f"error\t{type(e).__name__}\t{e}", err=True)
        return _emit(INTERNAL, report, cfg)
    report.update(res.report)
    report["checks"] = [c.to_json() for c in res.checks]
    for c in res.checks:
        click.echo(f"{c.name}\t{c.value:.6g}\t{c.limit:.6g}\t{'pass' if c.ok else 'FAIL'}")
    try:
        if res.mesh is not None:
            if cfg.mesh_json:
                save_mesh(res.mesh, cfg.mesh_json)
            if cfg.off:
                with open(cfg.off, "w") as fh:
                    fh.write(res.mesh.to_off())
        if cfg.svg:
            if res.mesh is None:
                render_svg(res.packing, cfg.svg)
            else:
                render_svg(res.mesh, cfg.svg, poly, res.packing.circles)
        if cfg.png:
            render_png(cfg.png, poly, res.mesh, res.packing.circles)
    except (IoError, OSError) as e:
        report["diagnostics"] = [_diagnostic("output", e)]
        click.echo(f"error\t{e}", err=True)
        return _emit(INPUT_ERROR, report, cfg)
    return _emit(OK if res.ok else INVALID, report, cfg)


# ---------------------------------------------------------------- click wiring

def _common(f):
    for opt in reversed([
        click.option("--eps-sep", type=float, default=0.05, show_default=True,
                     help="Minimum relative clearance between a circle and a nontangent edge."),
        click.option("--eps-inset", type=float, default=0.25, show_default=True,
                     help="Relative inset of boundary replacement circles."),
        click.option("--tol", "eps_rel", type=float, default=None,
                     help="Relative geometric tolerance (default 1e-9)."),
        click.option("--svg", type=click.Path(dir_okay=False), help="Write an SVG picture."),
        click.option("--png", type=click.Path(dir_okay=False), help="Write a PNG picture."),
        click.option("--report", type=click.Path(dir_okay=False), help="Write a JSON report."),
    ]):
        f = opt(f)
    return f


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Circle packings and guaranteed-quality quadrilateral meshes of polygons."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)


@main.command()
@click.argument("polygon", type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["tangent", "centered"]), default="tangent",
              show_default=True, help="Circles tangent to or centered on the boundary.")
@click.option("-o", "--out", type=click.Path(dir_okay=False), help="Write the packing as JSON.")
@_common
def pack(polygon, mode, out, **kw):
    """Pack circles into POLYGON until every gap has three or four sides."""
    from .packing import pack as do_pack
    from .pipeline import packing_checks
    cfg = RunConfig(polygon, "pack-only", **{k: kw[k] for k in ("eps_sep", "eps_inset", "eps_rel",
                                                                  "svg", "png", "report")})
    report = {"input": polygon, "method": "pack-only"}
    try:
        poly = load_polygon(polygon)
        tol = _tol(cfg.eps_rel)
        opts = PackOptions(mode=Mode.BOUNDARY_TANGENT if mode == "tangent" else Mode.BOUNDARY_CENTERED,
                           eps_sep=cfg.eps_sep, eps_inset=cfg.eps_inset, tol=tol)
    except (ParseError, InvalidPolygon, IoError, ValueError) as e:
        report["diagnostics"] = [_diagnostic("input", e)]
        click.echo(f"error\t{type(e).__name__}\t{e}", err=True)
        sys.exit(_emit(INPUT_ERROR, report, cfg))
    try:
        pk = do_pack(poly, opts)
    except (GeometryError, PackingError) as e:
        report["diagnostics"] = [_diagnostic("internal", e)]
        click.echo(f"error\t{type(e).__name__}\t{e}", err=True)
        sys.exit(_emit(INTERNAL, report, cfg))
    checks = packing_checks(pk, tol)
    for c in checks:
        click.echo(f"{c.name}\t{c.value:.6g}\t{c.limit:.6g}\t{'pass' if c.ok else 'FAIL'}")
    report.update({"mode": pk.mode.value, "circles": len(pk.circles), "census": pk.gap_census,
                   "checks": [c.to_json() for c in checks]})
    if out:
        save_json(pk.to_json(), out)
    if cfg.svg:
        render_svg(pk, cfg.svg)
    if cfg.png:
        render_png(cfg.png, poly, None, pk.circles)
    sys.exit(_emit(OK if all(c.ok for c in checks) else INVALID, report, cfg))


@main.command()
@click.argument("polygon", type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(METHODS), required=True)
@click.option("-o", "--out", "mesh_json", type=click.Path(dir_okay=False),
              help="Write the mesh as JSON.")
@click.option("--off", type=click.Path(dir_okay=False), help="Write the mesh in OFF format.")
@click.option("--simplify", is_flag=True, help="Remove removable sites (rightangle only).")
@_common
def mesh(polygon, method, **kw):
    """Mesh POLYGON with quadrilaterals and check the method's guarantee."""
    sys.exit(run(RunConfig(polygon, method, **kw)))


@main.command("validate")
@click.argument("mesh_file", type=click.Path(dir_okay=False))
@click.argument("polygon", type=click.Path(dir_okay=False))
@click.option("--tol", "eps_rel", type=float, default=None)
@click.option("--report", type=click.Path(dir_okay=False))
def validate_cmd(mesh_file, polygon, eps_rel, report):
    """Check conformity, counting identities and coverage of MESH_FILE over POLYGON."""
    try:
        poly = load_polygon(polygon)
        m = load_mesh(mesh_file)
    except (ParseError, InvalidPolygon, IoError) as e:
        click.echo(f"error\t{type(e).__name__}\t{e}", err=True)
        sys.exit(INPUT_ERROR)
    try:
        rep = quality_report(m, poly, _tol(eps_rel))
    except GeometryError as e:
        click.echo(f"error\t{type(e).__name__}\t{e}", err=True)
        sys.exit(INVALID)
    v = rep["validation"]
    for k in ("q", "max_angle", "kite_fraction", "cyclic_fraction", "right_angle_fraction",
              "area_residual"):
        click.echo(f"{k}\t{rep[k]:.6g}")
    for viol in v["violations"][:20]:
        click.echo(f"violation\t{json.dumps(viol, sort_keys=True)}")
    click.echo(f"valid\t{'pass' if v['ok'] else 'FAIL'}")
    if report:
        save_json(rep, report)
    sys.exit(OK if v["ok"] else INVALID)


@main.command()
@click.argument("polygon", type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(METHODS), default="pack-only", show_default=True)
@click.option("--svg", type=click.Path(dir_okay=False), required=True)
@click.option("--png", type=click.Path(dir_okay=False))
@click.option("--eps-sep", type=float, default=0.05)
@click.option("--eps-inset", type=float, default=0.25)
def render(polygon, method, svg, png, eps_sep, eps_inset):
    """Draw the packing (or mesh) of POLYGON."""
    sys.exit(run(RunConfig(polygon, method, svg=svg, png=png, eps_sep=eps_sep,
                           eps_inset=eps_inset)))


if __name__ == "__main__":
    main()
