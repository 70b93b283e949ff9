import json
import logging

import pytest
from click.testing import CliRunner

from quadpack.cli import INPUT_ERROR, OK, RunConfig, main, run
from quadpack.fixtures import FIXTURES
from quadpack.geometry import InvalidPolygon, Polygon
from quadpack.io import (IoError, ParseError, load_mesh, load_polygon, polygon_from_json,
                         polygon_to_json, save_mesh)
from quadpack.mesh import QuadMesh
from quadpack.render import mesh_svg, packing_svg

SQUARE = {"outer": [[0, 0], [1, 0], [1, 1], [0, 1]]}


@pytest.fixture
def square_file(tmp_path):
    p = tmp_path / "square.json"
    p.write_text(json.dumps(SQUARE))
    return p


class TestPolygonJson:
    def test_square(self):
        poly = polygon_from_json(SQUARE)
        assert poly.n == 4 and poly.area == 1

    def test_round_trip(self):
        poly = FIXTURES["holed"]()
        assert polygon_from_json(polygon_to_json(poly)) == poly

    def test_clockwise_reversed(self, caplog):
        with caplog.at_level(logging.WARNING):
            poly = polygon_from_json({"outer": SQUARE["outer"][::-1]})
        assert poly.area == 1
        assert "clockwise" in caplog.text

    def test_hole_reoriented(self):
        data = polygon_to_json(FIXTURES["holed"]())
        data["holes"] = [h[::-1] for h in data["holes"]]
        assert polygon_from_json(data) == FIXTURES["holed"]()

    @pytest.mark.parametrize("data", [[], {"outer": "x"}, {"outer": [[0, 0], [1]]},
                                      {"outer": [[0, 0], [1, 0], [float("nan"), 1]]},
                                      {"outer": SQUARE["outer"], "holes": 3}])
    def test_malformed(self, data):
        with pytest.raises(ParseError):
            polygon_from_json(data)

    def test_bowtie(self):
        with pytest.raises(InvalidPolygon) as e:
            polygon_from_json({"outer": [[0, 0], [1, 1], [1, 0], [0, 1]]})
        assert e.value.loop == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_polygon(tmp_path / "nope.json")

    def test_mesh_round_trip(self, tmp_path, results):
        m = results("square", "maxangle").mesh
        save_mesh(m, tmp_path / "m.json")
        assert load_mesh(tmp_path / "m.json") == m


class TestSvg:
    def test_packing_elements(self, packings):
        pk = packings("square", "centered")
        text = packing_svg(pk)
        assert text.count("<circle") == len(pk.circles)
        assert text.count("<polygon") == 1
        assert text.count("<rect") == len(pk.tangencies)

    def test_mesh_paths(self, results):
        res = results("lshape", "kite")
        text = mesh_svg(res.mesh, FIXTURES["lshape"](), res.packing.circles)
        assert text.count("<path") == len(res.mesh.quads) + len(res.packing.circles)

    def test_empty_mesh(self):
        text = mesh_svg(QuadMesh((), (), ()), FIXTURES["square"]())
        assert text.startswith("<svg") and "<path" not in text

    def test_holes_drawn(self, packings):
        assert packing_svg(packings("holed", "tangent")).count("<polygon") == 2


class TestCli:
    def test_mesh_methods(self, square_file, tmp_path):
        runner = CliRunner()
        for method in ("voronoi", "rightangle", "kite", "maxangle"):
            out = tmp_path / f"{method}.json"
            r = runner.invoke(main, ["mesh", str(square_file), "--method", method, "-o", str(out)])
            assert r.exit_code == OK, r.output
            assert "FAIL" not in r.output
            assert all(len(line.split("\t")) == 4 for line in r.output.strip().splitlines())
            assert load_mesh(out).quads

    def test_report_and_pictures(self, square_file, tmp_path):
        rep, svg, png = tmp_path / "r.json", tmp_path / "m.svg", tmp_path / "m.png"
        r = CliRunner().invoke(main, ["mesh", str(square_file), "--method", "kite", "--report", str(rep),
                                      "--svg", str(svg), "--png", str(png)])
        assert r.exit_code == OK
        data = json.loads(rep.read_text())
        assert data["exit_code"] == 0 and data["quality"]["kite_fraction"] == 1.0
        assert svg.read_text().count("<path") == data["quality"]["q"] + data["circles_after_repair"]
        assert png.read_bytes()[:4] == b"\x89PNG"

    def test_pack(self, square_file, tmp_path):
        out, svg = tmp_path / "p.json", tmp_path / "p.svg"
        r = CliRunner().invoke(main, ["pack", str(square_file), "--mode", "centered", "-o", str(out),
                                      "--svg", str(svg)])
        assert r.exit_code == OK
        assert svg.read_text().count("<circle") == len(json.loads(out.read_text())["circles"]) == 5

    def test_validate(self, square_file, tmp_path):
        m = tmp_path / "m.json"
        runner = CliRunner()
        runner.invoke(main, ["mesh", str(square_file), "--method", "rightangle", "-o", str(m)])
        r = runner.invoke(main, ["validate", str(m), str(square_file)])
        assert r.exit_code == OK
        assert "valid\tpass" in r.output

    @pytest.mark.parametrize("content", ["{not json", json.dumps({"outer": [[0, 0], [1, 1], [1, 0], [0, 1]]})])
    def test_bad_input(self, tmp_path, content):
        p = tmp_path / "bad.json"
        p.write_text(content)
        rep = tmp_path / "r.json"
        assert run(RunConfig(str(p), "kite", report=str(rep))) == INPUT_ERROR
        assert json.loads(rep.read_text())["diagnostics"]

    def test_bowtie_names_loop(self, tmp_path):
        p = tmp_path / "bow.json"
        p.write_text(json.dumps({"outer": [[0, 0], [1, 1], [1, 0], [0, 1]]}))
        r = CliRunner().invoke(main, ["mesh", str(p), "--method", "kite"])
        assert r.exit_code == INPUT_ERROR
        assert "loop 0" in r.output

    def test_deterministic(self, square_file, tmp_path):
        runner = CliRunner()
        outs = []
        for k in range(2):
            out = tmp_path / f"m{k}.json"
            runner.invoke(main, ["mesh", str(square_file), "--method", "maxangle", "-o", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_polygon_type(self):
        assert isinstance(polygon_from_json(SQUARE), Polygon)
