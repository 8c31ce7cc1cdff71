import json
import math

import numpy as np
import pytest

from mahlerlab import cli
from mahlerlab.body import LinearMap3, cube, make_body
from mahlerlab.quadrature import make_grid


def write_body(path, spec):
    path.write_text(json.dumps(spec), encoding="utf-8")
    return str(path)


def cube_file(tmp_path):
    return write_body(
        tmp_path / "cube.json",
        {"type": "polytope", "vertices": cube().vertices.tolist()},
    )


def square_file(tmp_path):
    return write_body(
        tmp_path / "square.json",
        {"dim": 2, "vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]},
    )


class TestExitCodes:
    def test_unknown_command(self):
        assert cli.run(["frobnicate", "--body", "x.json"]) == cli.EXIT_UNKNOWN

    def test_empty_argv(self):
        assert cli.run([]) == cli.EXIT_UNKNOWN

    def test_corrupt_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json", encoding="utf-8")
        assert cli.run(["vp", "--body", str(p)]) == cli.EXIT_PARSE

    def test_missing_file(self, tmp_path):
        assert cli.run(["vp", "--body", str(tmp_path / "no.json")]) == cli.EXIT_PARSE

    def test_asymmetric_vertices(self, tmp_path):
        p = write_body(
            tmp_path / "asym.json",
            {"type": "polytope", "vertices": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0]]},
        )
        assert cli.run(["vp", "--body", p]) == cli.EXIT_INVALID

    def test_bad_grid(self, tmp_path):
        p = cube_file(tmp_path)
        assert cli.run(["vp", "--body", p, "--grid", "tiny"]) == cli.EXIT_PARSE

    def test_unwritable_output(self, tmp_path):
        p = cube_file(tmp_path)
        out = str(tmp_path / "nodir" / "rep.json")
        assert cli.run(["vp", "--body", p, "--grid", "32x64", "--out", out]) == cli.EXIT_IO

    def test_2d_body_into_3d_command(self, tmp_path):
        p = square_file(tmp_path)
        assert cli.run(["verify", "--body", p, "--grid", "32x64"]) == cli.EXIT_INVALID

    def test_ok(self, tmp_path):
        assert cli.run(["vp", "--body", cube_file(tmp_path), "--grid", "32x64"]) == cli.EXIT_OK


class TestVp:
    def test_cube_values(self, tmp_path, capsys):
        code = cli.run(["vp", "--body", cube_file(tmp_path), "--grid", "64x128"])
        assert code == cli.EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        vals = {ln.split()[0]: float(ln.split()[-1]) for ln in lines[:3]}
        assert vals["volume"] == pytest.approx(8.0, abs=1e-10)
        assert vals["polar"] == pytest.approx(4.0 / 3.0, abs=1e-10)
        assert vals["product"] == pytest.approx(32.0 / 3.0, abs=1e-9)

    def test_2d_square(self, tmp_path, capsys):
        code = cli.run(["vp", "--body", square_file(tmp_path)])
        assert code == cli.EXIT_OK
        out = capsys.readouterr().out
        assert "8.0" in out

    def test_report_written(self, tmp_path):
        out = tmp_path / "vp.json"
        cli.run(["vp", "--body", cube_file(tmp_path), "--grid", "32x64", "--out", str(out)])
        rep = json.loads(out.read_text())
        assert rep["product"] == pytest.approx(32.0 / 3.0, abs=1e-9)


class TestPolar:
    def test_round_trip_radial_samples(self, tmp_path):
        spec = {"type": "lp", "p": 3.0, "axes": [1.0, 0.8, 1.2]}
        p = write_body(tmp_path / "lp.json", spec)
        out = tmp_path / "polar.json"
        assert cli.run(["polar", "--body", p, "--out", str(out)]) == cli.EXIT_OK
        Kp = cli.parse_body_file(str(out))
        want = make_body(spec)
        us = make_grid(16, 32).units
        # the polar of the polar descriptor must reproduce the gauge of
        # the original body on a sample of directions
        from mahlerlab.body import polar

        back = polar(Kp)
        assert np.allclose(back.gauge_many(us), want.gauge_many(us), atol=1e-12)

    def test_polytope_polar_descriptor(self, tmp_path):
        out = tmp_path / "polar.json"
        cli.run(["polar", "--body", cube_file(tmp_path), "--out", str(out)])
        spec = json.loads(out.read_text())
        assert spec["type"] == "polytope"
        assert len(spec["vertices"]) == 6


class TestEmitReport:
    def test_json_determinism(self, tmp_path):
        p = cube_file(tmp_path)
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            cli.run(["vp", "--body", p, "--grid", "32x64", "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_json_sorted_keys(self, tmp_path):
        out = tmp_path / "r.json"
        cli.emit_report({"b": 1, "a": [np.float64(2.0)]}, "json", str(out))
        text = out.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")

    def test_csv_round_trip_floats(self, tmp_path):
        out = tmp_path / "r.csv"
        rows = [[0.1, 1.0 / 3.0], [math.pi, 2.0]]
        cli.emit_report({"header": ["x", "y"], "rows": rows}, "csv", str(out))
        lines = out.read_text().splitlines()
        assert lines[0] == "x,y"
        got = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        assert got == rows

    def test_bad_format(self, tmp_path):
        from mahlerlab.errors import IoError

        with pytest.raises(IoError):
            cli.emit_report({}, "xml", str(tmp_path / "r.xml"))


class TestWinding:
    def test_csv_header_and_code(self, tmp_path):
        rng = np.random.default_rng(7)
        A = np.eye(3) + 0.12 * rng.standard_normal((3, 3))
        K = cube().transformed(LinearMap3(A))
        p = write_body(
            tmp_path / "pert.json",
            {"type": "polytope", "vertices": K.vertices.tolist()},
        )
        out = tmp_path / "w.csv"
        code = cli.run(["winding", "--body", p, "--grid", "48x96", "--out", str(out)])
        assert code == cli.EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "t,G,H,angle"
        assert len(lines) > 100


class TestVerify2:
    def test_square(self, tmp_path, capsys):
        code = cli.run(["verify2", "--body", square_file(tmp_path)])
        assert code == cli.EXIT_OK
        assert "8.0" in capsys.readouterr().out

    def test_needs_2d(self, tmp_path):
        assert cli.run(["verify2", "--body", cube_file(tmp_path)]) == cli.EXIT_INVALID

    def test_report(self, tmp_path):
        out = tmp_path / "v2.json"
        cli.run(["verify2", "--body", square_file(tmp_path), "--out", str(out)])
        rep = json.loads(out.read_text())
        assert rep["bound_ok"] is True
        assert rep["product"] == pytest.approx(8.0, abs=1e-12)


class TestVerify:
    def test_cube_chain(self, tmp_path):
        out = tmp_path / "chain.json"
        code = cli.run(
            ["verify", "--body", cube_file(tmp_path), "--grid", "64x128", "--out", str(out)]
        )
        assert code == cli.EXIT_OK
        rep = json.loads(out.read_text())
        assert rep["chain_ok"] is True
        assert rep["product"] == pytest.approx(32.0 / 3.0, abs=1e-9)
