import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fourterm import persist as ps
from fourterm.cli import main

WORKED = {"A": [1], "B": [2, -2, 1], "C": [0, 1], "M": 50, "N": 30}


@pytest.fixture
def config(tmp_path):
    def make(**kw):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(dict(WORKED, **kw)))
        return str(path)
    return make


def run(*argv):
    return main([str(a) for a in argv])


class TestTable:
    def test_worked_example(self, config, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("table", "--config", config(), "--out", out) == 0
        data = json.loads((out / "table.json").read_text())
        assert data["M"] == 50 and data["N"] == 30
        assert len(data["entries"][50][30]) == 61
        assert "max degree 60" in capsys.readouterr().out
        assert (out / "manifest.json").exists()

    def test_single_entry(self, config, tmp_path):
        out = tmp_path / "o"
        assert run("table", "--config", config(M=0, N=0), "--out", out) == 0
        data = json.loads((out / "table.json").read_text())
        assert data["entries"] == [[[[1.0, 0.0]]]]

    def test_degenerate_warns(self, config, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("table", "--config", config(A=[0], B=[0], C=[0], M=2, N=2), "--out", out) == 0
        assert "warning" in capsys.readouterr().err
        data = json.loads((out / "table.json").read_text())
        assert all(e == [] for row in data["entries"] for e in row[1:])

    def test_memory_cap_is_runtime_error(self, config, tmp_path, monkeypatch):
        from fourterm import cli, tablegen

        def capped(spec, M, N, **kw):
            return tablegen.build_table(spec, M, N, max_coeffs=100)

        monkeypatch.setattr(cli, "build_table", capped)
        assert run("table", "--config", config(), "--out", tmp_path / "o") == 3
        assert not (tmp_path / "o").exists()


class TestZeros:
    def test_p11(self, config, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("zeros", "--config", config(), "--m", 1, "--n", 1, "--out", out) == 0
        rs = ps.rootset_from_csv((out / "zeros_1_1.csv").read_text())
        expected = [(5 - 1j * math.sqrt(7)) / 4, (5 + 1j * math.sqrt(7)) / 4]
        np.testing.assert_allclose(np.sort_complex(rs.roots), expected, atol=1e-14)
        assert "max residual" in capsys.readouterr().out

    def test_constant_entry(self, config, tmp_path):
        out = tmp_path / "o"
        assert run("zeros", "--config", config(), "--m", 0, "--n", 0, "--out", out) == 0
        assert (out / "zeros_0_0.csv").read_text() == "re,im,residual,converged\n"

    def test_figure_entry(self, config, tmp_path):
        out = tmp_path / "o"
        assert run("zeros", "--config", config(), "--out", out) == 0
        rs = ps.rootset_from_csv((out / "zeros_50_30.csv").read_text())
        assert len(rs) == 60 and rs.all_converged

    def test_out_of_bounds(self, config, tmp_path):
        assert run("zeros", "--config", config(), "--m", 51, "--out", tmp_path / "o") == 2
        assert not (tmp_path / "o").exists()

    def test_unconverged_is_runtime_error(self, config, tmp_path):
        assert run("zeros", "--config", config(), "--max-iters", 1, "--out", tmp_path / "o") == 3


class TestVerify:
    def test_sweep_passes(self, config, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("verify", "--config", config(sweep=12), "--tol", 1e-6, "--out", out) == 0
        report = (out / "verify_report.csv").read_text().splitlines()
        assert report[0] == "m,n,re,im,residual,status"
        assert not any(line.endswith(",off") for line in report)
        assert "0 off the locus" in capsys.readouterr().out

    def test_corrupted_roots(self, config, tmp_path):
        roots = tmp_path / "bad.csv"
        roots.write_text("re,im,residual,converged\n1.5,0,0,true\n5,0,0,true\n")
        out = tmp_path / "o"
        assert run("verify", "--config", config(), "--roots", roots, "--out", out) == 1
        assert (out / "verify_report.csv").read_text().splitlines()[-1].endswith(",off")

    def test_empty_sweep(self, config, tmp_path, capsys):
        assert run("verify", "--config", config(sweep=0), "--out", tmp_path / "o") == 0
        assert "0 roots checked" in capsys.readouterr().out

    def test_needs_triple(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text(json.dumps({"numerator": [[[1.0]]], "M": 2, "N": 2}))
        assert run("verify", "--config", path, "--out", tmp_path / "o") == 2


class TestFigure:
    def test_worked_example(self, config, tmp_path):
        out = tmp_path / "o"
        assert run("figure", "--config", config(bbox=[-0.5, 2.5, -1.6, 1.6]), "--out", out) == 0
        svg = (out / "figure.svg").read_text()
        assert svg.count("<circle") == 60
        assert "<path" in svg
        curve = ps.curve_from_csv((out / "curve.csv").read_text())
        assert len(curve.segments) >= 1

    def test_h_table_half_line(self, tmp_path):
        path = tmp_path / "h.json"
        path.write_text(json.dumps({"A": [1], "B": [1], "C": [0, 1], "M": 10, "N": 10, "bbox": [0, 6, -1, 1]}))
        out = tmp_path / "o"
        assert run("figure", "--config", path, "--out", out) == 0
        pts = ps.curve_from_csv((out / "curve.csv").read_text()).points()
        assert np.max(np.abs(pts.imag)) < 1e-12
        assert pts.real.min() == pytest.approx(1, abs=1e-6)
        assert pts.real.max() == pytest.approx(6)

    def test_empty_curve_warns(self, config, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("figure", "--config", config(m=1, n=1), "--bbox", 3, 4, 2, 3, "--out", out) == 0
        assert "warning" in capsys.readouterr().err
        svg = (out / "figure.svg").read_text()
        assert "<path" not in svg

    def test_svg_flags(self, config, tmp_path):
        out = tmp_path / "o"
        assert run("figure", "--config", config(m=1, n=1), "--svg-width", 320, "--svg-height", 240,
                   "--stroke-width", 3, "--out", out) == 0
        svg = (out / "figure.svg").read_text()
        assert 'width="320"' in svg and 'stroke-width="3.0"' in svg


class TestRun:
    def test_outputs_and_determinism(self, config, tmp_path):
        cfg = config(bbox=[0.5, 2.5, -1.5, 1.5], grid_step=0.02)
        for d in ("a", "b"):
            assert run("run", "--config", cfg, "--out", tmp_path / d) == 0
        names = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert names == ["curve.csv", "figure.svg", "manifest.json", "table.json", "zeros_50_30.csv"]
        assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()


class TestOtherCommands:
    def test_sequences(self, config, tmp_path):
        out = tmp_path / "o"
        assert run("sequences", "--config", config(B=[-1, 1], sequences_N=20), "--out", out) == 0
        lines = (out / "sequences.csv").read_text().splitlines()
        assert lines[0] == "N,s_residual,r_residual,zeros,on,off,indeterminate,unconverged"
        assert len(lines) == 22

    def test_density_small(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("density", "--density-m", 40, "--ks-max", 0.2, "--out", out) == 0
        assert (out / "density.csv").read_text().startswith("x,empirical_cdf,model_cdf,diff\n")

    def test_density_fails_tight_limit(self, tmp_path):
        assert run("density", "--density-m", 10, "--ks-max", 1e-4, "--out", tmp_path / "o") == 1


class TestUsage:
    def test_unknown_command(self):
        assert run("bogus") == 2

    def test_bad_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert run("table", "--config", path, "--out", tmp_path / "o") == 2
        assert not (tmp_path / "o").exists()

    def test_invalid_flag_value(self, config, tmp_path):
        assert run("table", "--config", config(), "--M", -1, "--out", tmp_path / "o") == 2
        assert not (tmp_path / "o").exists()

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "fourterm.cli", "zeros", "--m", "1", "--n", "1",
                               "--out", str(tmp_path / "o")], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert "entry (1,1): 2 zeros" in proc.stdout
