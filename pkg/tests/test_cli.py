import csv
import io
import json
import os
import subprocess
import sys

import pytest

from ncqm import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


class TestSpectrum:
    def test_reference_row(self, capsys):
        code, out, _ = run(["spectrum", "--trunc", "64"], capsys)
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == ["n1", "n2", "E_formula", "E_numeric", "abs_delta", "method"]
        assert rows[1][:2] == ["0", "0"]
        assert float(rows[1][2]) == pytest.approx(0.9049875, abs=1e-7)
        assert rows[1][5] == "sectors"

    def test_small_truncation_fails_tolerance(self, capsys):
        # the dense route at N = 32 does not reach 1e-6 at these parameters
        code, out, err = run(["spectrum", "--trunc", "32"], capsys)
        assert code == 1
        assert "FAIL level(0,1)" in err
        assert read_csv(out)[1][5] == "dense"

    def test_commutative_limit(self, capsys):
        code, out, _ = run(["spectrum", "--theta", "1e-6", "--no-numeric"], capsys)
        assert code == 0
        for r in read_csv(out)[1:]:
            n1, n2, e = int(r[0]), int(r[1]), float(r[2])
            assert e == pytest.approx(n1 + n2 + 1, rel=1e-5)

    @pytest.mark.parametrize(
        "argv",
        [
            ["spectrum", "--theta", "-1"],
            ["spectrum", "--trunc", "4"],
            ["spectrum", "--trunc", "300"],
            ["spectrum", "--omega-l", "0"],
            ["spectrum", "--model", "free"],
            ["spectrum", "--theta", "abc"],
        ],
    )
    def test_config_errors(self, argv, capsys):
        code, _, err = run(argv, capsys)
        assert code == 2
        assert "configuration error" in err

    def test_no_command(self, capsys):
        assert run([], capsys)[0] == 2


class TestConfigFile:
    def test_flags_win(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# oscillator\ntheta = 0.5\nomega-l = 2.0\nlevels = 2\n")
        _, a, _ = run(["spectrum", "--config", str(cfg), "--no-numeric"], capsys)
        _, b, _ = run(["spectrum", "--config", str(cfg), "--no-numeric", "--theta", "0.2", "--omega-l", "1"], capsys)
        assert len(read_csv(a)) == 3
        assert float(read_csv(b)[1][2]) == pytest.approx(0.9049875, abs=1e-7)
        assert read_csv(a)[1][2] != read_csv(b)[1][2]

    @pytest.mark.parametrize("text", ["bogus = 1\n", "theta 0.2\n", "trunc = 1.5\n"])
    def test_bad_files(self, tmp_path, text, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        assert run(["spectrum", "--config", str(cfg)], capsys)[0] == 2

    def test_missing_file(self, tmp_path, capsys):
        assert run(["spectrum", "--config", str(tmp_path / "nope")], capsys)[0] == 2


class TestPzv:
    def test_oscillator_grid(self, tmp_path, capsys):
        out = tmp_path / "pzv.csv"
        code, _, err = run(["pzv", "--out", str(out), "--grid", "3"], capsys)
        assert code == 0
        raw = out.read_bytes()
        assert b"\r" not in raw
        rows = read_csv(raw.decode())
        assert len(rows) == 1 + 3**4
        origin = [r for r in rows[1:] if all(float(x) == 0 for x in r[:4])][0]
        assert float(origin[4]) == pytest.approx(1 - 0.8190024875775822**2, rel=1e-12)
        assert "PASS grid_integral" in err

    def test_free_z_independence(self, capsys):
        code, out, _ = run(["pzv", "--model", "free", "--k", "1+0.5i", "--grid", "3"], capsys)
        assert code == 0
        by_v = {}
        for r in read_csv(out)[1:]:
            by_v.setdefault((r[2], r[3]), set()).add(r[4])
        assert all(len(vals) == 1 for vals in by_v.values())

    def test_extent_outside_region(self, capsys):
        assert run(["pzv", "--trunc", "8", "--extent", "3"], capsys)[0] == 2

    def test_json(self, capsys):
        code, out, _ = run(["pzv", "--grid", "2", "--format", "json"], capsys)
        doc = json.loads(out)
        assert set(doc) == {"config", "results", "checks"}
        assert all(isinstance(doc[k], list) for k in doc)
        theta = [c for c in doc["config"] if c["key"] == "theta"][0]["value"]
        assert theta == 0.2
        assert len(doc["results"]) == 16
        assert doc["checks"][0]["name"] == "max_abs_delta"


class TestClassical:
    def test_harmonic(self, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        code, _, err = run(["classical", "--out", str(out), "--t-end", "2"], capsys)
        assert code == 0, err
        rows = read_csv(out.read_text())
        assert rows[0] == ["t", "Re z", "Im z", "Re v", "Im v", "E_local", "E_nonlocal", "L"]
        assert len(rows) == 2002

    def test_free(self, capsys):
        code, _, err = run(["classical", "--potential", "zero", "--t-end", "1"], capsys)
        assert code == 0
        line = [x for x in err.splitlines() if x.startswith("PASS E_local_drift")][0]
        assert float(line.split("value=")[1].split()[0]) < 1e-14

    def test_anisotropic_negative_control(self, capsys):
        pot = "1 1 0.2; 2 0 0.05; 0 2 0.05"
        assert run(["classical", "--potential", pot, "--t-end", "5"], capsys)[0] == 1
        code, _, err = run(["classical", "--potential", pot, "--t-end", "5", "--expect-l-drift"], capsys)
        assert code == 0
        assert "PASS L_mechanical_drift_expected" in err

    @pytest.mark.parametrize("pot", ["1 1", "2 0 1.0", "x y z"])
    def test_bad_potential(self, pot, capsys):
        assert run(["classical", "--potential", pot], capsys)[0] == 2


class TestChecks:
    def test_default_passes(self, capsys):
        code, out, err = run(["checks"], capsys)
        assert code == 0, err
        names = [r[0] for r in read_csv(out)[1:]]
        for n in ("constraints", "ladder_dictionary", "identity_resolution", "minimal_uncertainty"):
            assert n in names

    def test_small_truncation(self, capsys):
        assert run(["checks", "--trunc", "8"], capsys)[0] == 0

    def test_deterministic_files(self, tmp_path, capsys):
        path = tmp_path / "report.json"
        run(["checks", "--seed", "7", "--format", "json", "--out", str(path)], capsys)
        first = path.read_bytes()
        run(["checks", "--seed", "7", "--format", "json", "--out", str(path)], capsys)
        assert path.read_bytes() == first

    def test_float_precision(self, capsys):
        _, out, _ = run(["checks", "--format", "json", "--points", "2"], capsys)
        doc = json.loads(out)
        val = doc["checks"][0]["value"]
        text = out.split('"checks": ', 1)[1].split('"value": ', 1)[1]
        assert float(text.split(",")[0]) == val


def test_atomic_write_leaves_no_temp(tmp_path):
    path = tmp_path / "x.txt"
    cli.write_atomic(str(path), "a\n")
    cli.write_atomic(str(path), "b\n")
    assert path.read_text() == "b\n"
    assert os.listdir(tmp_path) == ["x.txt"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "ncqm", "--backend"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() in ("python", "cython")
