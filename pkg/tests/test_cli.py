import json
import math
import subprocess
import sys

import pytest

from dnls_lab.cli import run
from dnls_lab.io import read_timeseries_csv
from dnls_lab.evolution import CSV_COLUMNS

SIM = {"equation": "gauged", "initial": {"family": "scaled_ground_state", "a": 0.9}, "t_final": 0.05}


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "sim.json"
    p.write_text(json.dumps(SIM))
    return p


def _read(path):
    return json.loads(path.read_text())


class TestSimulate:
    def test_outputs(self, config, tmp_path, capsys):
        out = tmp_path / "out"
        assert run(["simulate", "--config", str(config), "--output-dir", str(out)]) == 0
        assert {p.name for p in out.iterdir()} == {
            "config_echo.json", "manifest.json", "report.json", "timeseries.csv", "timeseries.json"}
        cols = read_timeseries_csv(out / "timeseries.csv")
        assert tuple(cols) == CSV_COLUMNS
        assert cols["t"][-1] == pytest.approx(0.05)
        assert cols["mass"][0] == pytest.approx(0.81 * 2 * math.pi, abs=1e-8)
        manifest = _read(out / "manifest.json")
        assert manifest["command"] == "simulate"
        assert "timeseries.csv" in manifest["files"]
        assert json.loads(capsys.readouterr().out)["drift"]["mass_relative"] <= 1e-10

    def test_reruns_are_byte_identical(self, config, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert run(["simulate", "--config", str(config), "--output-dir", str(d)]) == 0
        for p in a.iterdir():
            assert p.read_bytes() == (b / p.name).read_bytes(), p.name

    def test_override(self, config, tmp_path):
        out = tmp_path / "o"
        assert run(["simulate", "--config", str(config), "--set", "initial.a=0.5",
                    "--set", "equation=original", "--output-dir", str(out)]) == 0
        echo = _read(out / "config_echo.json")["config"]
        assert echo["initial"]["a"] == 0.5 and echo["equation"] == "original"

    @pytest.mark.parametrize("override", ["bogus=1", "initial.a=0", "grid.n=1000", "dt=-1", "equation=kdv"])
    def test_invalid_config_exits_2(self, config, tmp_path, override, capsys):
        code = run(["simulate", "--config", str(config), "--set", override, "--output-dir", str(tmp_path)])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_missing_required_keys(self, tmp_path):
        assert run(["simulate", "--output-dir", str(tmp_path)]) == 2

    def test_missing_file(self, tmp_path):
        assert run(["simulate", "--config", str(tmp_path / "nope.json")]) == 2

    def test_unknown_command(self):
        assert run(["integrate"]) == 2


class TestAnalysisCommands:
    def test_gn_verify_Q(self, tmp_path, capsys):
        assert run(["gn-verify", "--field", "Q", "--output-dir", str(tmp_path)]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["field"]["gn1"]["ratio"] == pytest.approx(1.0, abs=1e-8)
        assert _read(tmp_path / "report.json") == rep

    def test_gn_verify_random(self, tmp_path, capsys):
        assert run(["gn-verify", "--field", "gaussian", "--random", "20", "--seed", "7",
                    "--output-dir", str(tmp_path)]) == 0
        assert _read(tmp_path / "manifest.json")["seed"] == 7

    def test_invariants(self, tmp_path, capsys):
        assert run(["invariants", "--field", "Q", "--output-dir", str(tmp_path)]) == 0
        rep = json.loads(capsys.readouterr().out)["field"]
        assert rep["f"] == pytest.approx(4 / math.sqrt(math.pi), abs=1e-8)
        assert rep["bound_alpha_1"]["slack"] == pytest.approx(3.295631180452831, abs=1e-8)

    def test_gauge_check_rejects_Q_on_default_box(self, tmp_path, capsys):
        assert run(["gauge-check", "--field", "Q", "--output-dir", str(tmp_path)]) == 2
        assert "boundary contamination" in capsys.readouterr().err

    def test_gauge_check_gaussian(self, tmp_path, capsys):
        assert run(["gauge-check", "--field", "gaussian", "--output-dir", str(tmp_path)]) == 0

    def test_ground_state(self, tmp_path, capsys):
        assert run(["ground-state", "--L", "80", "--n", "2048", "--output-dir", str(tmp_path)]) == 0
        assert "Q" in json.dumps(json.loads(capsys.readouterr().out))

    def test_ground_state_box_too_small(self, tmp_path):
        assert run(["ground-state", "--L", "10", "--n", "256", "--output-dir", str(tmp_path)]) == 2


class TestCubic:
    def test_threshold_example(self, tmp_path, capsys):
        assert run(["cubic", "--m0", "12.566370614", "--output-dir", str(tmp_path)]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["gwp_verdict"] == "at_or_above"
        assert rep["at_boundary"] is True

    def test_above(self, tmp_path, capsys):
        assert run(["cubic", "--m0", str(6 * math.pi), "--output-dir", str(tmp_path)]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["X1"] == pytest.approx(5.816908217711081, rel=1e-10)
        assert rep["bracket_ok"] is True

    def test_requires_m0(self, tmp_path):
        assert run(["cubic", "--output-dir", str(tmp_path)]) == 2

    def test_rejects_nonpositive_mass(self, tmp_path):
        assert run(["cubic", "--m0", "-1", "--output-dir", str(tmp_path)]) == 2


class TestSweepAndConvergence:
    def test_sweep_layout(self, config, tmp_path, capsys):
        out = tmp_path / "s"
        assert run(["sweep", "--config", str(config), "--amplitudes", "0.8,1.0",
                    "--output-dir", str(out)]) == 0
        assert (out / "run_a=0.8" / "manifest.json").exists()
        assert (out / "run_a=1" / "timeseries.csv").exists()
        summary = _read(out / "sweep_summary.json")
        assert len(summary["runs"]) == 2

    def test_sweep_rejects_zero(self, config, tmp_path):
        assert run(["sweep", "--config", str(config), "--amplitudes", "0,1",
                    "--output-dir", str(tmp_path)]) == 2

    def test_convergence(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"equation": "original", "initial": {"family": "gaussian"}, "t_final": 0.2}))
        assert run(["convergence", "--config", str(cfg), "--dts", "0.02,0.01,0.005",
                    "--output-dir", str(tmp_path / "o")]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["status"] == "ok"
        assert rep["slope"] == pytest.approx(4.0, abs=0.3)


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dnls_lab", "cubic", "--m0", str(2 * math.pi),
                           "--output-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["gwp_verdict"] == "below_threshold"
