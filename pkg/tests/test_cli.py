import json

import numpy as np
import pytest

from nhkitaev import cli


def run(args, tmp_path, name="out"):
    out = tmp_path / name
    status = cli.main(list(args) + ["--out", str(out)])
    return status, out


class TestConfig:
    def test_valid(self):
        cfg = cli.parse_config(["spectrum", "--J", "1", "--delta-a", "1.5", "--delta-b", "0.5", "--N", "8"])
        assert cfg.params.N == 8 and cfg.params.delta_a == 1.5 and cfg.command == "spectrum"

    def test_odd_N(self, capsys):
        assert cli.main(["spectrum", "--N", "7"]) == cli.EXIT_CONFIG
        assert "N must be even" in capsys.readouterr().err

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# test\nN = 8\ndelta-a = 1.25\n")
        cfg = cli.parse_config(["spectrum", "--config", str(path), "--N", "16"])
        assert cfg.params.N == 16 and cfg.params.delta_a == 1.25
        assert cfg.sources["N"] == "flag" and cfg.sources["delta_a"] == "file"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("sites = 8\n")
        with pytest.raises(cli.ConfigError, match="unknown key"):
            cli.parse_config(["spectrum", "--config", str(path)])

    def test_type_mismatch(self):
        with pytest.raises(cli.ConfigError, match="N"):
            cli.parse_config(["spectrum", "--N", "eight"])

    def test_bad_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("N 8\n")
        with pytest.raises(cli.ConfigError):
            cli.parse_config(["spectrum", "--config", str(path)])

    def test_missing_file(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_config(["spectrum", "--config", "/nonexistent/run.cfg"])

    @pytest.mark.parametrize("argv", [
        ["spectrum", "--mu", "0.1"],
        ["spin-check", "--sites", "7"],
        ["spin-check", "--sites", "14"],
        ["fixed-line-drive", "--dt", "0"],
        ["quench-scan", "--threshold", "1.5"],
        ["quench-scan", "--scan", "ratio", "--values", "-1,2"],
        ["zero-modes", "--branch", "up"],
        ["oracle-verify", "--N", "8"],
        ["no-such-command"],
    ])
    def test_constraint_errors(self, argv):
        assert cli.main(argv) == cli.EXIT_CONFIG


class TestCommands:
    def test_spectrum(self, tmp_path):
        status, out = run(["spectrum", "--delta-a", "1.5", "--delta-b", "0.5", "--N", "8"], tmp_path)
        assert status == 0
        lines = (out / "spectrum.csv").read_text().splitlines()
        assert lines[0] == "k,rho,sigma,re,im" and len(lines) == 1 + 3 * 4
        meta = json.loads((out / "spectrum.json").read_text())
        assert meta["result"]["max_eig_mismatch"] <= 1e-10 and meta["config"]["N"] == 8

    def test_ground_state(self, tmp_path):
        status, out = run(["ground-state", "--N", "8", "--delta-a", "1.5", "--delta-b", "0.5"], tmp_path)
        meta = json.loads((out / "ground_state.json").read_text())
        assert status == 0 and meta["result"]["energy"] == pytest.approx(-16.0)

    def test_zero_modes(self, tmp_path):
        status, out = run(["zero-modes", "--J", "1", "--delta-a", "2", "--delta-b", "0", "--N", "8",
                           "--branch", "minus"], tmp_path)
        assert status == 0
        meta = json.loads((out / "zero_modes.json").read_text())
        assert max(meta["result"]["residuals"].values()) <= 1e-10
        rows = (out / "edge_profile.csv").read_text().splitlines()
        assert rows[0] == "site,sublattice,re,im,abs" and len(rows) == 1 + 32

    def test_spin_check(self, tmp_path):
        status, out = run(["spin-check", "--sites", "8"], tmp_path)
        assert status == 0
        text = (out / "spin_check.csv").read_text()
        assert "H0 GHZ+ = -6" in text and "H0 GHZ- = -8" in text and "false" not in text

    def test_heisenberg(self, tmp_path):
        status, _ = run(["heisenberg-check", "--sites", "6"], tmp_path)
        assert status == 0

    def test_ladder(self, tmp_path):
        status, out = run(["ladder-energy", "--delta-a", "3", "--delta-b", "1", "--N", "64"], tmp_path)
        assert status == 0

    def test_oracle(self, tmp_path):
        status, out = run(["oracle-verify", "--N", "2", "--delta-a", "1.5", "--delta-b", "0.5"], tmp_path)
        assert status == 0
        assert (out / "oracle_verify.csv").read_text().count("true") == 5

    def test_fixed_line_drive(self, tmp_path):
        status, out = run(["fixed-line-drive", "--zeta", "0", "--dt", "0.002", "--T", "1", "--N", "4"], tmp_path)
        assert status == 0
        data = np.loadtxt(out / "fidelity.csv", delimiter=",", skiprows=1)
        assert np.abs(data[:, 1] - 1).max() <= 1e-6

    def test_drive_off_fixed_line_reports_failure(self, tmp_path):
        # zeta != 0 moves delta_a + delta_b in time, so the fidelity leaves 1
        status, out = run(["fixed-line-drive", "--zeta", "0.5", "--dt", "0.01", "--T", "2", "--N", "4"], tmp_path)
        assert status == cli.EXIT_COMPUTE
        meta = json.loads((out / "fixed_line_drive.json").read_text())
        assert meta["result"]["max_deviation_from_one"] > 1e-3

    def test_quench_scan_deterministic(self, tmp_path):
        args = ["quench-scan", "--N", "4", "--delta-a", "1.5", "--delta-b", "0.5", "--values", "0,0.01",
                "--t-max", "5", "--t-points", "11"]
        s1, o1 = run(args, tmp_path, "a")
        s2, o2 = run(args + ["--workers", "2"], tmp_path, "b")
        assert s1 == s2 == 0
        assert (o1 / "quench_scan.csv").read_bytes() == (o2 / "quench_scan.csv").read_bytes()
        header = (o1 / "quench_scan.csv").read_text().splitlines()[0]
        assert header == "t,0,0.01"

    def test_float_format(self):
        assert cli.fmt(0.1) == "0.10000000000000001" and cli.fmt(2) == "2" and cli.fmt(None) == ""

    def test_module_entry(self, tmp_path):
        import subprocess
        import sys
        proc = subprocess.run([sys.executable, "-m", "nhkitaev", "spin-check", "--sites", "4",
                               "--out", str(tmp_path)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
