import csv
import json
import subprocess
import sys

import pytest

from vqx.cli import main


def run(*argv):
    return main([str(a) for a in argv])


class TestRun:
    def test_print_config(self, capsys):
        assert run("run", "--case", 7, "--r-min", 0.5, "--r-max", 1.0, "--step", 0.25, "--samples", 3,
                   "--print-config") == 0
        cfg = json.loads(capsys.readouterr().out)
        assert (cfg["case"], cfg["molecule"], cfg["method"]) == (7, "HeH", "vqe")
        assert cfg["bond_lengths"] == [0.5, 0.75, 1.0]
        assert cfg["samples"] == 3

    def test_overrides(self, capsys):
        run("run", "--case", 1, "--deflation", 2.5, "--no-deflation-shift", "--max-updates", 9, "--print-config")
        cfg = json.loads(capsys.readouterr().out)
        assert cfg["objective"] == {"deflation_coefficient": 2.5, "deflation_shift": False}
        assert cfg["optimizer"] == {"max_updates": 9}

    def test_config_file(self, tmp_path, capsys):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"case": 4, "bond_lengths": [0.7], "samples": 1}))
        assert run("run", "--config", p, "--seed", 5, "--print-config") == 0
        cfg = json.loads(capsys.readouterr().out)
        assert (cfg["method"], cfg["seed"], cfg["bond_lengths"]) == ("ssvqe", 5, [0.7])

    def test_end_to_end(self, tmp_path, capsys):
        out = tmp_path / "res"
        assert run("run", "--case", 4, "--r-min", 0.7, "--r-max", 0.9, "--step", 0.2, "--samples", 1,
                   "--out", out) == 0
        assert "case 4: 8 records (0 failed)" in capsys.readouterr().out
        rows = list(csv.DictReader((out / "energies.csv").open()))
        assert len(rows) == 8 and {r["status"] for r in rows} == {"ok"}
        assert run("plot", out) == 0
        printed = capsys.readouterr().out.split()
        assert any(p.endswith("energy_case4.svg") for p in printed)
        assert (out / "accuracy_case4.svg").exists()

    @pytest.mark.parametrize("argv", [
        ("run",),
        ("run", "--case", 13),
        ("run", "--case", 1, "--molecule", "HeH"),
        ("run", "--case", 1, "--r-min", 2.0, "--r-max", 1.0),
    ])
    def test_usage_errors_exit_2(self, argv, capsys):
        assert run(*argv) == 2
        assert "vqx: error:" in capsys.readouterr().err

    def test_bad_config_file(self, tmp_path, capsys):
        p = tmp_path / "c.json"
        p.write_text("{not json")
        assert run("run", "--config", p) == 2


class TestSpectrum:
    def test_h2(self, capsys):
        assert run("spectrum", "--molecule", "H2", "--r", 0.7) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "index,energy,N,Sz,S2"
        assert len(lines) == 17
        k, e, n, sz, s2 = lines[1].split(",")
        assert (n, sz, s2) == ("2.0000", "+0.0000", "0.0000")
        assert float(e) == pytest.approx(-1.1361894, abs=1e-6)

    def test_csv(self, tmp_path, capsys):
        p = tmp_path / "s.csv"
        assert run("spectrum", "--molecule", "HeH", "--r", 0.8, "--csv", p) == 0
        assert len(p.read_text().splitlines()) == 17

    def test_plot_missing_dir(self, tmp_path, capsys):
        assert run("plot", tmp_path / "nope") == 2


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "vqx.cli", "spectrum", "--r", "1.0"], capture_output=True, text=True,
                         check=True).stdout
    assert out.startswith("index,energy,N,Sz,S2")
