import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from ramanswap import cli
from ramanswap import experiments as E
from ramanswap.model import find_impedance_match

SMALL_P2A = """
[battery]
experiment = p2a
alpha_sq = 0.0, 0.1
cardinals = 0, 2
theta_steps = 4
[noise]
shots = 400
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL_P2A)
    return str(path)


def outputs(out_dir):
    """Data files of a run, keyed by name (the record's timings are excluded)."""
    out = {p.name: p.read_bytes() for p in Path(out_dir).glob("*.csv")}
    rec = json.loads((Path(out_dir) / "record.json").read_text())
    return out, rec["results"]


def test_help_and_bad_arguments(capsys):
    assert cli.main(["--help"]) == cli.EXIT_OK
    assert cli.main(["nonsense"]) == cli.EXIT_CONFIG
    assert cli.main([]) == cli.EXIT_CONFIG


def test_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[system]\nkappa = 1\n")
    assert cli.main(["match", "--config", str(bad), "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "unknown key" in capsys.readouterr().err
    assert cli.main(["match", "--seed", "-1", "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_match_failure_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(E, "find_impedance_match",
                        lambda p, g: find_impedance_match(p, g, grid_points=3, max_iter=2))
    assert cli.main(["p2a", "--out", str(tmp_path)]) == cli.EXIT_MATCH
    assert "impedance match failed" in capsys.readouterr().err


def test_match_command_outputs(tmp_path, capsys):
    assert cli.main(["match", "--out", str(tmp_path)]) == cli.EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["experiment"] == "match"
    assert (tmp_path / "match.json").exists() and (tmp_path / "rate_surface.csv").exists()
    rec = json.loads((tmp_path / "record.json").read_text())
    assert rec["backend"] in ("cython", "python")
    assert rec["version"]


def test_same_seed_is_bit_identical(tmp_path, small_config, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["p2a", "--config", small_config, "--out", str(d), "--seed", "5"]) == 0
    assert outputs(a) == outputs(b)
    c = tmp_path / "c"
    assert cli.main(["p2a", "--config", small_config, "--out", str(c), "--seed", "6"]) == 0
    assert outputs(c)[0]["tomography_px.csv"] != outputs(a)[0]["tomography_px.csv"]


def test_workers_match_serial(tmp_path, small_config, capsys):
    a, b = tmp_path / "serial", tmp_path / "pool"
    assert cli.main(["p2a", "--config", small_config, "--out", str(a)]) == 0
    assert cli.main(["p2a", "--config", small_config, "--out", str(b), "--threads", "2"]) == 0
    assert outputs(a) == outputs(b)


def test_estimate_roundtrip(tmp_path, small_config, capsys):
    run = tmp_path / "run"
    assert cli.main(["p2a", "--config", small_config, "--out", str(run)]) == 0
    capsys.readouterr()
    est = tmp_path / "est"
    code = cli.main(["estimate", "--tomography", str(run / "tomography_px.csv"),
                     "--target", "+x", "--out", str(est)])
    assert code == cli.EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    saved = json.loads((est / "estimate.json").read_text())
    assert printed == saved
    assert 0.5 < saved["fidelity"] <= 1.0


def test_estimate_argument_errors(tmp_path, capsys):
    assert cli.main(["estimate", "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    missing = str(tmp_path / "none.csv")
    assert cli.main(["estimate", "--tomography", missing, "--out", str(tmp_path)]) == 2


def test_console_script_entry(tmp_path):
    out = subprocess.run([sys.executable, "-m", "ramanswap.cli", "levels", "--out",
                          str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    rows = np.loadtxt(tmp_path / "levels.csv", delimiter=",", skiprows=1)
    assert rows.shape == (81, 10)
