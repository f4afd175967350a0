import math
from pathlib import Path

import numpy as np
import pytest

from ramanswap.config import ConfigError, ExperimentConfig, default_alpha_sq
from ramanswap.model import TWO_PI

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_ini_roundtrip():
    c = ExperimentConfig(t1_ns=math.inf, readout_fg=0.95, omega_l_ghz=10.2, omega_h_ghz=10.26,
                         rabi_ghz=0.03, cardinals=(0, 2), alpha_sq=(0.01, 0.1))
    assert ExperimentConfig.from_ini(c.to_ini()) == c


@pytest.mark.parametrize("column", ["p2a", "a2p"])
def test_shipped_configs_match_defaults(column):
    c = ExperimentConfig.load(CONFIGS / f"{column}.ini")
    assert c == ExperimentConfig.device(column, out_dir=f"runs/{column}")


def test_unit_conversion():
    c = ExperimentConfig()
    p = c.system
    assert p.omega_r == pytest.approx(TWO_PI * c.omega_r_ghz)
    assert 2 * p.chi == pytest.approx(TWO_PI * c.chi2_ghz)
    assert p.kappa == pytest.approx(TWO_PI * c.kappa_ghz)
    assert c.timing.dt == c.dt_ns and c.timing.frame == pytest.approx(TWO_PI * c.frame_ghz)
    assert c.noise.t1_atom == 900.0
    assert c.carriers is None
    assert ExperimentConfig(omega_l_ghz=1.0, omega_h_ghz=2.0).carriers == (TWO_PI, 2 * TWO_PI)


def test_derived_values_cached():
    c = ExperimentConfig()
    assert c.system is c.system
    assert c.noise is c.noise


def test_partial_ini_uses_defaults():
    c = ExperimentConfig.from_ini("[battery]\nexperiment = a2p\n[noise]\nt1_ns = inf\n")
    assert c.experiment == "a2p"
    assert c.alpha_sq == default_alpha_sq("a2p")
    assert math.isinf(c.t1_ns)
    assert c.kappa_ghz == ExperimentConfig().kappa_ghz


@pytest.mark.parametrize("text, match", [
    ("[mystery]\nx = 1\n", "unknown section"),
    ("[system]\nkappa = 0.024\n", "unknown key"),
    ("[system]\nkappa_ghz = fast\n", "kappa_ghz"),
    ("[drive]\nauto_match = maybe\n", "auto_match"),
    ("not an ini file", "malformed"),
    ("[battery]\nexperiment = swap\n", "unknown experiment"),
    ("[battery]\nalpha_sq = 0.1, 0.9\n", "alpha_sq"),
    ("[pulse]\nomega_l_ghz = 10.2\n", "both carrier"),
    ("[drive]\nauto_match = false\n", "rabi_ghz"),
])
def test_bad_ini_rejected(text, match):
    with pytest.raises(ConfigError, match=match):
        ExperimentConfig.from_ini(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        ExperimentConfig.load(tmp_path / "absent.ini")


def test_replace_and_thetas():
    c = ExperimentConfig().replace(theta_steps=4)
    assert c.theta_steps == 4
    assert c.thetas == pytest.approx(np.pi / 2 * np.arange(5))
    with pytest.raises(ConfigError):
        c.replace(threads=0)
