"""Shared oracle data and expensive fixtures."""

import numpy as np
import pytest

from ramanswap.config import ExperimentConfig
from ramanswap.experiments import prepare

# Atom tomography for the photon state (L - iH)/sqrt(2): |alpha|^2, p1..p6, a_x, a_y, a_z
TOMOGRAPHY_TABLE = [
    (0.0000, (0.0371, 0.9226, 0.4953, 0.4965, 0.4812, 0.4821), (0.0141, 0.0144, -0.8855)),
    (0.1950, (0.0721, 0.8306, 0.4795, 0.5452, 0.4823, 0.4124), (-0.0028, 0.1328, -0.7585)),
    (0.4992, (0.1950, 0.7358, 0.4800, 0.6442, 0.4697, 0.3084), (0.0103, 0.3358, -0.5408)),
]
SLOPE_ESTIMATE = dict(b=(-0.0032, 0.6459, -0.3074), rho_ee=0.3463, rho_eg=-0.0016 - 0.3229j)

# Overlap matrices for the atom state (g - ie)/sqrt(2):
# |alpha|^2, eta_LL, eta_LH, eta_HL, eta_HH, rho_HH, rho_HL, fidelity
ETA_TABLE = [
    (0.048, 0.515 + 0.057j, -0.095 + 0.187j, -0.003 - 0.277j, 0.485 - 0.057j, 0.485, -0.049 - 0.232j, 0.732),
    (0.101, 0.509 + 0.043j, -0.113 + 0.215j, 0.042 - 0.333j, 0.491 - 0.043j, 0.491, -0.036 - 0.274j, 0.774),
    (0.163, 0.502 + 0.056j, -0.106 + 0.204j, 0.030 - 0.282j, 0.498 - 0.056j, 0.498, -0.038 - 0.243j, 0.743),
    (0.206, 0.503 + 0.058j, -0.121 + 0.162j, 0.038 - 0.330j, 0.497 - 0.058j, 0.497, -0.042 - 0.246j, 0.746),
]
ETA_AVERAGE = (0.493, -0.041 - 0.249j, 0.749)


@pytest.fixture(scope="session")
def p2a_setup():
    """Matched photon->atom device, noise off."""
    return prepare(ExperimentConfig(t1_ns=np.inf))



def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
