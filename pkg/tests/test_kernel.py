import os
import subprocess
import sys

import numpy as np
import pytest

from ramanswap import kernel
from ramanswap.dynamics import A_OP, DIM, N_OP, SM_OP

needs_ext = pytest.mark.skipif(kernel.BACKEND != "cython", reason="compiled kernel not built")


def random_problem(steps=40, substeps=2, seed=7):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=DIM) + 1j * rng.normal(size=DIM)
    psi /= np.linalg.norm(psi)
    rho0 = np.outer(psi, psi.conj())
    jumps = np.array([np.sqrt(0.15) * A_OP, np.sqrt(1 / 900) * SM_OP])
    h0 = 0.3 * N_OP - 0.1 * SM_OP.conj().T @ SM_OP
    heff0 = h0 - 0.5j * sum(c.conj().T @ c for c in jumps)
    hd = 0.5 * (SM_OP + SM_OP.conj().T)
    pin = 1j * np.sqrt(0.15) * A_OP.conj().T
    n = 2 * substeps * steps + 1
    om = 0.2 * np.sin(np.linspace(0, 3, n))
    ain = 0.05 * np.exp(1j * np.linspace(0, 9, n))
    return rho0, heff0, hd, pin, jumps, om, ain, 0.0625, substeps


def test_python_kernel_shape_and_trace():
    args = random_problem()
    out = kernel.rk4_lindblad_python(*args)
    assert out.shape == (41, DIM, DIM)
    assert np.array_equal(out[0], args[0])
    assert np.abs(np.trace(out, axis1=1, axis2=2) - 1).max() < 1e-12


def test_substep_grid_checked():
    args = list(random_problem(steps=2, substeps=2))
    args[-1] = 3
    with pytest.raises(ValueError):
        kernel.rk4_lindblad_python(*args)


@needs_ext
def test_compiled_matches_python():
    args = random_problem()
    a = kernel.rk4_lindblad_python(*args)
    b = kernel.rk4_lindblad(*args)
    assert np.max(np.abs(a - b)) < 1e-12


def test_pure_python_switch():
    env = dict(os.environ, RAMANSWAP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from ramanswap import kernel; print(kernel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
