import csv

import numpy as np
import pytest

from ramanswap import dynamics as dyn
from ramanswap import experiments as E
from ramanswap.config import ExperimentConfig
from ramanswap.dynamics import (DriveRamp, IntegrationError, NoiseParams, StepSizeError,
                                evolve, output_amplitude, pulse_conversion, run_swap,
                                steady_reflection)
from ramanswap.model import TWO_PI, DriveParams, device_system
from ramanswap.qmath import PureQubitState, cardinal_states, fidelity
from ramanswap.signal import DT, Waveform, fft_spectrum, gaussian_envelope, time_grid

ATOMS = cardinal_states("atom")
PHOTONS = cardinal_states("photon")
G, EXC, PLUS_X = ATOMS[0], ATOMS[1], ATOMS[2]
L, H = PHOTONS[0], PHOTONS[1]


def swap(s, atom, photon, alpha_sq, noise=None, **kw):
    noise = s.noise if noise is None else noise
    return run_swap(s.p, s.d, atom, photon, np.sqrt(alpha_sq), noise, s.timing, s.carriers,
                    **kw)


def band_split(s, w):
    """Output power below and above the midpoint of the two carriers."""
    spec = fft_spectrum(w)
    mid = (np.mean(s.carriers) - spec.frame) / TWO_PI
    return spec.band_power(-np.inf, mid), spec.band_power(mid, np.inf)


def silent_input(p, t_stop=400.0):
    return Waveform(DT, np.zeros(time_grid(0, t_stop, DT).size), p.omega_r, 0.0)


# ---------------------------------------------------------------- evolve

def test_zero_input_ground_state_is_stationary():
    p = device_system("p2a")
    traj = evolve(p, DriveRamp.constant(DriveParams(TWO_PI * 5.785, 0.0)), silent_input(p), G)
    target = np.zeros((6, 6))
    target[0, 0] = 1
    assert np.max(np.abs(traj.rhos - target)) < 1e-14


def test_zero_input_pure_t1_decay():
    p = device_system("p2a")
    ramp = DriveRamp.constant(DriveParams(TWO_PI * 5.785, 0.0))
    traj = evolve(p, ramp, silent_input(p, 2000.0), EXC, NoiseParams(t1_atom=900.0))
    ree = traj.atom_matrices()[:, 1, 1].real
    expected = np.exp(-traj.times / 900.0)
    assert np.max(np.abs(ree / expected - 1)) < 1e-6


def test_trace_and_hermiticity_every_sample(p2a_setup):
    r = swap(p2a_setup, PLUS_X, PHOTONS[2], 0.1, noise=NoiseParams(t1_atom=900.0, t_phi=2000.0))
    rhos = r.trajectory.rhos
    assert np.max(np.abs(np.trace(rhos, axis1=1, axis2=2) - 1)) < 1e-9
    assert np.max(np.abs(rhos - rhos.conj().transpose(0, 2, 1))) < 1e-10


def test_step_size_validation():
    p = device_system("p2a")
    ramp = DriveRamp.constant(DriveParams(TWO_PI * 5.785, 0.2))
    coarse = Waveform(2.0, np.zeros(50), p.omega_r, 0.0)
    with pytest.raises(StepSizeError, match="samples per period"):
        evolve(p, ramp, coarse, G, substeps=1)
    with pytest.raises(ValueError, match="rotating-wave"):
        evolve(p, ramp, Waveform(DT, np.zeros(10), p.omega_r + TWO_PI * 2, 0.0), G)
    with pytest.raises(ValueError, match="atom state"):
        evolve(p, ramp, silent_input(p), PureQubitState(1, 0, "photon"))


def test_trace_drift_aborts(monkeypatch):
    p = device_system("p2a")
    real = dyn.kernel.rk4_lindblad

    def leaky(*args):
        out = real(*args)
        out[-1] *= 1.01
        return out

    monkeypatch.setattr(dyn.kernel, "rk4_lindblad", leaky)
    with pytest.raises(IntegrationError, match="trace drift"):
        evolve(p, DriveRamp.constant(DriveParams(TWO_PI * 5.785, 0.0)), silent_input(p), G)


def test_step_halving_drift(p2a_setup):
    a = swap(p2a_setup, PLUS_X, PHOTONS[2], 0.1)
    b = swap(p2a_setup, PLUS_X, PHOTONS[2], 0.1, substeps=2 * dyn.SUBSTEPS)
    assert np.max(np.abs(a.atom.matrix - b.atom.matrix)) < 1e-6
    assert np.max(np.abs(a.output.samples - b.output.samples)) < 1e-6


# ---------------------------------------------------------------- output field

def test_drive_off_far_detuned_mirror():
    p = device_system("p2a")
    grid = time_grid(-400, 400, DT)
    delta = TWO_PI * 0.3
    env = 0.3 * gaussian_envelope(100.0, grid)
    w = Waveform(DT, env * np.exp(-1j * delta * grid), p.omega_r, grid[0])
    traj = evolve(p, DriveRamp.constant(DriveParams(TWO_PI * 5.785, 0.0)), w, G)
    xi = output_amplitude(traj, w, p)
    core = env > 0.05 * env.max()
    assert np.abs(xi.samples[core]) == pytest.approx(env[core], rel=0.02)


def test_output_amplitude_grid_check(p2a_setup):
    r = swap(p2a_setup, G, L, 0.01)
    with pytest.raises(ValueError, match="grid"):
        output_amplitude(r.trajectory, r.input.to_frame(r.input.frame + 0.1), p2a_setup.p)


def test_excited_atom_reflects_unchanged(p2a_setup):
    r = swap(p2a_setup, EXC, H, 0.05)
    lo, hi = band_split(p2a_setup, r.output)
    assert lo < 1e-3 * hi
    peak = np.max(np.abs(r.input.samples))
    assert np.max(np.abs(np.abs(r.output.samples) - np.abs(r.input.samples))) < 0.02 * peak


def test_ground_atom_residual_at_omega_h(p2a_setup):
    # the converted photon carries no mean field, so the residual is referred to the input
    r = swap(p2a_setup, G, H, 0.05)
    lo, hi = band_split(p2a_setup, r.output)
    assert hi < 0.05 * r.input.photons
    assert lo < 1e-6 * r.input.photons


def test_flux_conservation_elastic(p2a_setup):
    r = swap(p2a_setup, EXC, H, 0.05)
    assert r.output.photons + r.residual == pytest.approx(r.input.photons, rel=0.01)
    p = device_system("p2a")
    grid = time_grid(-400, 400, DT)
    w = Waveform(DT, 0.3 * gaussian_envelope(100.0, grid).astype(complex), p.omega_r, grid[0])
    traj = evolve(p, DriveRamp.constant(DriveParams(TWO_PI * 5.785, 0.0)), w, G)
    xi = output_amplitude(traj, w, p)
    assert xi.photons + traj.photon_number[-1] == pytest.approx(w.photons, rel=0.01)


# (g, H) and (e, L) are the swap's conversion channels, whose mean field is not linear
@pytest.mark.parametrize("atom, photon", [(G, L), (EXC, H)], ids=["g-L", "e-H"])
def test_output_linear_in_alpha_elastic(p2a_setup, atom, photon):
    a = swap(p2a_setup, atom, photon, 0.025).output.samples
    b = swap(p2a_setup, atom, photon, 0.1).output.samples
    assert np.max(np.abs(b - 2 * a)) < 0.01 * np.max(np.abs(b))


# ---------------------------------------------------------------- steady reflection

def test_reflection_far_detuned(p2a_setup):
    s = p2a_setup
    sol = s.match.solution
    for w in (sol.omega_41 + 40 * s.p.kappa, sol.omega_42 - 40 * s.p.kappa):
        assert abs(steady_reflection(s.p, s.d, w, 1, sol)) > 0.99


def test_reflection_branch_two_at_omega_41(p2a_setup):
    s = p2a_setup
    sol = s.match.solution
    assert abs(steady_reflection(s.p, s.d, sol.omega_41, 2, sol)) > 0.98


def test_reflection_null_is_omega_h(p2a_setup):
    s = p2a_setup
    assert abs(steady_reflection(s.p, s.d, s.carriers[1], 1, s.match.solution)) < 1e-6


def test_reflection_dip_at_omega_41(p2a_setup):
    s = p2a_setup
    sol = s.match.solution
    assert abs(steady_reflection(s.p, s.d, sol.omega_41, 1, sol)) < 0.02


def test_reflection_drive_off_is_unit_modulus():
    p = device_system("p2a")
    d = DriveParams(TWO_PI * 5.785, 0.0)
    w = p.omega_r + p.kappa * np.linspace(-5, 5, 11)
    assert np.abs(steady_reflection(p, d, w, 1)) == pytest.approx(np.ones(11), abs=1e-12)
    with pytest.raises(ValueError):
        steady_reflection(p, d, p.omega_r, 3)


# ---------------------------------------------------------------- run_swap

def test_ground_atom_low_photon_stays_ground(p2a_setup):
    for a2 in (0.01, 0.05):
        r = swap(p2a_setup, G, L, a2)
        assert fidelity(G, r.atom) > 0.99


@pytest.mark.parametrize("alpha_sq, bound", [(0.05, 0.95), (0.101, 0.9)])
def test_raman_conversion_efficiency(p2a_setup, alpha_sq, bound):
    r = swap(p2a_setup, G, H, alpha_sq)
    assert r.atom["e", "e"].real / alpha_sq > bound


def test_conversion_agrees_with_linear_response(p2a_setup):
    s = p2a_setup
    r = swap(s, G, H, 0.01)
    oracle = pulse_conversion(s.p, s.d, fft_spectrum(r.input), 1, s.match.solution)
    assert r.atom["e", "e"].real / 0.01 == pytest.approx(oracle, rel=0.01)


def test_excited_population_slope(p2a_setup):
    # coherent-input saturation bends the curve by about 1% at |alpha|^2 = 0.02
    a2 = np.array([0.0025, 0.005, 0.0075, 0.01])
    pe = np.array([swap(p2a_setup, G, H, x).atom["e", "e"].real for x in a2])
    slope, icpt = np.polyfit(a2, pe, 1)
    assert abs(icpt) < 1e-4
    assert pe / a2 == pytest.approx(np.full(a2.size, slope), rel=0.01)


def test_superposed_atom_dichromatic_output(p2a_setup):
    lo, hi = band_split(p2a_setup, swap(p2a_setup, PLUS_X, H, 0.05).output)
    assert lo == pytest.approx(hi, rel=0.05)


def test_leakage_and_residual_reported(p2a_setup):
    r = swap(p2a_setup, PLUS_X, PHOTONS[2], 0.1)
    assert 0 < r.leakage < 1e-2
    assert r.residual < dyn.RESIDUAL_LIMIT and not r.flagged


def test_weak_pulse_limit(p2a_setup):
    with pytest.raises(ValueError, match="weak-pulse"):
        swap(p2a_setup, G, H, 0.6)


def test_photon_pulse_requires_photon_state():
    with pytest.raises(ValueError, match="photon basis"):
        dyn.photon_pulse(G, 0.1, (1.0, 2.0), dyn.SwapTiming())


def test_trajectory_csv(tmp_path, p2a_setup):
    r = swap(p2a_setup, G, H, 0.01)
    path = tmp_path / "traj.csv"
    r.trajectory.write_csv(path, r.output)
    with open(path) as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t_ns", "re_a", "im_a", "rho_ee", "re_xi", "im_xi"]
    assert len(rows) - 1 == len(r.input)
    last = [float(v) for v in rows[-1]]
    assert last[4] + 1j * last[5] == pytest.approx(r.output.samples[-1], abs=1e-15)


def test_noise_params_validation():
    with pytest.raises(ValueError):
        NoiseParams(t1_atom=0.0)
    with pytest.raises(ValueError):
        NoiseParams(tomo_duration=-1.0)
    with pytest.raises(ValueError, match="stochastic"):
        NoiseParams(assignment=np.array([[0.9, 0.2], [0.2, 0.8]]))
    assert NoiseParams().is_off
    m = NoiseParams.readout_fidelities(0.95, 0.9).assignment
    assert m.sum(axis=0) == pytest.approx([1, 1])


# ---------------------------------------------------------------- ideal limit

def scaled_setup(scale):
    """Narrow the linewidth and stretch every time scale by the same factor."""
    return E.prepare(ExperimentConfig(t1_ns=np.inf, kappa_ghz=0.024 / scale,
                                      t_p_ns=100.0 * scale, margin_ns=100.0 * scale,
                                      edge_fwhm_ns=40.0 * scale))


def test_fidelity_improves_towards_ideal_limit():
    # kappa small against the dressed-level spacings recovers the ideal Lambda system
    avgs = []
    for scale in (1, 2, 4):
        b = E.cardinal_battery(scaled_setup(scale), 0.01)
        avgs.append((b.p2a_average, b.a2p_average))
    p2a, a2p = np.array(avgs).T
    assert np.all(np.diff(p2a) > 0) and np.all(np.diff(a2p) > 0)
    assert p2a[-1] > 0.95 and a2p[-1] > 0.94
