"""Time-domain simulation of the driven atom-resonator system under pulsed input.

State space: atom (g, e) x resonator Fock states n <= 2, ordered
``index = 2*n + atom`` so the first four entries match the four-level model.

Frames: the atom rotates at the drive frequency ``omega_d`` and the resonator
at the input waveform's reference frequency ``omega_f``::

    H = Delta s+s- + (omega_r - omega_f) a+a - 2 chi a+a s+s-
        + (Omega(t)/2)(s+ + s-) + i sqrt(kappa) (alpha_in(t) a+ - h.c.)

with ``Delta = omega_ge - omega_d``. The reflected field is
``xi = alpha_in - sqrt(kappa) <a>``.

"Qubit frame" atom states rotate at ``omega_ge`` with the absolute time
origin of the grid (t = 0 at the photon-pulse centre in :func:`run_swap`):
``rho_eg(qubit) = rho_eg(drive frame) * exp(i Delta t)``.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from . import kernel
from .model import DressedSolution, DriveParams, SystemParams, dressed_solve, mismatch
from .qmath import SZ, DensityMatrix2, PureQubitState
from .signal import (CARRIER, DT, EDGE_FWHM, FWHM_TO_SIGMA, PULSE_LENGTH, PulseSpec,
                     Spectrum, Waveform, build_photon_pulse, flat_top_envelope, time_grid)

log = logging.getLogger(__name__)

FOCK_LEVELS = 3
DIM = 2 * FOCK_LEVELS
TRACE_ABORT = 1e-6
RESIDUAL_LIMIT = 0.01
SAMPLES_PER_PERIOD = 20
# RK4 steps per grid interval; dt/2 keeps the step-halving drift below 1e-6
SUBSTEPS = 2
RAMP_MARGIN = 100.0                # ns between drive plateau edge and pulse support
WINDOW_TAIL = 5.0                  # ramp-edge sigmas kept beyond the plateau boundary
TOMO_DURATION = 3 * 20.0 + 300.0   # ns: three pi-pulse slots plus readout


def _operators(n_fock=FOCK_LEVELS):
    a = np.kron(np.diag(np.sqrt(np.arange(1, n_fock)), 1), np.eye(2))
    sm = np.kron(np.eye(n_fock), np.array([[0, 1], [0, 0]]))
    sz = np.kron(np.eye(n_fock), SZ.real)
    return a.astype(complex), sm.astype(complex), sz.astype(complex)


A_OP, SM_OP, SZ_OP = _operators()
N_OP = A_OP.conj().T @ A_OP
PE_OP = SM_OP.conj().T @ SM_OP


class IntegrationError(RuntimeError):
    pass


class StepSizeError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseParams:
    """Atom decoherence and readout imperfections.

    ``assignment[m, k]`` is the probability of reading ``m`` given true state
    ``k`` (0 = g, 1 = e). ``tomo_duration`` (ns) applies amplitude damping
    before the tomography gates; 0 means instantaneous, perfect gates.
    """

    t1_atom: float = np.inf
    t_phi: float = np.inf
    assignment: np.ndarray | None = None
    tomo_duration: float = 0.0

    def __post_init__(self):
        if not (self.t1_atom > 0 and self.t_phi > 0):
            raise ValueError("decoherence times must be positive or inf")
        if self.tomo_duration < 0:
            raise ValueError("tomography duration must be non-negative")
        if self.assignment is not None:
            m = np.array(self.assignment, dtype=float)
            if m.shape != (2, 2) or np.any(m < 0) or not np.allclose(m.sum(axis=0), 1, atol=1e-12):
                raise ValueError("assignment matrix must be 2x2 column-stochastic")
            object.__setattr__(self, "assignment", m)

    @property
    def is_off(self) -> bool:
        return (np.isinf(self.t1_atom) and np.isinf(self.t_phi) and self.assignment is None
                and self.tomo_duration == 0)

    @classmethod
    def readout_fidelities(cls, f_g: float, f_e: float, **kw) -> "NoiseParams":
        """Assignment matrix from the probabilities of reading each state correctly."""
        return cls(assignment=np.array([[f_g, 1 - f_e], [1 - f_g, f_e]]), **kw)

    def collapse_operators(self) -> list[np.ndarray]:
        ops = []
        if np.isfinite(self.t1_atom):
            ops.append(np.sqrt(1 / self.t1_atom) * SM_OP)
        if np.isfinite(self.t_phi):
            ops.append(np.sqrt(1 / (2 * self.t_phi)) * SZ_OP)
        return ops


@dataclass(frozen=True)
class DriveRamp:
    """Flat-top drive with Gaussian-smoothed edges; ``rabi = 0`` switches it off."""

    omega_d: float
    rabi: float
    plateau_start: float
    plateau_stop: float
    edge_fwhm: float = EDGE_FWHM

    @classmethod
    def constant(cls, d: DriveParams) -> "DriveRamp":
        return cls(d.omega_d, d.rabi, -np.inf, np.inf, 0.0)

    def envelope(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.rabi == 0:
            return np.zeros_like(t)
        if np.isinf(self.plateau_start):
            return np.ones_like(t)
        return flat_top_envelope(self.plateau_stop - self.plateau_start, t, self.edge_fwhm,
                                 self.plateau_start)

    def __call__(self, t) -> np.ndarray:
        return self.rabi * self.envelope(t)


@dataclass(frozen=True)
class SimState:
    rho: np.ndarray = field(repr=False)
    t: float


@dataclass(frozen=True)
class Trajectory:
    """Density matrices on the input grid, in the drive/waveform frames."""

    times: np.ndarray = field(repr=False)
    rhos: np.ndarray = field(repr=False)
    input: Waveform = field(repr=False)
    delta: float          # omega_ge - omega_d, for qubit-frame conversion
    kappa: float

    @property
    def a_expect(self) -> np.ndarray:
        return np.einsum("ij,kji->k", A_OP, self.rhos)

    @property
    def photon_number(self) -> np.ndarray:
        return np.einsum("ij,kji->k", N_OP, self.rhos).real

    @property
    def two_photon_population(self) -> np.ndarray:
        return self.rhos[:, 4, 4].real + self.rhos[:, 5, 5].real

    @property
    def trace(self) -> np.ndarray:
        return np.trace(self.rhos, axis1=1, axis2=2)

    def atom_matrices(self, frame: str = "drive") -> np.ndarray:
        """Reduced atom matrices, shape ``(n, 2, 2)``; ``frame`` is 'drive' or 'qubit'."""
        r = self.rhos.reshape(-1, FOCK_LEVELS, 2, FOCK_LEVELS, 2)
        m = np.einsum("knanb->kab", r)
        if frame == "qubit":
            ph = np.exp(1j * self.delta * self.times)
            m[:, 1, 0] *= ph
            m[:, 0, 1] *= ph.conj()
        elif frame != "drive":
            raise ValueError(f"unknown frame {frame!r}")
        return m

    @property
    def atom_bloch(self) -> np.ndarray:
        m = self.atom_matrices()
        return np.stack([2 * m[:, 1, 0].real, -2 * m[:, 1, 0].imag,
                         (m[:, 1, 1] - m[:, 0, 0]).real], axis=1)

    def final_state(self) -> SimState:
        return SimState(self.rhos[-1], float(self.times[-1]))

    def write_csv(self, path, xi: Waveform | None = None) -> None:
        """Columns ``t_ns, re_a, im_a, rho_ee, re_xi, im_xi``."""
        a = self.a_expect
        ree = self.atom_matrices()[:, 1, 1].real
        xs = xi.samples if xi is not None else self.input.samples - np.sqrt(self.kappa) * a
        with open(path, "w", newline="") as f:
            out = csv.writer(f)
            out.writerow(["t_ns", "re_a", "im_a", "rho_ee", "re_xi", "im_xi"])
            for row in zip(self.times, a.real, a.imag, ree, xs.real, xs.imag):
                out.writerow(["%.17g" % v for v in row])


def max_frequency(p: SystemParams, ramp: DriveRamp, frame: float) -> float:
    """Largest angular frequency the integrator must resolve (rad/ns)."""
    delta = p.omega_ge - ramp.omega_d
    return max(abs(delta), abs(delta - 2 * p.chi), ramp.rabi, p.kappa, abs(p.omega_r - frame))


def _qubit_to_drive_frame(psi: PureQubitState, delta: float, t: float) -> np.ndarray:
    v = psi.as_array()
    return np.array([v[0], v[1] * np.exp(-1j * delta * t)])


def evolve(p: SystemParams, ramp: DriveRamp, input: Waveform, init: PureQubitState,
           noise: NoiseParams = NoiseParams(), substeps: int = SUBSTEPS) -> Trajectory:
    """Integrate the master equation over the grid of ``input``.

    ``init`` is the atom state in the qubit frame at the first grid time; the
    resonator starts in vacuum. Each grid interval is split into ``substeps``
    RK4 steps (the input is cubic-spline interpolated, the drive is analytic).
    """
    if init.basis != "atom":
        raise ValueError("initial state must be an atom state")
    if abs(input.frame - p.omega_r) > 2 * np.pi * 1.0:
        raise ValueError("waveform frame is more than 1 GHz from the resonator: "
                         "outside the rotating-wave model")
    f_max = max_frequency(p, ramp, input.frame) / (2 * np.pi)
    h = input.dt / substeps
    if h * f_max * SAMPLES_PER_PERIOD > 1:
        raise StepSizeError(f"step {h:g} ns resolves f_max={f_max:.4g} GHz with fewer than "
                            f"{SAMPLES_PER_PERIOD} samples per period")
    if len(input) < 2:
        raise StepSizeError("input waveform needs at least two samples")

    times = input.times
    fine = times[0] + (h / 2) * np.arange(2 * substeps * (len(input) - 1) + 1)
    if substeps == 1:
        ain = np.empty(fine.size, dtype=complex)
        ain[::2] = input.samples
        ain[1::2] = CubicSpline(times, input.samples)(fine[1::2])
    else:
        ain = CubicSpline(times, input.samples)(fine)
        ain[::2 * substeps] = input.samples
    om = ramp(fine)

    delta = p.omega_ge - ramp.omega_d
    h0 = (delta * PE_OP + (p.omega_r - input.frame) * N_OP - 2 * p.chi * N_OP @ PE_OP)
    jumps = [np.sqrt(p.kappa) * A_OP] + noise.collapse_operators()
    heff0 = h0 - 0.5j * sum(c.conj().T @ c for c in jumps)
    hd = 0.5 * (SM_OP + SM_OP.conj().T)
    pin = 1j * np.sqrt(p.kappa) * A_OP.conj().T

    atom = _qubit_to_drive_frame(init, delta, times[0])
    psi = np.kron(np.eye(FOCK_LEVELS)[0], atom)
    rho0 = np.outer(psi, psi.conj())
    rhos = kernel.rk4_lindblad(rho0, heff0, hd, pin, np.array(jumps), om, ain, h, substeps)

    drift = np.abs(np.trace(rhos, axis1=1, axis2=2) - 1)
    k = int(np.argmax(drift))
    if drift[k] > TRACE_ABORT or not np.all(np.isfinite(drift)):
        raise IntegrationError(f"trace drift {drift[k]:.3g} at t={times[k]:.3f} ns "
                               f"(step {h:g} ns, backend {kernel.BACKEND})")
    return Trajectory(times, rhos, input, delta, p.kappa)


def output_amplitude(traj: Trajectory, input: Waveform, p: SystemParams) -> Waveform:
    """Reflected field ``xi = alpha_in - sqrt(kappa) <a>`` on the input grid."""
    if not traj.input.same_grid(input) or not np.isclose(traj.input.frame, input.frame):
        raise ValueError("trajectory was not produced on this input's grid and frame")
    return Waveform(input.dt, input.samples - np.sqrt(p.kappa) * traj.a_expect,
                    input.frame, input.t0)


# ---------------------------------------------------------------- linear response

def steady_reflection(p: SystemParams, d: DriveParams, omega, branch: int = 1,
                      solution: DressedSolution | None = None):
    """Weak-probe elastic reflection coefficient of the dressed system.

    The system sits in dressed level ``branch`` (1 or 2) and a probe at lab
    frequency ``omega`` couples it to levels 3 and 4::

        r = 1 - sum_j G_j,branch / (G_j/2 - i (omega - omega_j,branch))

    with ``G_j = G_j1 + G_j2`` the radiative width of level ``j``.
    """
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    s = solution if solution is not None else dressed_solve(p, d)
    if d.rabi > 0 and mismatch(s) > (1e-2 * p.kappa) ** 2:
        log.warning("steady_reflection at an unmatched drive point (M=%.3g)", mismatch(s))
    w = np.asarray(omega, dtype=float)
    r = np.ones_like(w, dtype=complex)
    for j in (3, 4):
        width = s.rates[(j, 1)] + s.rates[(j, 2)]
        r = r - s.rates[(j, branch)] / (width / 2 - 1j * (w - s.transition(j, branch)))
    return complex(r) if r.ndim == 0 else r


def raman_carriers(p: SystemParams, d: DriveParams,
                   solution: DressedSolution | None = None) -> tuple[float, float]:
    """Input carriers ``(omega_L, omega_H)`` for the swap.

    ``omega_H`` is the elastic-reflection null near ``omega_41`` (pulled off
    ``omega_41`` by the neighbouring level 3); ``omega_L`` sits one
    ground-doublet splitting ``E_2 - E_1`` below it so that the same
    intermediate state is reached from level 2.
    """
    s = solution if solution is not None else dressed_solve(p, d)
    w41 = s.omega_41
    res = minimize_scalar(lambda w: abs(steady_reflection(p, d, w, 1, s)) ** 2,
                          bounds=(w41 - p.kappa, w41 + p.kappa), method="bounded",
                          options=dict(xatol=1e-12))
    w_h = float(res.x)
    return w_h - s.transition(2, 1), w_h


def pulse_conversion(p: SystemParams, d: DriveParams, spectrum: Spectrum, branch: int = 1,
                     solution: DressedSolution | None = None) -> float:
    """Non-elastic (Raman) fraction ``<1 - |r|^2>`` weighted by a pulse spectrum."""
    w = spectrum.frame + 2 * np.pi * spectrum.freqs
    weight = np.abs(spectrum.values) ** 2
    r = steady_reflection(p, d, w, branch, solution)
    return float(np.sum(weight * (1 - np.abs(r) ** 2)) / np.sum(weight))


# ---------------------------------------------------------------- full gate

@dataclass(frozen=True)
class SwapTiming:
    """Pulse and drive-ramp timing; t = 0 is the photon-pulse centre."""

    t_p: float = PULSE_LENGTH
    dt: float = DT
    edge_fwhm: float = EDGE_FWHM
    margin: float = RAMP_MARGIN
    frame: float = CARRIER

    @property
    def pulse_halfwidth(self) -> float:
        return 3 * self.t_p * FWHM_TO_SIGMA

    @property
    def plateau_half(self) -> float:
        return self.pulse_halfwidth + self.margin

    @property
    def window_half(self) -> float:
        ramp = self.plateau_half + WINDOW_TAIL * self.edge_fwhm * FWHM_TO_SIGMA
        half = max(ramp, 3 * self.t_p)
        return self.dt * np.ceil(half / self.dt - 1e-9)

    def grid(self) -> np.ndarray:
        w = self.window_half
        return time_grid(-w, w, self.dt)

    def ramp(self, d: DriveParams) -> DriveRamp:
        return DriveRamp(d.omega_d, d.rabi, -self.plateau_half, self.plateau_half, self.edge_fwhm)


@dataclass(frozen=True)
class SwapResult:
    atom: DensityMatrix2
    output: Waveform = field(repr=False)
    input: Waveform = field(repr=False)
    trajectory: Trajectory = field(repr=False)
    leakage: float         # peak two-photon population
    residual: float        # resonator photon number at the end
    flagged: bool          # residual above RESIDUAL_LIMIT


def reduced_atom(rho: np.ndarray) -> np.ndarray:
    m = np.einsum("nanb->ab", rho.reshape(FOCK_LEVELS, 2, FOCK_LEVELS, 2))
    m = (m + m.conj().T) / 2
    return m / np.trace(m).real


def photon_pulse(photon: PureQubitState, alpha: complex, carriers, timing: SwapTiming) -> Waveform:
    if photon.basis != "photon":
        raise ValueError("photon state must be in the photon basis")
    spec = PulseSpec(tuple(carriers), (photon.first, photon.second), alpha, timing.t_p)
    return build_photon_pulse(spec, timing.grid(), timing.frame)


def run_swap(p: SystemParams, d: DriveParams, atom_init: PureQubitState,
             photon_init: PureQubitState, alpha: complex, noise: NoiseParams = NoiseParams(),
             timing: SwapTiming = SwapTiming(), carriers=None,
             substeps: int = SUBSTEPS) -> SwapResult:
    """Drive ramp-on, photon-pulse scattering, ramp-off.

    Returns the reduced atom state in the qubit frame at the end of the
    window and the reflected field. ``carriers`` defaults to
    :func:`raman_carriers` at ``d``.
    """
    if abs(alpha) ** 2 > 0.5:
        raise ValueError("|alpha|^2 > 0.5 is outside the weak-pulse regime")
    if carriers is None:
        carriers = raman_carriers(p, d)
    pulse = photon_pulse(photon_init, alpha, carriers, timing)
    traj = evolve(p, timing.ramp(d), pulse, atom_init, noise, substeps)
    xi = output_amplitude(traj, pulse, p)
    m = traj.atom_matrices("qubit")[-1]
    m = (m + m.conj().T) / 2
    atom = DensityMatrix2(m / np.trace(m).real, "atom")
    residual = float(traj.photon_number[-1])
    flagged = residual > RESIDUAL_LIMIT
    if flagged:
        log.warning("resonator still holds %.3g photons at the end of the window", residual)
    return SwapResult(atom, xi, pulse, traj, float(traj.two_photon_population.max()),
                      residual, flagged)
