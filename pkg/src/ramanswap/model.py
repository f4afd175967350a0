"""Bare and dressed eigenstructure of the driven atom-resonator system.

Units: angular frequencies in rad/ns (``2*pi*GHz``) and times in ns.

Frame used for the four-level model: the atom rotates at the drive frequency
``omega_d`` and the resonator is *not* rotated, so the dressed energies of the
one-photon states sit near ``omega_r`` and a dressed energy difference
``E_j - E_i`` is directly the lab-frame frequency of the photon emitted in
``j -> i``. The drive only couples ``g <-> e`` inside a photon-number sector,
so the two sectors are independent 2x2 problems::

    H = (omega_ge - omega_d) s+s- + omega_r a+a - 2 chi a+a s+s- + (Omega/2)(s+ + s-)

Basis order of the four-level space: ``|g,0>, |e,0>, |g,1>, |e,1>``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
BARE_LABELS = ("g0", "e0", "g1", "e1")
# dressed level -> bare state it connects to adiabatically (index in BARE_LABELS)
ADIABATIC_LABELS = {1: "g0", 2: "e0", 3: "e1", 4: "g1"}
RAMP_STEPS = 200
_a4 = np.zeros((4, 4))
_a4[0, 2] = _a4[1, 3] = 1.0


class LabelingError(RuntimeError):
    """Adiabatic continuation could not assign dressed labels unambiguously."""


@dataclass(frozen=True)
class SystemParams:
    """Atom-resonator-waveguide constants (rad/ns and ns).

    ``chi`` is the dispersive shift itself; tables usually quote ``2*chi/2pi``.
    """

    omega_r: float
    omega_ge: float
    chi: float
    kappa: float
    t1_atom: float = np.inf
    t_phi: float = np.inf

    def __post_init__(self):
        if self.omega_r <= 0 or self.omega_ge <= 0:
            raise ValueError("frequencies must be positive")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.chi == 0:
            raise ValueError("chi must be nonzero")
        if not (self.t1_atom > 0 and self.t_phi > 0):
            raise ValueError("decoherence times must be positive (or inf)")
        if abs(2 * self.chi) > 0.1 * abs(self.omega_r - self.omega_ge):
            warnings.warn("|2 chi| is not small compared to |omega_r - omega_ge|; "
                          "the dispersive model may be inaccurate", stacklevel=3)

    @classmethod
    def from_ghz(cls, omega_r, omega_ge, chi2, kappa, t1_ns=np.inf, tphi_ns=np.inf):
        """Build from cyclic frequencies in GHz, with ``chi2 = 2*chi/2pi``."""
        return cls(TWO_PI * omega_r, TWO_PI * omega_ge, TWO_PI * chi2 / 2,
                   TWO_PI * kappa, t1_ns, tphi_ns)


@dataclass(frozen=True)
class DriveParams:
    omega_d: float
    rabi: float = 0.0

    def __post_init__(self):
        if self.rabi < 0:
            raise ValueError("drive amplitude must be non-negative")

    @classmethod
    def from_ghz(cls, omega_d, rabi=0.0):
        return cls(TWO_PI * omega_d, TWO_PI * rabi)


# Device characterization for the two experiments (GHz). kappa and omega_r are common.
DEVICE = {
    "p2a": dict(omega_r=10.258, omega_ge=5.839, chi2=0.073, kappa=0.024,
                omega_d=5.785, omega_L=10.208, omega_H=10.266),
    "a2p": dict(omega_r=10.258, omega_ge=5.835, chi2=0.073, kappa=0.024,
                omega_d=5.775, omega_L=10.201, omega_H=10.263),
}


def device_system(column="p2a", t1_ns=np.inf, tphi_ns=np.inf) -> SystemParams:
    c = DEVICE[column]
    return SystemParams.from_ghz(c["omega_r"], c["omega_ge"], c["chi2"], c["kappa"],
                                 t1_ns, tphi_ns)


def device_drive(column="p2a") -> DriveParams:
    return DriveParams.from_ghz(DEVICE[column]["omega_d"])


def bare_frequency(p: SystemParams, atom_state: str, n: int) -> float:
    """Lab-frame eigenfrequency of ``|atom_state, n>`` (``n`` in {0, 1})."""
    if n not in (0, 1):
        raise ValueError(f"photon number {n} outside the {{0, 1}} truncation")
    if atom_state == "g":
        return n * p.omega_r
    if atom_state == "e":
        return p.omega_ge + n * (p.omega_r - 2 * p.chi)
    raise ValueError(f"atom state must be 'g' or 'e', got {atom_state!r}")


def dressed_hamiltonian(p: SystemParams, d: DriveParams) -> np.ndarray:
    """4x4 rotating-frame Hamiltonian over ``|g,0>, |e,0>, |g,1>, |e,1>``."""
    delta = p.omega_ge - d.omega_d
    h = np.diag([0.0, delta, p.omega_r, p.omega_r + delta - 2 * p.chi])
    h[0, 1] = h[1, 0] = h[2, 3] = h[3, 2] = d.rabi / 2
    return h


@dataclass(frozen=True)
class DressedSolution:
    """Dressed levels 1..4 (arrays indexed 0..3) and their radiative rates.

    ``vectors[:, k]`` is dressed level ``k+1`` over the bare basis.
    ``rates[(j, i)]`` is the ``j -> i`` decay rate for ``j in (3, 4)``, ``i in (1, 2)``.
    """

    params: SystemParams
    drive: DriveParams
    energies: np.ndarray
    vectors: np.ndarray
    rates: dict = field(repr=False)
    labels: dict = field(default_factory=lambda: dict(ADIABATIC_LABELS), repr=False)

    def transition(self, j: int, i: int) -> float:
        """Frequency of the photon emitted in ``j -> i``."""
        return float(self.energies[j - 1] - self.energies[i - 1])

    @property
    def omega_41(self) -> float:
        return self.transition(4, 1)

    @property
    def omega_42(self) -> float:
        return self.transition(4, 2)

    def matrix_element(self, i: int, j: int) -> float:
        """``<i~|a|j~>`` in the truncated space (real: H is real symmetric)."""
        return float(self.vectors[:, i - 1] @ _a4 @ self.vectors[:, j - 1])


def _track_block(h_of_rabi, rabis, start):
    """Eigen-decompose a 2x2 block along a ramp, following overlaps.

    ``start`` holds the Omega=0 eigenvectors (columns) in label order.
    Returns label-ordered energies and vectors at the end of the ramp.
    """
    ws, vs = np.linalg.eigh(np.array([h_of_rabi(om) for om in rabis[1:]]))
    prevs = np.concatenate([start[None], vs[:-1]])
    ov = np.abs(np.einsum("kia,kib->kab", prevs, vs)) ** 2
    swapped = ov[:, 0, 1] > ov[:, 0, 0]
    best = np.where(swapped, ov[:, 0, 1], ov[:, 0, 0])
    if best.min() < 0.9:
        k = int(np.argmin(best))
        raise LabelingError(
            f"ambiguous dressed-state continuation at Omega={rabis[k + 1]:.6g} rad/ns "
            f"(overlaps {ov[k].round(3).tolist()}); degenerate bare levels?")
    order = [1, 0] if np.count_nonzero(swapped) % 2 else [0, 1]
    w, v = ws[-1][order], vs[-1][:, order]
    # sign: positive component on the bare state each label connects to
    v = v * np.sign(np.sum(start * v, axis=0))
    return w, v


def dressed_solve(p: SystemParams, d: DriveParams, ramp_steps: int = RAMP_STEPS) -> DressedSolution:
    """Diagonalize the driven four-level model and compute radiative rates.

    Dressed labels follow the eigenvectors by maximum-overlap continuation
    along a linear ramp of the drive amplitude from zero.
    """
    delta = p.omega_ge - d.omega_d
    delta1 = delta - 2 * p.chi
    rabis = np.linspace(0.0, d.rabi, max(ramp_steps, 2) + 1)

    def block0(om):
        return np.array([[0.0, om / 2], [om / 2, delta]])

    def block1(om):
        return np.array([[p.omega_r, om / 2], [om / 2, p.omega_r + delta1]])

    # labels 1, 2 <- g0, e0 ; labels 3, 4 <- e1, g1
    e0, v0 = np.array([0.0, delta]), np.eye(2)
    e1, v1 = np.array([p.omega_r + delta1, p.omega_r]), np.eye(2)[:, ::-1]
    if d.rabi > 0:
        e0, v0 = _track_block(block0, rabis, v0)
        e1, v1 = _track_block(block1, rabis, v1)

    vectors = np.zeros((4, 4))
    vectors[0:2, 0:2] = v0
    vectors[2:4, 2:4] = v1
    energies = np.concatenate([e0, e1])
    rates = {}
    for j in (3, 4):
        for i in (1, 2):
            m = vectors[:, i - 1] @ _a4 @ vectors[:, j - 1]
            rates[(j, i)] = p.kappa * m ** 2
    return DressedSolution(p, d, energies, vectors, rates)


def transition_frequencies(s: DressedSolution) -> tuple[float, float]:
    """``(omega_L, omega_H) = (omega_42, omega_41)``."""
    w42, w41 = s.omega_42, s.omega_41
    if not w41 > w42:
        raise ValueError("omega_41 <= omega_42: dressed labels are inconsistent")
    return w42, w41


def mismatch(s: DressedSolution) -> float:
    """Sum of squared deviations of the four rates from ``kappa/2``."""
    half = s.params.kappa / 2
    return float(sum((g - half) ** 2 for g in s.rates.values()))


def rate_surface(p: SystemParams, rabis, omega_ds) -> np.ndarray:
    """Mismatch on a grid, shape ``(len(rabis), len(omega_ds))``, row-major by grid index.

    Points where the dressed labels are ambiguous (degenerate bare levels) are NaN.
    """
    out = np.empty((len(rabis), len(omega_ds)))
    for i, om in enumerate(rabis):
        for j, wd in enumerate(omega_ds):
            try:
                out[i, j] = mismatch(dressed_solve(p, DriveParams(wd, om)))
            except LabelingError:
                out[i, j] = np.nan
    return out


@dataclass(frozen=True)
class MatchResult:
    drive: DriveParams
    solution: DressedSolution
    mismatch: float
    converged: bool
    iterations: int
    message: str = ""


class MatchError(RuntimeError):
    def __init__(self, msg, result: MatchResult):
        super().__init__(msg)
        self.result = result


def find_impedance_match(p: SystemParams, guess: DriveParams, grid_points: int = 201,
                         max_iter: int = 2000) -> MatchResult:
    """Find a drive point where all four radiative rates equal ``kappa/2``.

    The matched set is a curve in the (Omega, omega_d) plane, so the result
    depends on the seed: a coarse scan over Omega at the guessed drive
    frequency picks the starting point and Nelder-Mead then settles on the
    nearest point of that curve. Coordinates are scaled by ``kappa``.
    Converged when the mismatch is below ``(1e-4 kappa)^2``.
    """
    k = p.kappa
    delta = p.omega_ge - guess.omega_d
    span = 2 * (abs(delta) + abs(delta - 2 * p.chi)) + k
    scan = np.linspace(0, span, grid_points)[1:]
    if guess.rabi > 0:
        scan = np.append(scan, guess.rabi)

    def objective(x):
        om, wd = x[0] * k, guess.omega_d + x[1] * k
        if om < 0:
            return 1.0 + om ** 2
        try:
            return mismatch(dressed_solve(p, DriveParams(wd, om))) / k ** 2
        except LabelingError:
            return 1.0

    costs = [objective((om / k, 0.0)) for om in scan]
    x0 = np.array([scan[int(np.argmin(costs))] / k, 0.0])
    step = 0.02
    simplex = np.array([x0, x0 + [step, 0], x0 + [0, step]])
    res = minimize(objective, x0, method="Nelder-Mead",
                   options=dict(initial_simplex=simplex, xatol=1e-10, fatol=1e-16,
                                maxiter=max_iter, maxfev=4 * max_iter))
    drive = DriveParams(guess.omega_d + res.x[1] * k, abs(res.x[0]) * k)
    sol = dressed_solve(p, drive)
    m = mismatch(sol)
    converged = m < (1e-4 * k) ** 2
    result = MatchResult(drive, sol, m, converged, int(res.nit), str(res.message))
    log.info("impedance match: Omega/2pi=%.6f GHz omega_d/2pi=%.6f GHz M=%.3g (%s)",
             drive.rabi / TWO_PI, drive.omega_d / TWO_PI, m,
             "converged" if converged else "not converged")
    return result


def matched_drive(p: SystemParams, guess: DriveParams) -> DriveParams:
    """Like :func:`find_impedance_match` but raise :class:`MatchError` if it fails."""
    r = find_impedance_match(p, guess)
    if not r.converged:
        raise MatchError(f"impedance match did not converge (M={r.mismatch:.3g})", r)
    return r.drive


def with_kappa(p: SystemParams, kappa: float) -> SystemParams:
    return replace(p, kappa=kappa)
