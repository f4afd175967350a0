"""Density-matrix reconstruction for both transfer directions.

Photon -> atom: six-gate atom tomography at several mean photon numbers,
least-squares Bloch vectors, then the slope of each component against
``|alpha|^2`` gives the single-photon estimate.

Atom -> photon: overlap integrals of reflected amplitudes against reference
amplitudes form a 2x2 matrix ``eta`` that is generally non-Hermitian; the
closest physical density matrix (in Bloch-vector distance) is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qmath import (ID2, SX, SY, BlochVector, DensityMatrix2, bloch_to_density,
                    density_to_bloch, project_to_ball)
from .signal import Waveform, overlap

P_EXCITED = np.diag([0.0, 1.0]).astype(complex)


class DegenerateAbscissaeError(ValueError):
    pass


@dataclass(frozen=True)
class TomoGate:
    index: int
    label: str
    unitary: np.ndarray = field(repr=False)


def tomo_gates() -> list[TomoGate]:
    """Identity, a pi pulse, and four pi/2 pulses about equatorial axes.

    ``U_j = (I - i cos(j pi/2) sx - i sin(j pi/2) sy) / sqrt(2)`` for j = 3..6.
    """
    gates = [TomoGate(1, "I", ID2.copy()), TomoGate(2, "X", SX.copy())]
    for j in range(3, 7):
        u = (ID2 - 1j * np.cos(j * np.pi / 2) * SX - 1j * np.sin(j * np.pi / 2) * SY) / np.sqrt(2)
        gates.append(TomoGate(j, f"pi/2 #{j - 2}", np.round(u, 15)))
    return gates


def gate_probabilities(rho: DensityMatrix2) -> np.ndarray:
    """Excitation probability after each tomography gate (ideal readout)."""
    m = rho.matrix
    return np.array([np.trace(P_EXCITED @ g.unitary @ m @ g.unitary.conj().T).real
                     for g in tomo_gates()])


@dataclass(frozen=True)
class TomographyRecord:
    p_tilde: np.ndarray
    alpha_sq: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        p = np.array(self.p_tilde, dtype=float)
        if p.shape != (6,):
            raise ValueError("a tomography record holds six probabilities")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError(f"probabilities outside [0, 1]: {p}")
        if self.alpha_sq < 0:
            raise ValueError("mean photon number must be non-negative")
        p.setflags(write=False)
        object.__setattr__(self, "p_tilde", p)


def raw_bloch(r: TomographyRecord) -> BlochVector:
    """Unconstrained least-squares Bloch vector (may lie outside the ball)."""
    p = r.p_tilde
    return BlochVector(p[2] - p[4], p[3] - p[5], p[0] - p[1])


def tomo_bloch(r: TomographyRecord) -> BlochVector:
    return project_to_ball(raw_bloch(r))


def slope_fit(points) -> float:
    """Least-squares slope from the closed-form normal equations.

    ``slope = (N C2 - C3 C4) / (N C1 - C3^2)`` with ``C1 = sum x^2``,
    ``C2 = sum x y``, ``C3 = sum x``, ``C4 = sum y``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    if np.unique(x).size < 2:
        raise DegenerateAbscissaeError("slope needs at least two distinct photon numbers")
    n = x.size
    c1, c2, c3, c4 = np.sum(x * x), np.sum(x * y), np.sum(x), np.sum(y)
    return float((n * c2 - c3 * c4) / (n * c1 - c3 ** 2))


def photon_to_atom_bloch(records, initial: BlochVector = BlochVector(0, 0, -1)) -> BlochVector:
    """Single-photon Bloch estimate from slopes against ``|alpha|^2``.

    ``b = slope(a) + a_initial``; the default initial atom state ``|g>``
    gives ``b_z = slope(a_z) - 1`` and ``b_x, b_y`` equal to the slopes.
    For another initial atom state pass its (measured) Bloch vector.
    """
    records = list(records)
    a = np.array([tomo_bloch(r).as_array() for r in records])
    x = np.array([r.alpha_sq for r in records])
    slopes = [slope_fit(np.column_stack([x, a[:, k]])) for k in range(3)]
    return project_to_ball(BlochVector.from_array(np.array(slopes) + initial.as_array()))


def photon_to_atom_estimate(records,
                            initial: BlochVector = BlochVector(0, 0, -1)) -> DensityMatrix2:
    return bloch_to_density(photon_to_atom_bloch(records, initial), "atom")


@dataclass(frozen=True)
class EtaMatrix:
    """Overlap matrix ``eta_ij = <zeta_i|xi_j>`` over (L, H)."""

    ll: complex
    lh: complex
    hl: complex
    hh: complex
    normalized: bool = False

    def __post_init__(self):
        if not np.all(np.isfinite([self.ll, self.lh, self.hl, self.hh])):
            raise ValueError("eta entries must be finite")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.ll, self.lh], [self.hl, self.hh]], dtype=complex)

    def normalize(self) -> "EtaMatrix":
        tr = self.ll + self.hh
        scale = max(abs(self.ll), abs(self.lh), abs(self.hl), abs(self.hh))
        if scale == 0 or abs(tr) < 1e-12 * scale:
            raise ValueError("eta has vanishing trace; no photon reached the detector")
        return EtaMatrix(self.ll / tr, self.lh / tr, self.hl / tr, self.hh / tr, True)


def eta_build(zeta_l: Waveform, zeta_h: Waveform, xi_l: Waveform, xi_h: Waveform) -> EtaMatrix:
    """Trace-normalized overlap matrix from reference and measured amplitudes."""
    return EtaMatrix(overlap(zeta_l, xi_l), overlap(zeta_l, xi_h),
                     overlap(zeta_h, xi_l), overlap(zeta_h, xi_h)).normalize()


def eta_bloch(eta: EtaMatrix) -> BlochVector:
    """Bloch vector minimizing the distance to ``eta`` (before projection)."""
    return BlochVector((eta.lh + eta.hl).real, (eta.lh - eta.hl).imag, (eta.hh - eta.ll).real)


def hermitize(eta: EtaMatrix) -> DensityMatrix2:
    """Closest physical photon density matrix to a normalized ``eta``."""
    if not eta.normalized:
        raise ValueError("normalize eta before hermitizing")
    return bloch_to_density(project_to_ball(eta_bloch(eta)), "photon")


def average_density(rhos) -> DensityMatrix2:
    rhos = list(rhos)
    if not rhos:
        raise ValueError("cannot average an empty list")
    basis = rhos[0].basis
    if any(r.basis != basis for r in rhos):
        raise ValueError("density matrices are on different bases")
    m = np.mean([r.matrix for r in rhos], axis=0)
    return DensityMatrix2(m / np.trace(m).real, basis)


def amplitude_damp(rho: DensityMatrix2, duration: float, t1: float) -> DensityMatrix2:
    """Free T1 relaxation of an atom state for ``duration`` ns."""
    if duration == 0 or np.isinf(t1):
        return rho
    v = density_to_bloch(rho).as_array()
    d = np.exp(-duration / t1)
    return bloch_to_density(BlochVector(v[0] * np.sqrt(d), v[1] * np.sqrt(d),
                                        (v[2] + 1) * d - 1), rho.basis)


def measure_tomography(rho: DensityMatrix2, alpha_sq: float, assignment=None,
                       shots: int | None = None, rng: np.random.Generator | None = None,
                       meta: dict | None = None) -> TomographyRecord:
    """Simulated six-gate readout of an atom state.

    ``assignment[m, k]`` mixes the ideal probabilities; with ``shots`` the
    result is a seeded binomial sample.
    """
    p = gate_probabilities(rho)
    if assignment is not None:
        a = np.asarray(assignment)
        p = a[1, 1] * p + a[1, 0] * (1 - p)
    p = np.clip(p, 0.0, 1.0)
    if shots is not None:
        if rng is None:
            raise ValueError("finite-shot readout needs a seeded generator")
        p = rng.binomial(shots, p) / shots
    return TomographyRecord(p, alpha_sq, dict(meta or {}))
