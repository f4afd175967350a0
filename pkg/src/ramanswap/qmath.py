"""Two-level state algebra: Bloch vectors, density matrices, fidelity.

One global convention is used for every two-level basis in the package.
The basis is ordered ``(first, second)`` and ``sigma_z = +1`` on the
*second* element, i.e. ``|e>`` for the atom and ``|omega_H>`` for the photon::

    rho = (I + x*SX + y*SY + z*SZ) / 2
    rho[1, 1] = (1 + z) / 2
    rho[1, 0] = (x - i*y) / 2

This is the usual right-handed Bloch sphere with the second state at the
north pole, so ``rho_ee = (1 + a_z)/2`` and ``rho_eg = <e|rho|g> = (a_x - i a_y)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BASES = {"atom": ("g", "e"), "photon": ("L", "H")}

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SZ = np.array([[-1, 0], [0, 1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

PHYSICAL_TOL = 1e-9
TRACE_TOL = 1e-12
EIG_TOL = 1e-12


class NonPhysicalStateError(ValueError):
    """Raised when a Bloch vector lies outside the unit ball."""


class BasisMismatchError(ValueError):
    pass


def _check_basis(basis: str) -> str:
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}; expected one of {sorted(BASES)}")
    return basis


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for k in ("x", "y", "z"):
            object.__setattr__(self, k, float(getattr(self, k)))
        if not np.all(np.isfinite([self.x, self.y, self.z])):
            raise ValueError("Bloch vector components must be finite")

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @property
    def is_physical(self) -> bool:
        return self.norm <= 1 + PHYSICAL_TOL

    def rotated_z(self, phi: float) -> "BlochVector":
        """Rotate about the z axis by ``phi`` (right-handed)."""
        c, s = np.cos(phi), np.sin(phi)
        return BlochVector(c * self.x - s * self.y, s * self.x + c * self.y, self.z)


@dataclass(frozen=True)
class PureQubitState:
    first: complex
    second: complex
    basis: str = "atom"

    def __post_init__(self):
        _check_basis(self.basis)
        n = abs(self.first) ** 2 + abs(self.second) ** 2
        if abs(n - 1) > 1e-12:
            raise ValueError(f"state is not normalized (norm^2 = {n!r})")

    @classmethod
    def from_amplitudes(cls, first, second, basis="atom") -> "PureQubitState":
        """Normalize ``(first, second)`` and build a state."""
        v = np.array([first, second], dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]), basis)

    def as_array(self) -> np.ndarray:
        return np.array([self.first, self.second], dtype=complex)

    def relabel(self, basis: str) -> "PureQubitState":
        """Same amplitudes on another basis (g->L, e->H)."""
        return PureQubitState(self.first, self.second, _check_basis(basis))

    def density(self) -> "DensityMatrix2":
        v = self.as_array()
        return DensityMatrix2(np.outer(v, v.conj()), self.basis)

    def bloch(self) -> BlochVector:
        return density_to_bloch(self.density())


@dataclass(frozen=True)
class DensityMatrix2:
    matrix: np.ndarray = field(repr=False)
    basis: str = "atom"

    def __post_init__(self):
        _check_basis(self.basis)
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("density matrix must be 2x2")
        if abs(np.trace(m) - 1) > TRACE_TOL:
            raise ValueError(f"trace {np.trace(m)!r} differs from 1")
        if abs(m[1, 0] - np.conj(m[0, 1])) > TRACE_TOL or abs(m[0, 0].imag) > TRACE_TOL \
                or abs(m[1, 1].imag) > TRACE_TOL:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(m).min() < -EIG_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __getitem__(self, key):
        """Index by labels, e.g. ``rho["e", "g"]`` or ``rho["H", "L"]``."""
        labels = BASES[self.basis]
        i, j = key
        return complex(self.matrix[labels.index(i), labels.index(j)])

    def __repr__(self):
        a, b = BASES[self.basis]
        return (f"DensityMatrix2(basis={self.basis!r}, rho_{b}{b}={self[b, b].real:.4f}, "
                f"rho_{b}{a}={self[b, a]:.4f})")

    def relabel(self, basis: str) -> "DensityMatrix2":
        return DensityMatrix2(self.matrix, _check_basis(basis))

    def rotated_z(self, phi: float) -> "DensityMatrix2":
        """Virtual-Z frame change: ``rho_10 -> rho_10 * exp(i*phi)``."""
        return bloch_to_density(density_to_bloch(self).rotated_z(-phi), self.basis)


def bloch_to_density(v: BlochVector, basis: str = "atom") -> DensityMatrix2:
    """Density matrix ``(I + v.sigma)/2`` of a physical Bloch vector.

    Vectors slightly outside the ball (floating-point noise, norm up to
    ``1 + 1e-9``) are renormalized; anything beyond raises
    :class:`NonPhysicalStateError` and must be passed through
    :func:`project_to_ball` first.
    """
    r = v.norm
    if r > 1 + PHYSICAL_TOL:
        raise NonPhysicalStateError(f"Bloch vector norm {r:.6g} > 1; project it first")
    x, y, z = v.as_array() / max(1.0, r)
    m = (ID2 + x * SX + y * SY + z * SZ) / 2
    return DensityMatrix2(m, basis)


def density_to_bloch(rho: DensityMatrix2) -> BlochVector:
    m = rho.matrix
    return BlochVector(2 * m[1, 0].real, -2 * m[1, 0].imag, (m[1, 1] - m[0, 0]).real)


def project_to_ball(v: BlochVector) -> BlochVector:
    """Radial projection ``v / max(1, |v|)``."""
    r = v.norm
    if r <= 1:
        return v
    return BlochVector.from_array(v.as_array() / r)


def fidelity(psi: PureQubitState, rho: DensityMatrix2) -> float:
    """``<psi|rho|psi>`` for a pure target and a mixed estimate."""
    if psi.basis != rho.basis:
        raise BasisMismatchError(f"state basis {psi.basis!r} != matrix basis {rho.basis!r}")
    v = psi.as_array()
    f = np.vdot(v, rho.matrix @ v)
    if abs(f.imag) > 1e-12:
        raise ValueError("fidelity has a non-negligible imaginary part")
    f = f.real
    if f < -1e-12 or f > 1 + 1e-12:
        raise ValueError(f"fidelity {f!r} outside [0, 1]")
    return float(min(1.0, max(0.0, f)))


def cardinal_states(basis: str = "atom") -> list[PureQubitState]:
    """The six cardinal states: two poles, then four equator states.

    Order: ``first``, ``second``, then ``(first + e^{i n pi/2} second)/sqrt(2)``
    for ``n = 0..3``.
    """
    _check_basis(basis)
    s = 1 / np.sqrt(2)
    states = [PureQubitState(1, 0, basis), PureQubitState(0, 1, basis)]
    for n in range(4):
        states.append(PureQubitState(s, s * np.exp(1j * n * np.pi / 2), basis))
    return states


# Bloch direction of each entry of cardinal_states(), in order.
CARDINAL_NAMES = ("-z", "+z", "+x", "-y", "-x", "+y")
