"""Pulse envelopes, photon-qubit pulses and waveform analysis.

A :class:`Waveform` is a complex baseband amplitude in units of
``sqrt(photons/ns)`` on a uniform grid, defined against a reference frame
``frame`` (rad/ns): the lab-frame field is ``samples * exp(-i*frame*t)``.
Conversions between frames are explicit (:meth:`Waveform.to_frame`).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf, erfinv

TWO_PI = 2 * np.pi
FWHM_TO_SIGMA = 1 / (2 * np.sqrt(2 * np.log(2)))

PULSE_LENGTH = 100.0          # ns, read as the FWHM of the amplitude envelope
EDGE_FWHM = 40.0              # ns, Gaussian smoothing of flat-top edges
CARRIER = TWO_PI * 10.308     # rad/ns, up/down-conversion carrier
DT = 0.125                    # ns, 1.6 GS/s digitizer
EDGE_SUPPORT = 4.0            # kernel sigmas an edge needs to settle (erf(4/sqrt2) = 1 - 6e-5)


class GridError(ValueError):
    pass


def time_grid(t_start: float, t_stop: float, dt: float = DT) -> np.ndarray:
    """Uniform grid from ``t_start`` covering ``t_stop`` (inclusive when commensurate)."""
    n = int(np.floor((t_stop - t_start) / dt + 1e-9)) + 1
    return t_start + dt * np.arange(n)


def _spacing(grid: np.ndarray) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise GridError("grid must be a 1-D array with at least two points")
    d = np.diff(grid)
    if np.ptp(d) > 1e-9 * abs(d[0]):
        raise GridError("grid is not uniform")
    return float(d[0])


@dataclass(frozen=True)
class Waveform:
    dt: float
    samples: np.ndarray = field(repr=False)
    frame: float
    t0: float = 0.0

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def photons(self) -> float:
        """Mean photon number ``sum |w|^2 dt``."""
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)

    def same_grid(self, other: "Waveform") -> bool:
        return (len(self) == len(other) and np.isclose(self.dt, other.dt, rtol=1e-12, atol=0)
                and np.isclose(self.t0, other.t0, rtol=0, atol=1e-9 * self.dt))

    def to_frame(self, frame: float) -> "Waveform":
        """Re-express the same lab-frame field against another reference frequency."""
        s = self.samples * np.exp(-1j * (self.frame - frame) * self.times)
        return Waveform(self.dt, s, frame, self.t0)

    def scaled(self, c: complex) -> "Waveform":
        return Waveform(self.dt, c * self.samples, self.frame, self.t0)

    def __add__(self, other: "Waveform") -> "Waveform":
        _check_compatible(self, other)
        return Waveform(self.dt, self.samples + other.samples, self.frame, self.t0)

    def __sub__(self, other: "Waveform") -> "Waveform":
        _check_compatible(self, other)
        return Waveform(self.dt, self.samples - other.samples, self.frame, self.t0)


def _check_compatible(a: Waveform, b: Waveform):
    if not a.same_grid(b):
        raise GridError("waveforms are sampled on different grids")
    if not np.isclose(a.frame, b.frame, rtol=1e-12, atol=0):
        raise GridError("waveforms are defined against different frames")


def gaussian_envelope(t_p: float, grid, center: float = 0.0) -> np.ndarray:
    """Gaussian with amplitude FWHM ``t_p``, normalized to ``sum env^2 dt = 1``.

    The grid must reach ``3 t_p`` on both sides of ``center``.
    """
    grid = np.asarray(grid, dtype=float)
    dt = _spacing(grid)
    if grid[0] > center - 3 * t_p + 1e-9 or grid[-1] < center + 3 * t_p - 1e-9:
        raise GridError(f"grid [{grid[0]:g}, {grid[-1]:g}] does not span +-3 t_p around {center:g}")
    sigma = t_p * FWHM_TO_SIGMA
    env = np.exp(-((grid - center) ** 2) / (2 * sigma ** 2))
    return env / np.sqrt(np.sum(env ** 2) * dt)


def flat_top_envelope(plateau: float, grid, edge_fwhm: float = EDGE_FWHM,
                      start: float = 0.0) -> np.ndarray:
    """Rectangle on ``[start, start + plateau]`` smoothed by a Gaussian.

    The smoothing kernel has amplitude FWHM ``edge_fwhm``, so each edge is an
    error function centred on the rectangle boundary; ``edge_fwhm=0`` gives
    the bare rectangle. The plateau must be at least twice the edge support
    (``EDGE_SUPPORT`` kernel sigmas) so that it actually reaches unit height.
    ``grid`` may be any array of times, so the same envelope can be evaluated
    at integrator sub-steps.
    """
    if plateau <= 0:
        raise ValueError("plateau must be positive")
    t = np.asarray(grid, dtype=float)
    stop = start + plateau
    if edge_fwhm == 0:
        return ((t >= start) & (t <= stop)).astype(float)
    s = edge_fwhm * FWHM_TO_SIGMA
    if plateau < 2 * EDGE_SUPPORT * s:
        raise ValueError(f"plateau {plateau:g} ns shorter than the edge support "
                         f"{2 * EDGE_SUPPORT * s:.4g} ns")
    u = np.sqrt(2) * s
    return 0.5 * (erf((t - start) / u) - erf((t - stop) / u))


def edge_rise_time(edge_fwhm: float = EDGE_FWHM) -> float:
    """10%->90% rise time of a Gaussian-smoothed edge."""
    return 2 * np.sqrt(2) * erfinv(0.8) * edge_fwhm * FWHM_TO_SIGMA


@dataclass(frozen=True)
class PulseSpec:
    """Photon-qubit pulse ``alpha * (g1 |omega_L> + g2 |omega_H>)``.

    ``carriers`` are the lab-frame angular frequencies ``(omega_L, omega_H)``;
    ``center`` is the time at which the relative phase of the two components
    equals ``arg(g2/g1)``.
    """

    carriers: tuple
    gammas: tuple = (1.0, 0.0)
    alpha: complex = 1.0
    t_p: float = PULSE_LENGTH
    kind: str = "gaussian"
    center: float = 0.0
    plateau: float = 0.0

    def __post_init__(self):
        n = abs(self.gammas[0]) ** 2 + abs(self.gammas[1]) ** 2
        if abs(n - 1) > 1e-12:
            raise ValueError("photon-qubit amplitudes must be normalized")
        if self.kind not in ("gaussian", "flat_top"):
            raise ValueError(f"unknown envelope kind {self.kind!r}")

    @property
    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2


def build_photon_pulse(spec: PulseSpec, grid, frame: float = CARRIER) -> Waveform:
    """Sample a (generally dichromatic) photon-qubit pulse in ``frame``.

    The result carries exactly ``|alpha|^2`` photons on the grid.
    """
    grid = np.asarray(grid, dtype=float)
    dt = _spacing(grid)
    detunings = np.array(spec.carriers, dtype=float) - frame
    if np.any(np.abs(detunings) >= np.pi / dt):
        raise GridError("carrier detuning aliases on this grid (|delta| >= pi/dt)")
    if spec.kind == "gaussian":
        env = gaussian_envelope(spec.t_p, grid, spec.center)
    else:
        env = flat_top_envelope(spec.plateau, grid, spec.t_p, spec.center - spec.plateau / 2)
    tau = grid - spec.center
    u = (spec.gammas[0] * np.exp(-1j * detunings[0] * tau)
         + spec.gammas[1] * np.exp(-1j * detunings[1] * tau)) * env
    norm = np.sqrt(np.sum(np.abs(u) ** 2) * dt)
    return Waveform(dt, spec.alpha * u / norm, frame, float(grid[0]))


@dataclass(frozen=True)
class Spectrum:
    """Unitary spectrum: ``sum |values|^2 * df`` equals the waveform's photon number.

    ``freqs`` are cyclic frequencies (GHz) relative to ``frame``; a baseband tone
    ``exp(-i*delta*t)`` peaks at ``delta/2pi``.
    """

    freqs: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    frame: float
    df: float
    t0: float
    dt: float

    def band_power(self, f_lo: float, f_hi: float) -> float:
        m = (self.freqs >= f_lo) & (self.freqs <= f_hi)
        return float(np.sum(np.abs(self.values[m]) ** 2) * self.df)

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.df)

    def peak_frequency(self) -> float:
        return float(self.freqs[np.argmax(np.abs(self.values))])


def fft_spectrum(w: Waveform) -> Spectrum:
    n = len(w)
    # X(f) = dt * sum_n x_n exp(+2 pi i f t_n); t0 offset kept as a phase
    x = n * np.fft.ifft(w.samples) * w.dt
    freqs = np.fft.fftfreq(n, w.dt)
    x = x * np.exp(2j * np.pi * freqs * w.t0)
    order = np.argsort(freqs, kind="stable")
    return Spectrum(freqs[order], x[order], w.frame, 1 / (n * w.dt), w.t0, w.dt)


def inverse_spectrum(s: Spectrum) -> Waveform:
    freqs = np.fft.fftfreq(s.freqs.size, s.dt)
    x = np.empty_like(s.values)
    x[np.argsort(freqs, kind="stable")] = s.values
    x = x * np.exp(-2j * np.pi * freqs * s.t0)
    samples = np.fft.fft(x) / (s.freqs.size * s.dt)
    return Waveform(s.dt, samples, s.frame, s.t0)


def overlap(zeta: Waveform, xi: Waveform) -> complex:
    """``sum conj(zeta) * xi * dt`` on a shared grid and frame."""
    _check_compatible(zeta, xi)
    return complex(np.vdot(zeta.samples, xi.samples) * zeta.dt)


_FMT = "%.17g"


def write_waveform_csv(path, w: Waveform) -> None:
    """CSV: a ``dt,frame,t0`` header block, then ``t,re,im`` rows (17 digits)."""
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(["dt", "frame", "t0"])
        out.writerow([_FMT % w.dt, _FMT % w.frame, _FMT % w.t0])
        out.writerow(["t", "re", "im"])
        for t, z in zip(w.times, w.samples):
            out.writerow([_FMT % t, _FMT % z.real, _FMT % z.imag])


def read_waveform_csv(path) -> Waveform:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if rows[0] != ["dt", "frame", "t0"] or rows[2] != ["t", "re", "im"]:
        raise ValueError(f"{path}: not a waveform CSV")
    dt, frame, t0 = (float(v) for v in rows[1])
    data = np.array([[float(v) for v in r[1:]] for r in rows[3:] if r], dtype=float)
    return Waveform(dt, data[:, 0] + 1j * data[:, 1], frame, t0)
