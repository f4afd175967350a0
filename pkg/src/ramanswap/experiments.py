"""Experiment batteries: matching, level diagrams, reflectance, both transfer directions.

Every battery writes plot-ready CSVs (17 significant digits) into one output
directory and returns a :class:`RunRecord`, which is saved as ``record.json``.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, kernel
from .config import ExperimentConfig
from .dynamics import NoiseParams, SwapTiming, raman_carriers, run_swap, steady_reflection
from .estimation import (EtaMatrix, amplitude_damp, average_density, eta_build, hermitize,
                         measure_tomography, photon_to_atom_estimate, tomo_bloch)
from .model import (TWO_PI, DriveParams, MatchError, MatchResult, SystemParams, dressed_solve,
                    find_impedance_match, mismatch, rate_surface)
from .qmath import (CARDINAL_NAMES, BlochVector, DensityMatrix2, PureQubitState,
                    cardinal_states, density_to_bloch, fidelity)
from .signal import Waveform, fft_spectrum, write_waveform_csv

log = logging.getLogger(__name__)

FMT = "%.17g"
PHASE_REFERENCE = 2   # cardinal index of (first + second)/sqrt(2), the +x state
BATTERY_ALPHA_SQ = 0.05


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow(header)
        for row in rows:
            out.writerow([FMT % v if isinstance(v, (float, np.floating)) else v for v in row])


@dataclass
class RunRecord:
    experiment: str
    config: str
    version: str = __version__
    backend: str = kernel.BACKEND
    outputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def save(self, out_dir) -> str:
        path = os.path.join(out_dir, "record.json")
        with open(path, "w") as f:
            json.dump(asdict(self), f, indent=2, sort_keys=True)
        return path


# ---------------------------------------------------------------- work pool

@dataclass(frozen=True)
class SwapJob:
    p: SystemParams
    d: DriveParams
    atom: PureQubitState
    photon: PureQubitState
    alpha: complex
    noise: NoiseParams
    timing: SwapTiming
    carriers: tuple


def _execute(job: SwapJob):
    r = run_swap(job.p, job.d, job.atom, job.photon, job.alpha, job.noise, job.timing,
                 job.carriers)
    return r.atom, r.output, r.input, r.flagged


def run_jobs(jobs, threads: int = 1) -> list:
    """Run swap jobs, in a process pool when ``threads > 1``; order is preserved."""
    jobs = list(jobs)
    if threads <= 1 or len(jobs) < 2:
        return [_execute(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_execute, jobs))


# ---------------------------------------------------------------- setup

@dataclass(frozen=True)
class Setup:
    p: SystemParams
    d: DriveParams
    carriers: tuple
    noise: NoiseParams
    timing: SwapTiming
    match: MatchResult | None = None


def prepare(cfg: ExperimentConfig) -> Setup:
    """Resolve the drive (impedance match if requested) and the input carriers."""
    p = cfg.system
    match = None
    d = cfg.drive_guess
    if cfg.auto_match:
        match = find_impedance_match(p, d)
        if not match.converged:
            raise MatchError(f"impedance match did not converge: M={match.mismatch:.3g}, "
                             f"{match.iterations} iterations, {match.message}", match)
        d = match.drive
    carriers = cfg.carriers or raman_carriers(p, d)
    return Setup(p, d, tuple(carriers), cfg.noise, cfg.timing, match)


def _slug(c: int) -> str:
    """File-name form of a cardinal label: ``+x`` -> ``px``."""
    return CARDINAL_NAMES[c].replace("+", "p").replace("-", "m")


def _ghz(w):
    return float(w) / TWO_PI


# ---------------------------------------------------------------- match / levels / reflectance

def cmd_match(cfg: ExperimentConfig, out_dir: str) -> RunRecord:
    t0 = time.perf_counter()
    s = prepare(cfg)
    sol = dressed_solve(s.p, s.d)
    k = s.p.kappa
    report = dict(
        rabi_ghz=_ghz(s.d.rabi), omega_d_ghz=_ghz(s.d.omega_d),
        omega_l_ghz=_ghz(sol.omega_42), omega_h_ghz=_ghz(sol.omega_41),
        carrier_l_ghz=_ghz(s.carriers[0]), carrier_h_ghz=_ghz(s.carriers[1]),
        rates_over_kappa={f"{j}{i}": float(g / k) for (j, i), g in sol.rates.items()},
        mismatch=float(mismatch(sol)), converged=bool(s.match.converged) if s.match else None,
        iterations=s.match.iterations if s.match else 0,
        message=s.match.message if s.match else "fixed drive")
    with open(os.path.join(out_dir, "match.json"), "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)

    rabis = s.d.rabi * np.linspace(0.5, 1.5, 41)
    wds = s.d.omega_d + k * np.linspace(-2, 2, 41)
    surface = rate_surface(s.p, rabis, wds) / k ** 2
    rows = [(_ghz(om), _ghz(wd), surface[i, j])
            for i, om in enumerate(rabis) for j, wd in enumerate(wds)]
    write_csv(os.path.join(out_dir, "rate_surface.csv"),
              ["rabi_ghz", "omega_d_ghz", "mismatch_over_kappa2"], rows)
    rec = RunRecord("match", cfg.to_ini(), outputs=dict(report="match.json",
                                                        surface="rate_surface.csv"),
                    results=report, timings=dict(total_s=time.perf_counter() - t0))
    rec.save(out_dir)
    return rec


def cmd_levels(cfg: ExperimentConfig, out_dir: str) -> RunRecord:
    """Dressed energies and decay rates against drive amplitude up to twice the match."""
    t0 = time.perf_counter()
    s = prepare(cfg)
    rows = []
    for om in s.d.rabi * np.linspace(0, 2, 81):
        sol = dressed_solve(s.p, DriveParams(s.d.omega_d, om))
        rows.append([_ghz(om), _ghz(s.d.omega_d)] + [_ghz(e) for e in sol.energies]
                    + [sol.rates[(j, i)] / s.p.kappa for j in (3, 4) for i in (1, 2)])
    write_csv(os.path.join(out_dir, "levels.csv"),
              ["rabi_ghz", "omega_d_ghz", "e1_ghz", "e2_ghz", "e3_ghz", "e4_ghz",
               "g31_over_kappa", "g32_over_kappa", "g41_over_kappa", "g42_over_kappa"], rows)
    rec = RunRecord("levels", cfg.to_ini(), outputs=dict(levels="levels.csv"),
                    results=dict(rabi_ghz=_ghz(s.d.rabi)),
                    timings=dict(total_s=time.perf_counter() - t0))
    rec.save(out_dir)
    return rec


def cmd_reflectance(cfg: ExperimentConfig, out_dir: str) -> RunRecord:
    t0 = time.perf_counter()
    s = prepare(cfg)
    sol = dressed_solve(s.p, s.d)
    k = s.p.kappa
    w = np.linspace(sol.omega_42 - 40 * k, sol.omega_41 + 40 * k, 2001)
    r1 = steady_reflection(s.p, s.d, w, 1, sol)
    r2 = steady_reflection(s.p, s.d, w, 2, sol)
    write_csv(os.path.join(out_dir, "reflectance.csv"),
              ["freq_ghz", "abs_r1", "arg_r1", "abs_r2", "arg_r2"],
              zip(w / TWO_PI, np.abs(r1), np.angle(r1), np.abs(r2), np.angle(r2)))
    w_h = s.carriers[1]
    def r_at(w, branch):
        return abs(steady_reflection(s.p, s.d, w, branch, sol))

    results = dict(omega_41_ghz=_ghz(sol.omega_41), abs_r1_at_omega_41=r_at(sol.omega_41, 1),
                   null_ghz=_ghz(w_h), abs_r1_at_null=r_at(w_h, 1),
                   abs_r2_at_omega_41=r_at(sol.omega_41, 2))
    rec = RunRecord("reflectance", cfg.to_ini(), outputs=dict(reflectance="reflectance.csv"),
                    results=results, timings=dict(total_s=time.perf_counter() - t0))
    rec.save(out_dir)
    return rec


# ---------------------------------------------------------------- photon -> atom

def tomography_record(rho: DensityMatrix2, alpha_sq: float, noise: NoiseParams,
                      shots: int = 0, rng=None, meta=None):
    """Simulated readout including the optional tomography-duration decay."""
    rho = amplitude_damp(rho, noise.tomo_duration, noise.t1_atom)
    return measure_tomography(rho, alpha_sq, noise.assignment, shots or None, rng, meta)


def phase_offset(rho: DensityMatrix2) -> float:
    """Phase of the off-diagonal element relative to the +x reference."""
    return float(np.angle(rho.matrix[1, 0]))


@dataclass
class P2AResult:
    alpha_sq: tuple
    estimates: dict            # cardinal index -> DensityMatrix2
    fidelities: dict           # cardinal index -> float
    phase: float
    raw: dict                  # (cardinal, alpha_sq) -> DensityMatrix2 after phase correction
    records: dict = field(default_factory=dict)   # cardinal -> [TomographyRecord]

    @property
    def average(self) -> float:
        return float(np.mean(list(self.fidelities.values())))


def photon_to_atom(s: Setup, alpha_sq, cardinals=range(6), atom: PureQubitState | None = None,
                   calibrate: bool = True, shots: int = 0, rng=None, threads: int = 1) -> P2AResult:
    """Cardinal photon states onto the atom, estimated from slopes against |alpha|^2.

    With ``calibrate`` the atom frame is rotated (a virtual Z) so that the +x
    photon maps onto +x; the same rotation is applied to every state.
    """
    atom = atom or PureQubitState(1, 0, "atom")
    photons = cardinal_states("photon")
    alpha_sq = tuple(sorted(set(alpha_sq)))
    jobs, keys = [], []
    for c in sorted(set(cardinals) | ({PHASE_REFERENCE} if calibrate else set())):
        for a2 in alpha_sq:
            jobs.append(SwapJob(s.p, s.d, atom, photons[c], np.sqrt(a2), s.noise, s.timing,
                                s.carriers))
            keys.append((c, a2))
    results = dict(zip(keys, (r[0] for r in run_jobs(jobs, threads))))

    phase = 0.0
    if calibrate:
        a_ref = max(a for a in alpha_sq if a > 0)
        phase = phase_offset(results[(PHASE_REFERENCE, a_ref)])
    raw = {k: v.rotated_z(-phase) for k, v in results.items()}
    initial = density_to_bloch(atom.density())
    estimates, fids, records = {}, {}, {}
    for c in cardinals:
        recs = [tomography_record(raw[(c, a2)], a2, s.noise, shots, rng,
                                  dict(cardinal=CARDINAL_NAMES[c])) for a2 in alpha_sq]
        ref = atom_reference(raw, c, alpha_sq, initial, s.noise, atom)
        estimates[c] = photon_to_atom_estimate(recs, ref)
        fids[c] = fidelity(photons[c].relabel("atom"), estimates[c])
        records[c] = recs
    return P2AResult(alpha_sq, estimates, fids, phase, raw, records)


def atom_reference(raw, c, alpha_sq, initial: BlochVector, noise, atom) -> BlochVector:
    """Bloch vector the slope is referred to.

    ``|g>`` exactly, else the measured zero-photon state.
    """
    if np.allclose(initial.as_array(), [0, 0, -1]) or 0.0 not in alpha_sq:
        return initial
    rec = tomography_record(raw[(c, 0.0)], 0.0, noise)
    return tomo_bloch(rec)


def cmd_p2a(cfg: ExperimentConfig, out_dir: str) -> RunRecord:
    t0 = time.perf_counter()
    s = prepare(cfg)
    rng = np.random.default_rng(cfg.seed)
    g = PureQubitState(1, 0, "atom")
    alpha_sq = tuple(sorted(set(cfg.alpha_sq)))

    res = photon_to_atom(s, alpha_sq, cfg.cardinals, calibrate=cfg.calibrate_phase,
                         shots=cfg.shots, rng=rng, threads=cfg.threads)
    t_batt = time.perf_counter()

    # theta sweep of the equator photon state, as a function of |alpha|^2
    jobs, keys = [], []
    for th in cfg.thetas:
        ph = PureQubitState.from_amplitudes(1, np.exp(1j * th), "photon")
        for a2 in alpha_sq:
            jobs.append(SwapJob(s.p, s.d, g, ph, np.sqrt(a2), s.noise, s.timing, s.carriers))
            keys.append((th, a2))
    rows = []
    for (th, a2), r in zip(keys, run_jobs(jobs, cfg.threads)):
        m = r[0].rotated_z(-res.phase).matrix
        rows.append((float(th), a2, m[1, 1].real, m[1, 0].real, m[1, 0].imag))
    write_csv(os.path.join(out_dir, "theta_sweep.csv"),
              ["theta_rad", "alpha_sq", "rho_ee", "re_rho_eg", "im_rho_eg"], rows)

    rows = []
    for c in cfg.cardinals:
        m = res.estimates[c].matrix
        rows.append((CARDINAL_NAMES[c], m[0, 0].real, m[1, 1].real, m[1, 0].real, m[1, 0].imag,
                     res.fidelities[c]))
    write_csv(os.path.join(out_dir, "estimates.csv"),
              ["photon_state", "rho_gg", "rho_ee", "re_rho_eg", "im_rho_eg", "fidelity"], rows)
    tomo_files = {}
    for c in cfg.cardinals:
        rows = [(r.alpha_sq, *r.p_tilde, *tomo_bloch(r).as_array()) for r in res.records[c]]
        name = f"tomography_{_slug(c)}.csv"
        write_csv(os.path.join(out_dir, name),
                  ["alpha_sq", "p1", "p2", "p3", "p4", "p5", "p6", "a_x", "a_y", "a_z"], rows)
        tomo_files[f"tomography_{_slug(c)}"] = name
    results = dict(average_fidelity=res.average, phase_rad=res.phase,
                   fidelities={CARDINAL_NAMES[c]: f for c, f in res.fidelities.items()},
                   drive=dict(rabi_ghz=_ghz(s.d.rabi), omega_d_ghz=_ghz(s.d.omega_d)),
                   carriers_ghz=[_ghz(c) for c in s.carriers])
    rec = RunRecord("p2a", cfg.to_ini(),
                    outputs=dict(theta_sweep="theta_sweep.csv", estimates="estimates.csv",
                                 **tomo_files),
                    results=results,
                    timings=dict(battery_s=t_batt - t0, total_s=time.perf_counter() - t0))
    rec.save(out_dir)
    return rec


# ---------------------------------------------------------------- atom -> photon

@dataclass
class A2PResult:
    alpha_sq: tuple
    etas: dict                 # (cardinal, alpha_sq) -> EtaMatrix
    per_alpha: dict            # (cardinal, alpha_sq) -> DensityMatrix2 after phase correction
    estimates: dict            # cardinal -> averaged DensityMatrix2
    fidelities: dict
    phase: dict                # alpha_sq -> virtual-Z angle
    # (cardinal, band, alpha_sq) -> Waveform
    outputs: dict = field(repr=False, default_factory=dict)

    @property
    def average(self) -> float:
        return float(np.mean(list(self.fidelities.values())))


def atom_to_photon(s: Setup, alpha_sq, cardinals=range(6), calibrate: bool = True,
                   threads: int = 1) -> A2PResult:
    """Cardinal atom states onto the photon, estimated from overlap matrices.

    References: ``zeta_L`` from atom ``|g>`` with an ``omega_L`` pulse and
    ``zeta_H`` from atom ``|e>`` with an ``omega_H`` pulse, at each |alpha|^2.
    """
    atoms = cardinal_states("atom")
    lo, hi = PureQubitState(1, 0, "photon"), PureQubitState(0, 1, "photon")
    alpha_sq = tuple(sorted(set(a for a in alpha_sq if a > 0)))
    need = sorted(set(cardinals) | {0, 1} | ({PHASE_REFERENCE} if calibrate else set()))
    jobs, keys = [], []
    for c in need:
        for band, ph in (("L", lo), ("H", hi)):
            for a2 in alpha_sq:
                jobs.append(SwapJob(s.p, s.d, atoms[c], ph, np.sqrt(a2), s.noise, s.timing,
                                    s.carriers))
                keys.append((c, band, a2))
    outputs = {k: r[1] for k, r in zip(keys, run_jobs(jobs, threads))}

    etas, per_alpha, phase = {}, {}, {}
    for a2 in alpha_sq:
        zl, zh = outputs[(0, "L", a2)], outputs[(1, "H", a2)]
        for c in need:
            etas[(c, a2)] = eta_build(zl, zh, outputs[(c, "L", a2)], outputs[(c, "H", a2)])
        phase[a2] = phase_offset(hermitize(etas[(PHASE_REFERENCE, a2)])) if calibrate else 0.0
        for c in need:
            per_alpha[(c, a2)] = hermitize(etas[(c, a2)]).rotated_z(-phase[a2])
    estimates, fids = {}, {}
    for c in cardinals:
        estimates[c] = average_density([per_alpha[(c, a2)] for a2 in alpha_sq])
        fids[c] = fidelity(atoms[c].relabel("photon"), estimates[c])
    return A2PResult(alpha_sq, etas, per_alpha, estimates, fids, phase, outputs)


def cmd_a2p(cfg: ExperimentConfig, out_dir: str) -> RunRecord:
    t0 = time.perf_counter()
    s = prepare(cfg)
    res = atom_to_photon(s, cfg.alpha_sq, cfg.cardinals, cfg.calibrate_phase, cfg.threads)

    rows = []
    for c in cfg.cardinals:
        for a2 in res.alpha_sq:
            e, r = res.etas[(c, a2)], res.per_alpha[(c, a2)]
            f = fidelity(cardinal_states("atom")[c].relabel("photon"), r)
            rows.append((CARDINAL_NAMES[c], a2, e.ll.real, e.ll.imag, e.lh.real, e.lh.imag,
                         e.hl.real, e.hl.imag, e.hh.real, e.hh.imag,
                         r["H", "H"].real, r["H", "L"].real, r["H", "L"].imag, f))
        r = res.estimates[c]
        rows.append((CARDINAL_NAMES[c], "average", "", "", "", "", "", "", "", "",
                     r["H", "H"].real, r["H", "L"].real, r["H", "L"].imag, res.fidelities[c]))
    write_csv(os.path.join(out_dir, "eta_table.csv"),
              ["atom_state", "alpha_sq", "re_eta_ll", "im_eta_ll", "re_eta_lh", "im_eta_lh",
               "re_eta_hl", "im_eta_hl", "re_eta_hh", "im_eta_hh",
               "rho_hh", "re_rho_hl", "im_rho_hl", "fidelity"], rows)

    # time-domain and spectra for ground, +x and excited atoms
    a_show = min(res.alpha_sq, key=lambda a: abs(a - 0.101))
    files = {}
    for c in (0, PHASE_REFERENCE, 1):
        for band in ("L", "H"):
            key = (c, band, a_show)
            if key not in res.outputs:
                continue
            w = res.outputs[key].to_frame(s.timing.frame)
            name = f"xi_{band}_{_slug(c)}"
            write_waveform_csv(os.path.join(out_dir, name + ".csv"), w)
            sp = fft_spectrum(w)
            write_csv(os.path.join(out_dir, name + "_fft.csv"),
                      ["freq_offset_ghz", "re", "im", "abs"],
                      zip(sp.freqs, sp.values.real, sp.values.imag, np.abs(sp.values)))
            files[name] = name + ".csv"
    results = dict(average_fidelity=res.average,
                   fidelities={CARDINAL_NAMES[c]: f for c, f in res.fidelities.items()},
                   phase_rad={str(a): v for a, v in res.phase.items()},
                   carriers_ghz=[_ghz(c) for c in s.carriers])
    rec = RunRecord("a2p", cfg.to_ini(), outputs=dict(eta_table="eta_table.csv", **files),
                    results=results, timings=dict(total_s=time.perf_counter() - t0))
    rec.save(out_dir)
    return rec


# ---------------------------------------------------------------- full battery

@dataclass
class BatteryResult:
    p2a: np.ndarray            # [atom cardinal, photon cardinal] fidelities
    a2p: np.ndarray            # [atom cardinal, photon cardinal] fidelities
    p2a_phase: float
    a2p_phase: float

    @property
    def p2a_average(self) -> float:
        return float(self.p2a.mean())

    @property
    def a2p_average(self) -> float:
        return float(self.a2p.mean())


def cardinal_battery(s: Setup, alpha_sq: float = BATTERY_ALPHA_SQ,
                     threads: int = 1) -> BatteryResult:
    """All 36 (atom, photon) cardinal pairs through both estimation pipelines.

    Photon -> atom: each pair at ``alpha_sq`` plus a zero-photon reference
    per atom state; the slope is referred to that reference. Atom -> photon:
    the estimate only involves monochromatic pulses, so by linearity of the
    reflected amplitude in the pulse it is the same for every photon state.
    """
    atoms = cardinal_states("atom")
    photons = cardinal_states("photon")
    jobs, keys = [], []
    for i, at in enumerate(atoms):
        for j, ph in enumerate(photons):
            jobs.append(SwapJob(s.p, s.d, at, ph, np.sqrt(alpha_sq), s.noise, s.timing, s.carriers))
            keys.append((i, j, alpha_sq))
        jobs.append(SwapJob(s.p, s.d, at, photons[0], 0.0, s.noise, s.timing, s.carriers))
        keys.append((i, None, 0.0))
    out = dict(zip(keys, run_jobs(jobs, threads)))

    # photon -> atom
    phase = phase_offset(out[(0, PHASE_REFERENCE, alpha_sq)][0])
    f_p2a = np.zeros((6, 6))
    for i, at in enumerate(atoms):
        ref0 = tomography_record(out[(i, None, 0.0)][0].rotated_z(-phase), 0.0, s.noise)
        initial = BlochVector(0, 0, -1) if i == 0 else tomo_bloch(ref0)
        for j, ph in enumerate(photons):
            rec = tomography_record(out[(i, j, alpha_sq)][0].rotated_z(-phase), alpha_sq, s.noise)
            est = photon_to_atom_estimate([ref0, rec], initial)
            f_p2a[i, j] = fidelity(ph.relabel("atom"), est)

    # atom -> photon: monochromatic runs are the photon cardinals 0 (L) and 1 (H)
    zl, zh = out[(0, 0, alpha_sq)][1], out[(1, 1, alpha_sq)][1]
    rhos = {i: hermitize(eta_build(zl, zh, out[(i, 0, alpha_sq)][1], out[(i, 1, alpha_sq)][1]))
            for i in range(6)}
    a_phase = phase_offset(rhos[PHASE_REFERENCE])
    f_a2p = np.zeros((6, 6))
    for i, at in enumerate(atoms):
        f_a2p[i, :] = fidelity(at.relabel("photon"), rhos[i].rotated_z(-a_phase))
    return BatteryResult(f_p2a, f_a2p, phase, a_phase)


# ---------------------------------------------------------------- estimate from files

def read_tomography_csv(path):
    """Rows ``alpha_sq, p1..p6`` (header required)."""
    from .estimation import TomographyRecord
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    need = ["alpha_sq"] + [f"p{j}" for j in range(1, 7)]
    if not rows or any(k not in rows[0] for k in need):
        raise ValueError(f"{path}: expected columns {need}")
    return [TomographyRecord([float(r[f"p{j}"]) for j in range(1, 7)], float(r["alpha_sq"]))
            for r in rows]


def estimate_from_tomography(records, target: PureQubitState | None = None) -> dict:
    rho = photon_to_atom_estimate(records)
    out = dict(bloch_per_alpha=[dict(alpha_sq=r.alpha_sq, bloch=tomo_bloch(r).as_array().tolist())
                                for r in records],
               bloch=density_to_bloch(rho).as_array().tolist(), **_matrix_json(rho))
    if target is not None:
        out["fidelity"] = fidelity(target.relabel("atom"), rho)
    return out


def estimate_from_waveforms(zeta_l: Waveform, zeta_h: Waveform, xi_l: Waveform, xi_h: Waveform,
                            target: PureQubitState | None = None) -> dict:
    eta = eta_build(zeta_l, zeta_h, xi_l, xi_h)
    rho = hermitize(eta)
    out = dict(eta=[[[z.real, z.imag] for z in row] for row in eta.matrix.tolist()],
               bloch=density_to_bloch(rho).as_array().tolist(), **_matrix_json(rho))
    if target is not None:
        out["fidelity"] = fidelity(target.relabel("photon"), rho)
    return out


def _matrix_json(rho: DensityMatrix2) -> dict:
    rows = [[[z.real, z.imag] for z in row] for row in rho.matrix.tolist()]
    return dict(basis=rho.basis, matrix=rows)
