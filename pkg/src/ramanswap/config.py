"""INI experiment configuration with units in the key names.

Frequencies are cyclic GHz (``*_ghz``), times are ns (``*_ns``). Values are
converted to the package's internal units (rad/ns) by the properties of
:class:`ExperimentConfig`, never at the call sites.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import asdict, dataclass, fields
from functools import cached_property

import numpy as np

from .dynamics import NoiseParams, SwapTiming
from .model import DEVICE, TWO_PI, DriveParams, SystemParams

BATTERIES = ("match", "levels", "reflectance", "p2a", "a2p", "estimate")


class ConfigError(ValueError):
    pass


def _float(v: str) -> float:
    v = v.strip().lower()
    if v in ("inf", "infinity"):
        return math.inf
    return float(v)


def _floats(v: str) -> tuple:
    v = v.strip()
    return tuple(_float(x) for x in v.split(",")) if v else ()


def _ints(v: str) -> tuple:
    v = v.strip()
    return tuple(int(x) for x in v.split(",")) if v else ()


def _opt_float(v: str):
    return None if v.strip().lower() == "auto" else _float(v)


def _fmt(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def _bool(v: str) -> bool:
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


# section -> key -> parser
_SCHEMA = {
    "system": dict(omega_r_ghz=_float, omega_ge_ghz=_float, chi2_ghz=_float, kappa_ghz=_float),
    "drive": dict(omega_d_ghz=_float, rabi_ghz=_opt_float, auto_match=_bool),
    "pulse": dict(t_p_ns=_float, dt_ns=_float, edge_fwhm_ns=_float, margin_ns=_float,
                  frame_ghz=_float, omega_l_ghz=_opt_float, omega_h_ghz=_opt_float),
    "noise": dict(t1_ns=_float, tphi_ns=_float, readout_fg=_float, readout_fe=_float,
                  tomo_duration_ns=_float, shots=int),
    "battery": dict(experiment=str, alpha_sq=_floats, theta_steps=int, cardinals=_ints,
                    calibrate_phase=_bool),
    "run": dict(seed=int, threads=int, out_dir=str),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat, unit-labelled experiment description (photon->atom device defaults)."""

    omega_r_ghz: float = DEVICE["p2a"]["omega_r"]
    omega_ge_ghz: float = DEVICE["p2a"]["omega_ge"]
    chi2_ghz: float = DEVICE["p2a"]["chi2"]
    kappa_ghz: float = DEVICE["p2a"]["kappa"]
    omega_d_ghz: float = DEVICE["p2a"]["omega_d"]
    rabi_ghz: float | None = None
    auto_match: bool = True
    t_p_ns: float = 100.0
    dt_ns: float = 0.125
    edge_fwhm_ns: float = 40.0
    margin_ns: float = 100.0
    frame_ghz: float = 10.308
    omega_l_ghz: float | None = None
    omega_h_ghz: float | None = None
    t1_ns: float = 900.0
    tphi_ns: float = math.inf
    readout_fg: float = 1.0
    readout_fe: float = 1.0
    tomo_duration_ns: float = 0.0
    shots: int = 0
    experiment: str = "p2a"
    alpha_sq: tuple = (0.0, 0.195, 0.4992)
    theta_steps: int = 16
    cardinals: tuple = (0, 1, 2, 3, 4, 5)
    calibrate_phase: bool = True
    seed: int = 0
    threads: int = 1
    out_dir: str = "runs"

    def __post_init__(self):
        if self.experiment not in BATTERIES:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"expected one of {BATTERIES}")
        if not self.auto_match and self.rabi_ghz is None:
            raise ConfigError("rabi_ghz must be given when auto_match is false")
        if (self.omega_l_ghz is None) != (self.omega_h_ghz is None):
            raise ConfigError("give both carrier frequencies or neither")
        if any(c not in range(6) for c in self.cardinals):
            raise ConfigError("cardinal indices must lie in 0..5")
        if any(a < 0 or a > 0.5 for a in self.alpha_sq):
            raise ConfigError("alpha_sq values must lie in [0, 0.5]")
        if self.theta_steps < 1 or self.threads < 1 or self.shots < 0:
            raise ConfigError("theta_steps and threads must be >= 1, shots >= 0")
        for f in ("readout_fg", "readout_fe"):
            if not 0 <= getattr(self, f) <= 1:
                raise ConfigError(f"{f} must be a probability")

    # ---- conversions to internal units
    @cached_property
    def system(self) -> SystemParams:
        return SystemParams.from_ghz(self.omega_r_ghz, self.omega_ge_ghz, self.chi2_ghz,
                                     self.kappa_ghz, self.t1_ns, self.tphi_ns)

    @cached_property
    def drive_guess(self) -> DriveParams:
        return DriveParams.from_ghz(self.omega_d_ghz, self.rabi_ghz or 0.0)

    @cached_property
    def noise(self) -> NoiseParams:
        assignment = None
        if self.readout_fg < 1 or self.readout_fe < 1:
            assignment = NoiseParams.readout_fidelities(self.readout_fg, self.readout_fe).assignment
        return NoiseParams(self.t1_ns, self.tphi_ns, assignment, self.tomo_duration_ns)

    @cached_property
    def timing(self) -> SwapTiming:
        return SwapTiming(self.t_p_ns, self.dt_ns, self.edge_fwhm_ns, self.margin_ns,
                          TWO_PI * self.frame_ghz)

    @property
    def carriers(self):
        if self.omega_l_ghz is None:
            return None
        return (TWO_PI * self.omega_l_ghz, TWO_PI * self.omega_h_ghz)

    @property
    def thetas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.theta_steps + 1) / self.theta_steps

    # ---- serialization
    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        values = asdict(self)
        for section, keys in _SCHEMA.items():
            cp[section] = {k: _fmt(values[k]) for k in keys}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            cp.read_string(text)
        except configparser.Error as e:
            raise ConfigError(f"malformed config: {e}") from e
        kw = {}
        for section in cp.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]")
            for key, raw in cp[section].items():
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                try:
                    kw[key] = _SCHEMA[section][key](raw)
                except ValueError as e:
                    raise ConfigError(f"[{section}] {key} = {raw!r}: {e}") from e
        if "experiment" in kw and "alpha_sq" not in kw:
            kw["alpha_sq"] = default_alpha_sq(kw["experiment"])
        try:
            return cls(**kw)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as f:
                return cls.from_ini(f.read())
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e

    @classmethod
    def device(cls, column: str = "p2a", **overrides) -> "ExperimentConfig":
        """Device defaults for one experiment column."""
        c = DEVICE[column]
        base = dict(omega_r_ghz=c["omega_r"], omega_ge_ghz=c["omega_ge"], chi2_ghz=c["chi2"],
                    kappa_ghz=c["kappa"], omega_d_ghz=c["omega_d"], experiment=column,
                    alpha_sq=default_alpha_sq(column))
        base.update(overrides)
        return cls(**base)

    def replace(self, **kw) -> "ExperimentConfig":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(kw)
        return ExperimentConfig(**d)


def default_alpha_sq(experiment: str) -> tuple:
    """Default photon-number grids of the two experiments."""
    if experiment == "a2p":
        return (0.048, 0.101, 0.163, 0.206)
    return (0.0, 0.195, 0.4992)
