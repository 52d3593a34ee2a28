"""Experiment configuration: a nested YAML document mapped onto dataclasses.

Units are part of the key names (``tau0_ps``, ``temperature_K``, ...).
Unknown keys and out-of-range values are rejected at parse time with the key
path and, when read from a file, the line number.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .bath import FORMS, BathSpec, SpectralDensity
from .propagator import EvolutionSpec
from .pulse import ChirpedGaussianSpec
from .steady import AbsorptionModel, CWDriveSpec
from .thermo import EngineSpec

WORKERS_ENV = "DRESSEDTHERMO_WORKERS"


class ConfigError(ValueError):
    pass


@dataclass
class Axis:
    start: float
    stop: float
    num: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass
class PulseSection:
    shape: str = "chirped_gaussian"
    tau0_ps: float = 0.5
    theta0_pi: float = 9.0
    chirp_a_ps2: float = 10.0
    delta_ps_inv: float = 2.5
    t_center_ps: float = 0.0

    def check(self):
        if self.shape != "chirped_gaussian":
            return "only shape 'chirped_gaussian' is implemented"
        if self.tau0_ps <= 0:
            return "tau0_ps must be positive"
        if self.theta0_pi < 0:
            return "theta0_pi must be non-negative"

    def spec(self, **override) -> ChirpedGaussianSpec:
        kw = dict(tau0=self.tau0_ps, theta0=self.theta0_pi * np.pi, chirp_a=self.chirp_a_ps2,
                  delta0=self.delta_ps_inv, t_center=self.t_center_ps)
        kw.update(override)
        return ChirpedGaussianSpec(**kw)


@dataclass
class BathSection:
    temperature_K: float = 20.0
    form: str = "super_ohmic_gaussian_cutoff"
    A_ps2: float = 0.027
    omega_c_ps_inv: float = 2.2

    def check(self):
        if self.temperature_K < 0:
            return "temperature_K must be >= 0"
        if self.form not in FORMS:
            return f"form must be one of {FORMS}"
        if self.A_ps2 < 0 or self.omega_c_ps_inv <= 0:
            return "A_ps2 must be >= 0 and omega_c_ps_inv > 0"

    def spec(self, temperature=None) -> BathSpec:
        T = self.temperature_K if temperature is None else temperature
        return BathSpec(T, SpectralDensity(self.form, self.A_ps2, self.omega_c_ps_inv))


@dataclass
class EvolutionSection:
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step_ps: float | None = None
    n_samples: int = 1201
    window_tau: float = 6.0

    def check(self):
        if not (0 < self.rtol <= 1e-2 and 0 < self.atol <= 1e-2):
            return "tolerances must lie in (0, 1e-2]"
        if self.n_samples < 2:
            return "n_samples must be >= 2"
        if self.window_tau <= 0:
            return "window_tau must be positive"


@dataclass
class CountingSection:
    n: int = 1024
    range_factor: float = 10.0
    window: bool = False
    times_ps: list = field(default_factory=list)

    def check(self):
        if self.n < 2 or self.n & (self.n - 1):
            return "n must be a power of two"
        if self.range_factor < 1:
            return "range_factor must be >= 1"


@dataclass
class EngineSection:
    hot_T_K: float = 20.0
    cold_T_K: float = 2.7

    def check(self):
        if not 0 < self.cold_T_K < self.hot_T_K:
            return "need 0 < cold_T_K < hot_T_K"

    def spec(self) -> EngineSpec:
        return EngineSpec(self.hot_T_K, self.cold_T_K)


@dataclass
class CWSection:
    gamma_sp_ns_inv: float = 1.0
    temperature_K: float = 20.0
    form: str = "super_ohmic_exponential_cutoff"
    A_ps2: float = 0.005
    omega_c_ps_inv: float = 5.0
    delta_ps_inv: Axis = field(default_factory=lambda: Axis(-5.0, 5.0, 41))
    omega_ps_inv: Axis = field(default_factory=lambda: Axis(5.0 / 41, 5.0, 41))

    def check(self):
        if self.gamma_sp_ns_inv < 0:
            return "gamma_sp_ns_inv must be >= 0"
        if self.temperature_K < 0:
            return "temperature_K must be >= 0"
        if self.form not in FORMS:
            return f"form must be one of {FORMS}"
        if self.omega_ps_inv.start < 0:
            return "omega_ps_inv must be >= 0"

    def template(self) -> CWDriveSpec:
        bath = BathSpec(self.temperature_K, SpectralDensity(self.form, self.A_ps2, self.omega_c_ps_inv))
        return CWDriveSpec(0.0, 0.0, bath, self.gamma_sp_ns_inv * 1e-3)


@dataclass
class AbsorptionSection:
    dipole_debye: float = 14.3
    density_over_absorption_m2: float = 1.47e22
    refractive_index: float = 2.4

    def check(self):
        if min(self.dipole_debye, self.density_over_absorption_m2, self.refractive_index) <= 0:
            return "absorption parameters must be positive"

    def model(self) -> AbsorptionModel:
        return AbsorptionModel(self.dipole_debye, self.density_over_absorption_m2,
                               self.refractive_index)


@dataclass
class SweepSection:
    chirp_a_ps2: Axis = field(default_factory=lambda: Axis(-20.0, 20.0, 41))
    theta0_pi: Axis = field(default_factory=lambda: Axis(0.25, 10.0, 40))
    delta_ps_inv: list = field(default_factory=lambda: [0.0, -2.5, 2.5])
    tau0_ps: float = 2.0

    def check(self):
        if self.theta0_pi.start < 0:
            return "theta0_pi must be non-negative"
        if self.tau0_ps <= 0:
            return "tau0_ps must be positive"


@dataclass
class OracleSection:
    n_trajectories: int = 100000
    coarsen: int = 4

    def check(self):
        if self.n_trajectories < 1:
            return "n_trajectories must be >= 1"


@dataclass
class OutputSection:
    directory: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "json"])
    gnuplot_stub: bool = False
    meV_column: bool = False


@dataclass
class ExperimentConfig:
    seed: int = 0
    workers: int = 1
    pulse: PulseSection = field(default_factory=PulseSection)
    bath: BathSection = field(default_factory=BathSection)
    evolution: EvolutionSection = field(default_factory=EvolutionSection)
    counting: CountingSection = field(default_factory=CountingSection)
    engine: EngineSection = field(default_factory=EngineSection)
    cw: CWSection = field(default_factory=CWSection)
    absorption: AbsorptionSection = field(default_factory=AbsorptionSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    oracle: OracleSection = field(default_factory=OracleSection)
    output: OutputSection = field(default_factory=OutputSection)

    def evolution_spec(self, pulse: ChirpedGaussianSpec | None = None,
                       bath: BathSpec | None = None) -> EvolutionSpec:
        pulse = self.pulse.spec() if pulse is None else pulse
        bath = self.bath.spec() if bath is None else bath
        ev = self.evolution
        t0, t1 = pulse.window(ev.window_tau)
        return EvolutionSpec(pulse, bath, t0, t1, ev.rtol, ev.atol, ev.max_step_ps, ev.n_samples)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# ----------------------------------------------------------------------------
# parsing

def _line_map(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            p = path + (k.value,)
            out[p] = k.start_mark.line + 1
            _line_map(v, p, out)
    return out


def _where(path, lines) -> str:
    key = ".".join(map(str, path))
    line = lines.get(tuple(path))
    return f"{key} (line {line})" if line else key


def _convert(value, ftype, path, lines):
    name = getattr(ftype, "__name__", str(ftype))
    if ftype is Axis or name == "Axis":
        if isinstance(value, dict):
            return _build(Axis, value, path, lines)
        if isinstance(value, (list, tuple)) and len(value) == 3:
            return Axis(float(value[0]), float(value[1]), int(value[2]))
        raise ConfigError(f"{_where(path, lines)}: expected {{start, stop, num}}")
    try:
        if ftype in (float, "float"):
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if ftype in (int, "int"):
            if isinstance(value, bool) or float(value) != int(value):
                raise TypeError
            return int(value)
        if ftype in (bool, "bool"):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if ftype in (str, "str"):
            return str(value)
        if ftype in (list, "list"):
            return list(value) if isinstance(value, (list, tuple)) else [value]
        if ftype == "float | None":
            return None if value is None else float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{_where(path, lines)}: expected {name}, got {value!r}") from None
    return value


def _build(cls, data, path, lines):
    if not isinstance(data, dict):
        raise ConfigError(f"{_where(path, lines) or 'config'}: expected a mapping")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        p = path + (key,)
        if key not in fields:
            raise ConfigError(f"{_where(p, lines)}: unknown key; allowed: {sorted(fields)}")
        ftype = fields[key].type
        sub = globals().get(ftype) if isinstance(ftype, str) else ftype
        if dataclasses.is_dataclass(sub) and sub is not Axis:
            kwargs[key] = _build(sub, value, p, lines)
        else:
            kwargs[key] = _convert(value, sub if sub is not None else ftype, p, lines)
    obj = cls(**kwargs)
    check = getattr(obj, "check", None)
    msg = check() if check else None
    if msg:
        raise ConfigError(f"{_where(path, lines) or 'config'}: {msg}")
    return obj


def parse_config(text: str | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Parse YAML text, apply dotted-key overrides and validate."""
    data, lines = {}, {}
    if text:
        node = yaml.compose(text)
        lines = _line_map(node) if node is not None else {}
        data = yaml.safe_load(text) or {}
    for dotted, value in (overrides or {}).items():
        cur = data
        keys = dotted.split(".")
        for k in keys[:-1]:
            cur = cur.setdefault(k, {})
            if not isinstance(cur, dict):
                raise ConfigError(f"{dotted}: cannot override inside a scalar")
        cur[keys[-1]] = value
    return _build(ExperimentConfig, data, (), lines)


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None) -> ExperimentConfig:
    text = Path(path).read_text() if path else None
    try:
        return parse_config(text, overrides)
    except ConfigError as exc:
        raise ConfigError(f"{path or '<defaults>'}: {exc}") from None


def parse_override(item: str) -> tuple[str, Any]:
    """``key.path=value`` with the value parsed as YAML."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} must look like key.path=value")
    key, raw = item.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
