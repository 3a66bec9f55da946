"""Experiment configuration: strict JSON schema backed by dataclasses.

Units are SI; every frequency field is an ordinary frequency in Hz, and
every decay or excitation rate is the Hz value ``X`` in ``gamma / 2 pi = X``.
"""
import dataclasses
import hashlib
import json
import math
import os
import typing
from dataclasses import dataclass, field
from importlib import resources
from typing import List, Optional, Tuple

from .errors import ConfigError

SCHEMA_VERSION = 1

ENV_WORKERS = "COLLAPSE_BOUND_WORKERS"
ENV_TOL_SCALE = "COLLAPSE_BOUND_TOL_SCALE"


@dataclass(frozen=True)
class ResonatorBlock:
    radius: float = 35e-6
    height: float = 240e-6
    mode_number: int = 503
    density: float = 2648.0
    frequency: float = 6.65e9
    mass_model: str = "cylinder"


@dataclass(frozen=True)
class ScanGrid:
    """Log-spaced grid ``[min, max]`` with ``per_decade`` points per decade.
    ``per_decade = 0`` gives an empty grid; ``min == max`` a single point."""
    min: float = 1e-9
    max: float = 1e-5
    per_decade: int = 200

    def values(self):
        if self.per_decade == 0:
            return []
        if self.min == self.max:
            return [float(self.min)]
        lo, hi = math.log10(self.min), math.log10(self.max)
        n = max(2, int(round((hi - lo) * self.per_decade)) + 1)
        return [10.0 ** (lo + (hi - lo) * i / (n - 1)) for i in range(n)]


@dataclass(frozen=True)
class CollapseBlock:
    r_c: float = 1e-7
    lambda_c: float = 1e-12
    omega_cutoff: Optional[float] = None
    r_c_grid: ScanGrid = ScanGrid()
    lambda_scan_points: int = 50
    lambda_scan_ratio: Tuple[float, float] = (2.0, 20.0)


@dataclass(frozen=True)
class PiezoBlock:
    d33: float = 80e-12
    c33: float = 106e9
    E0: float = 2.8e-2
    electrode_diameter: float = 55e-6
    cavity_diameter: float = 70e-6
    v_l: float = 6346.0
    v_t: float = 3900.0
    qubit_band: Tuple[float, float] = (4e9, 9e9)


@dataclass(frozen=True)
class NoiseBlock:
    gamma_q: float = 27e3
    gamma_phi: float = 0.3e6
    gamma_r: float = 300.0
    Gamma_QP: float = 30.0
    Gamma_QP_improved: float = 3.0
    Gamma_P: float = 0.5
    temperature: float = 10e-3
    n_th: Optional[float] = None
    n_dot_c: float = 0.0


@dataclass(frozen=True)
class ReadoutBlock:
    snr: float = 8.0
    a: Optional[float] = None
    target_true_positive: float = 0.1
    epsilon_drive: float = 25e6
    g_readout: float = 100e6
    Delta: float = 2e9
    kappa: float = 16.64e6
    n_bar: float = 10.0
    measurement_time_tau: float = 56e-9
    purcell_filter: float = 50.0


@dataclass(frozen=True)
class SimulationBlock:
    fock_cutoff: int = 1
    rtol: float = 1e-9
    atol: float = 1e-12
    register: List[Tuple[int, int]] = field(
        default_factory=lambda: [(503, 0), (503, 1), (503, 2), (503, 3), (502, 0), (504, 0)])
    swap_samples: int = 401
    n_swaps: int = 5
    cooling_initial_excited: Optional[float] = None
    eta_swap: Optional[float] = None
    qp_current: Optional[float] = None
    qp_improved: Optional[float] = None
    n_cycles: int = 1
    init_swaps: int = 0
    tune_time: float = 0.0
    backend: Optional[str] = None


@dataclass(frozen=True)
class OutputBlock:
    float_format: str = "%.17g"
    trajectory_csv: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    schema_version: int
    resonator: ResonatorBlock
    collapse: CollapseBlock
    piezo: PiezoBlock
    noise: NoiseBlock
    readout: ReadoutBlock
    simulation: SimulationBlock
    output: OutputBlock

    def to_dict(self):
        return _to_plain(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def sha256(self):
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _to_plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    return obj


def _coerce(value, tp, path):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin is typing.Union:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(value, inner[0], path)
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path)
    if origin in (list, List):
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list")
        return [_coerce(v, args[0], f"{path}[{i}]") for i, v in enumerate(value)]
    if origin in (tuple, Tuple):
        if not isinstance(value, (list, tuple)) or len(value) != len(args):
            raise ConfigError(f"{path}: expected a list of {len(args)} values")
        return tuple(_coerce(v, a, f"{path}[{i}]") for i, (v, a) in enumerate(zip(value, args)))
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"{path}: must be finite")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string")
        return value
    raise ConfigError(f"{path}: unsupported field type {tp!r}")  # pragma: no cover


def _build(cls, data, path, require_all=False):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    hints = typing.get_type_hints(cls)
    names = [f.name for f in dataclasses.fields(cls)]
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(unknown)}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name in data:
            kwargs[f.name] = _coerce(data[f.name], hints[f.name], f"{path}.{f.name}")
        elif require_all:
            raise ConfigError(f"{path}: missing required key {f.name!r}")
    return cls(**kwargs)


def _validate(cfg: ExperimentConfig):
    r, c, p, n, ro, s = (cfg.resonator, cfg.collapse, cfg.piezo, cfg.noise, cfg.readout,
                         cfg.simulation)
    positive = [("resonator.radius", r.radius), ("resonator.height", r.height),
                ("resonator.density", r.density), ("resonator.frequency", r.frequency),
                ("collapse.r_c", c.r_c), ("collapse.r_c_grid.min", c.r_c_grid.min),
                ("collapse.r_c_grid.max", c.r_c_grid.max), ("piezo.c33", p.c33),
                ("piezo.v_l", p.v_l), ("piezo.cavity_diameter", p.cavity_diameter),
                ("piezo.electrode_diameter", p.electrode_diameter),
                ("simulation.rtol", s.rtol), ("simulation.atol", s.atol),
                ("readout.purcell_filter", ro.purcell_filter)]
    for name, v in positive:
        if not v > 0:
            raise ConfigError(f"{name} must be positive")
    nonneg = [("collapse.lambda_c", c.lambda_c), ("noise.gamma_q", n.gamma_q),
              ("noise.gamma_phi", n.gamma_phi), ("noise.gamma_r", n.gamma_r),
              ("noise.Gamma_QP", n.Gamma_QP), ("noise.Gamma_QP_improved", n.Gamma_QP_improved),
              ("noise.Gamma_P", n.Gamma_P), ("noise.temperature", n.temperature),
              ("noise.n_dot_c", n.n_dot_c), ("piezo.v_t", p.v_t)]
    for name, v in nonneg:
        if v < 0:
            raise ConfigError(f"{name} must be >= 0")
    if r.mode_number < 1:
        raise ConfigError("resonator.mode_number must be >= 1")
    if r.mass_model not in ("cylinder", "slab"):
        raise ConfigError("resonator.mass_model must be 'cylinder' or 'slab'")
    if c.r_c_grid.min > c.r_c_grid.max:
        raise ConfigError("collapse.r_c_grid: min must not exceed max")
    if c.r_c_grid.per_decade < 0:
        raise ConfigError("collapse.r_c_grid.per_decade must be >= 0")
    if c.omega_cutoff is not None and not c.omega_cutoff > 0:
        raise ConfigError("collapse.omega_cutoff must be positive or null")
    lo, hi = c.lambda_scan_ratio
    if not 0 < lo < hi:
        raise ConfigError("collapse.lambda_scan_ratio must satisfy 0 < lo < hi")
    if c.lambda_scan_points < 5:
        raise ConfigError("collapse.lambda_scan_points must be >= 5")
    if not p.qubit_band[0] < p.qubit_band[1]:
        raise ConfigError("piezo.qubit_band must satisfy f_min < f_max")
    if p.electrode_diameter > p.cavity_diameter:
        raise ConfigError("piezo.electrode_diameter exceeds piezo.cavity_diameter")
    if not s.register:
        raise ConfigError("simulation.register must list at least one (l, m) mode")
    for l, m in s.register:
        if l < 1 or m < 0:
            raise ConfigError(f"simulation.register: invalid mode ({l}, {m})")
    if s.fock_cutoff < 1:
        raise ConfigError("simulation.fock_cutoff must be >= 1")
    if s.swap_samples < 3 or s.n_swaps < 1 or s.n_cycles < 1 or s.init_swaps < 0:
        raise ConfigError("simulation: swap_samples >= 3, n_swaps >= 1, n_cycles >= 1, "
                          "init_swaps >= 0 required")
    if s.backend not in (None, "numba", "numpy"):
        raise ConfigError("simulation.backend must be null, 'numba' or 'numpy'")
    for name in ("eta_swap", "qp_current", "qp_improved", "cooling_initial_excited"):
        v = getattr(s, name)
        if v is not None and not 0 <= v <= 1:
            raise ConfigError(f"simulation.{name} must lie in [0, 1] or be null")
    if ro.a is not None and not ro.a > 0:
        raise ConfigError("readout.a must be positive or null")
    if not 0 < ro.target_true_positive < 1:
        raise ConfigError("readout.target_true_positive must lie in (0, 1)")
    if ro.Delta == 0:
        raise ConfigError("readout.Delta must be non-zero")
    if ro.snr < 0:
        raise ConfigError("readout.snr must be >= 0")
    try:
        cfg.output.float_format % 1.0
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"output.float_format invalid: {exc}") from None
    return cfg


def config_from_dict(data) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config: schema_version must be {SCHEMA_VERSION}, got {version!r}")
    cfg = _build(ExperimentConfig, data, "config", require_all=True)
    return _validate(cfg)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON config file. ``OSError`` propagates for I/O problems."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)


def default_config_text():
    return resources.files("collapse_bound").joinpath("data/default_config.json").read_text("utf-8")


def default_config() -> ExperimentConfig:
    return config_from_dict(json.loads(default_config_text()))


def env_workers():
    raw = os.environ.get(ENV_WORKERS, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_WORKERS} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{ENV_WORKERS} must be >= 1")
    return n


def env_tol_scale():
    raw = os.environ.get(ENV_TOL_SCALE, "").strip()
    if not raw:
        return 1.0
    try:
        x = float(raw)
    except ValueError:
        raise ConfigError(f"{ENV_TOL_SCALE} must be a number, got {raw!r}") from None
    if not (math.isfinite(x) and x > 0):
        raise ConfigError(f"{ENV_TOL_SCALE} must be positive")
    return x
