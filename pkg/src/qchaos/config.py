"""Run configuration: one JSON document, command-line flags layered on top."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .borders import MODES, SWEEP_VARIABLES
from .ensemble import NoiseModel
from .spectrum import PotentialSpec, SystemParams


class ConfigError(ValueError):
    """Invalid or unreadable configuration; the message names the field."""


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    min: float
    max: float
    n_points: int
    log: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep.variable must be one of {SWEEP_VARIABLES}")
        if self.n_points < 2:
            raise ValueError("sweep.n_points must be >= 2")
        if self.log and not (self.min > 0 and self.max > 0):
            raise ValueError("log sweep needs positive sweep.min and sweep.max")

    def values(self) -> list:
        if self.log:
            return np.geomspace(self.min, self.max, self.n_points).tolist()
        return np.linspace(self.min, self.max, self.n_points).tolist()


@dataclass(frozen=True)
class EnsembleSettings:
    n_p: int = 2
    t_max: float = 1000.0
    dt: float = 1.0
    level_index: int = 0
    laddered: bool = True


@dataclass(frozen=True)
class TunnelSettings:
    realisations: Optional[object] = None  # path or inline RealisationSet dict
    beta: int = 0
    eps_s: Optional[float] = None
    unperturbed_height: Optional[float] = None
    delta_eps_s: Optional[float] = None


@dataclass(frozen=True)
class ClassicalSettings:
    K: Optional[float] = None
    n_orbits: int = 1000
    n_steps: int = 10_000
    lambda_anh: float = 2 * math.pi


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams = field(default_factory=SystemParams)
    potential: PotentialSpec = field(
        default_factory=lambda: PotentialSpec("harmonic", -10.0, 10.0, 2048))
    mode: str = "time_independent"
    n_levels: int = 3
    reference_index: int = 0
    star_phase: float = 0.0
    richardson: bool = True
    energy: Optional[float] = None
    eps_s: Optional[float] = None
    sweep: Optional[SweepSpec] = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    ensemble: EnsembleSettings = field(default_factory=EnsembleSettings)
    tunnel: TunnelSettings = field(default_factory=TunnelSettings)
    classical: ClassicalSettings = field(default_factory=ClassicalSettings)
    output_dir: str = "run"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n_levels < 1:
            raise ConfigError(f"n_levels must be >= 1, got {self.n_levels}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["potential"] = self.potential.to_dict()
        return d


_SECTIONS = {
    "system": SystemParams,
    "noise": NoiseModel,
    "sweep": SweepSpec,
    "ensemble": EnsembleSettings,
    "tunnel": TunnelSettings,
    "classical": ClassicalSettings,
}


def _build(cls, name: str, raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object, got {type(raw).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"{name}: unknown field(s) {sorted(extra)}")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _potential(raw, base: Path) -> PotentialSpec:
    if not isinstance(raw, dict):
        raise ConfigError("potential: expected an object")
    raw = dict(raw)
    if raw.get("kind") == "table" and "path" in raw:
        path = Path(raw.pop("path"))
        if not path.is_absolute():
            path = base / path
        if not path.exists():
            raise ConfigError(f"potential.path: file not found: {path}")
        try:
            return PotentialSpec.from_csv(path, grid_n=raw.get("grid_n", 2048))
        except ValueError as exc:
            raise ConfigError(f"potential.path: {exc}") from exc
    try:
        return PotentialSpec.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"potential: {exc}") from exc


def config_from_dict(raw: dict, base: Path = Path(".")) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown top-level field(s) {sorted(extra)}")
    kw = {}
    for key, value in raw.items():
        if key in _SECTIONS:
            kw[key] = None if value is None else _build(_SECTIONS[key], key, value)
        elif key == "potential":
            kw[key] = _potential(value, base)
        else:
            kw[key] = value
    try:
        return RunConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(raw, base=path.parent)


def with_overrides(cfg: RunConfig, **top) -> RunConfig:
    """Replace top-level fields and dotted section fields, e.g. ``noise.sigma``."""
    sections: dict = {}
    plain = {}
    for key, value in top.items():
        if value is None:
            continue
        if "." in key:
            sec, sub = key.split(".", 1)
            sections.setdefault(sec, {})[sub] = value
        else:
            plain[key] = value
    try:
        for sec, fields_ in sections.items():
            plain[sec] = dataclasses.replace(getattr(cfg, sec), **fields_)
        return dataclasses.replace(cfg, **plain)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
