"""JSON run configuration with strict key validation.

A run config is a JSON object with optional sections ``arch``, ``train``,
``grid``, and ``io``; every field is optional and falls back to the
documented dataclass default.  Unknown sections or keys are rejected so
typos fail loudly instead of silently running with defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .errors import ConfigError, FormatError
from .network import Activation
from .odeflow import IntegratorKind
from .training import ArchConfig, TrainConfig


@dataclass(frozen=True)
class GridConfig:
    """Integration grid and method used for verification and traces."""

    step: float = 1e-3
    horizon: float = 5.0
    method: str = "rk4"

    def __post_init__(self):
        if self.step <= 0:
            raise ConfigError(f"grid step must be positive, got {self.step}")
        if self.horizon <= 0:
            raise ConfigError(f"horizon must be positive, got {self.horizon}")
        try:
            IntegratorKind(self.method)
        except ValueError:
            raise ConfigError(f"unknown integration method {self.method!r}") from None


@dataclass(frozen=True)
class IoConfig:
    """Default output locations, overridable per command."""

    out_dir: str = "."


@dataclass(frozen=True)
class RunConfig:
    arch: ArchConfig = ArchConfig()
    train: TrainConfig = TrainConfig()
    grid: GridConfig = GridConfig()
    io: IoConfig = IoConfig()


_SECTIONS = {
    "arch": ArchConfig,
    "train": TrainConfig,
    "grid": GridConfig,
    "io": IoConfig,
}

_COERCIONS = {
    "hidden_widths": lambda v: tuple(int(w) for w in v),
    "embed_activation": Activation,
    "hidden_activation": Activation,
}


def _build_section(cls, obj: dict, section: str):
    known = {f.name for f in fields(cls)}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(
            f"unknown key(s) in section {section!r}: {sorted(unknown)}; "
            f"known keys: {sorted(known)}"
        )
    kwargs = {}
    for key, value in obj.items():
        coerce = _COERCIONS.get(key)
        if coerce is not None:
            try:
                value = coerce(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad section {section!r}: {exc}") from exc


def run_config_from_dict(obj: dict) -> RunConfig:
    if not isinstance(obj, dict):
        raise ConfigError("run config must be a JSON object")
    unknown = set(obj) - set(_SECTIONS)
    if unknown:
        raise ConfigError(
            f"unknown config section(s): {sorted(unknown)}; "
            f"known sections: {sorted(_SECTIONS)}"
        )
    built = {}
    for name, cls in _SECTIONS.items():
        section = obj.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"section {name!r} must be an object")
        built[name] = _build_section(cls, section, name)
    return RunConfig(**built)


def load_run_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"config file is not valid JSON: {exc}") from exc
    return run_config_from_dict(obj)
