"""Run configuration: a small TOML file plus command-line overrides."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, fields, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .geometry import DEFAULT_C, PpnContext, UnitSystem


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class RunConfig:
    gamma: float = 1.0
    beta: float = 1.0
    phi_over_c2: float = -1e-6
    grad_phi: tuple = (0.0, 0.0, 0.0)
    c: float = DEFAULT_C
    m1: float = 1.0
    m2: float = 1836.15267343
    e: float = 1.0
    seed: int = 20240601
    n_points: int = 10
    n_levels: int = 3
    l: int = 0
    grid_points: int = 8000
    sweep_parameter: str | None = None
    sweep_values: tuple = ()
    dt: float = 0.01
    steps: int = 1000
    internal_energy: tuple = (-0.5, -0.125)
    momentum: tuple = (0.0, 0.0, 0.0)
    strict: bool = False
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        for name in ("gamma", "beta", "phi_over_c2", "c", "m1", "m2", "e", "dt"):
            if not math.isfinite(float(getattr(self, name))):
                raise ConfigError(f"{name} must be finite")
        if self.c <= 0 or self.m1 <= 0 or self.m2 <= 0:
            raise ConfigError("c and masses must be positive")
        if len(self.grad_phi) != 3 or len(self.momentum) != 3:
            raise ConfigError("grad_phi and momentum must have three components")
        if self.n_points < 1 or self.n_levels < 1 or self.steps < 1 or self.dt <= 0:
            raise ConfigError("counts, steps and dt must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.sweep_parameter is not None:
            if self.sweep_parameter not in ("gamma", "beta", "phi_over_c2"):
                raise ConfigError("sweep parameter must be gamma, beta or phi_over_c2")
            if not self.sweep_values:
                raise ConfigError("sweep needs at least one value")

    def context(self, **changes) -> PpnContext:
        cfg = replace(self, **changes) if changes else self
        try:
            return PpnContext(
                UnitSystem(c=cfg.c), gamma=cfg.gamma, beta=cfg.beta,
                phi=cfg.phi_over_c2 * cfg.c**2, grad_phi=cfg.grad_phi,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def sweep(self) -> list["RunConfig"]:
        """One config per sweep value (just ``self`` without a sweep)."""
        if self.sweep_parameter is None:
            return [self]
        return [replace(self, **{self.sweep_parameter: float(v)}) for v in self.sweep_values]


_TUPLES = {"grad_phi", "sweep_values", "internal_energy", "momentum"}


def _coerce(name: str, value):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if name not in kinds:
        raise ConfigError(f"unknown configuration key {name!r}")
    if name in _TUPLES:
        if isinstance(value, str):
            value = [v for v in value.split(",") if v.strip()]
        return tuple(float(v) for v in value)
    default = getattr(RunConfig, name, None)
    if isinstance(default, bool):
        if isinstance(value, str):
            return value.lower() in ("1", "true", "yes")
        return bool(value)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return None if value is None else str(value)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Read a TOML file (sections are flattened) and apply ``overrides``.

    Keys are the :class:`RunConfig` field names; ``None`` overrides are ignored.
    """
    values = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for key, value in data.items():
            if isinstance(value, dict):
                values.update(value)
            else:
                values[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    try:
        coerced = {k: _coerce(k, v) for k, v in values.items()}
        return RunConfig(**coerced)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
