"""Scenario configuration: defaults, TOML loading, and override precedence.

A bare invocation reproduces the reference setup (300-satellite Walker Delta
at 550 km / 53 deg, the standard attribute distributions, 5400 s horizon), so
a config file only needs the keys it wants to change. Precedence, lowest to
highest: built-in defaults, SCPN_SEED environment variable (seed only),
config file, CLI flags.
"""

from __future__ import annotations

import dataclasses
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

Range = tuple[float, float]


class ConfigError(Exception):
    """Invalid configuration; carries the offending key for diagnostics."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved simulation scenario.

    Two-element tuples are uniform-distribution bounds sampled once per
    satellite (or per task); scalars apply to every satellite identically.
    """

    # constellation geometry
    planes: int = 12
    sats_per_plane: int = 25
    phasing: int = 1
    altitude_km: float = 550.0
    inclination_deg: float = 53.0
    sun_direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    # per-satellite attribute distributions and shared hardware parameters
    panel_area_m2: Range = (3.0, 15.0)
    panel_efficiency: Range = (0.05, 0.15)
    operational_power_w: Range = (50.0, 100.0)
    initial_soc: Range = (0.20, 0.95)
    battery_capacity_wh: float = 1200.0
    min_soc: float = 0.20
    freq_range_ghz: Range = (1.0, 4.0)
    cpu_coeff: float = 1e-26
    # task distributions
    workload_cycles: Range = (1e11, 1e12)
    budget_s: Range = (25.0, 1000.0)
    # aging model and integrator
    sigma: float = 0.8
    integration_dt_s: float = 1.0
    # run control
    horizon_s: float = 5400.0
    master_seed: int = 42
    solar_constant_w_m2: float = 1361.0

    @property
    def n_satellites(self) -> int:
        return self.planes * self.sats_per_plane

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


# config-file section -> (key -> ScenarioConfig field)
_SCHEMA: dict[str, dict[str, str]] = {
    "constellation": {
        "planes": "planes",
        "sats_per_plane": "sats_per_plane",
        "phasing": "phasing",
        "altitude_km": "altitude_km",
        "inclination_deg": "inclination_deg",
        "sun_direction": "sun_direction",
    },
    "satellite": {
        "panel_area_m2": "panel_area_m2",
        "panel_efficiency": "panel_efficiency",
        "operational_power_w": "operational_power_w",
        "initial_soc": "initial_soc",
        "battery_capacity_wh": "battery_capacity_wh",
        "min_soc": "min_soc",
        "freq_range_ghz": "freq_range_ghz",
        "cpu_coeff": "cpu_coeff",
    },
    "task": {
        "workload_cycles": "workload_cycles",
        "budget_s": "budget_s",
    },
    "degradation": {
        "sigma": "sigma",
        "integration_dt_s": "integration_dt_s",
    },
    "run": {
        "horizon_s": "horizon_s",
        "master_seed": "master_seed",
        "solar_constant_w_m2": "solar_constant_w_m2",
    },
}

_RANGE_FIELDS = {
    "panel_area_m2",
    "panel_efficiency",
    "operational_power_w",
    "initial_soc",
    "freq_range_ghz",
    "workload_cycles",
    "budget_s",
}

_INT_FIELDS = {"planes", "sats_per_plane", "phasing", "master_seed"}


def _coerce(field: str, value: Any) -> Any:
    if field == "sun_direction":
        if not (isinstance(value, (list, tuple)) and len(value) == 3):
            raise ConfigError(field, "expected a 3-vector")
        x, y, z = (float(c) for c in value)
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0:
            raise ConfigError(field, "must be non-zero")
        return (x / norm, y / norm, z / norm)
    if field in _RANGE_FIELDS:
        if not (isinstance(value, (list, tuple)) and len(value) == 2):
            raise ConfigError(field, "expected a [low, high] pair")
        return (float(value[0]), float(value[1]))
    if field in _INT_FIELDS:
        if isinstance(value, bool) or int(value) != value:
            raise ConfigError(field, f"expected an integer, got {value!r}")
        return int(value)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(field, f"expected a number, got {value!r}")
    return float(value)


def validate_config(cfg: ScenarioConfig) -> None:
    """Reject physically meaningless scenarios, naming the offending key."""
    if cfg.planes < 1 or cfg.sats_per_plane < 1:
        raise ConfigError("planes", "constellation must have at least one satellite")
    if not 0 <= cfg.phasing < cfg.planes:
        raise ConfigError("phasing", f"must lie in [0, {cfg.planes})")
    if cfg.altitude_km <= 0:
        raise ConfigError("altitude_km", "must be positive")
    if not 0.0 <= cfg.inclination_deg <= 180.0:
        raise ConfigError("inclination_deg", "must lie in [0, 180]")
    for key in ("panel_area_m2", "panel_efficiency", "operational_power_w",
                "initial_soc", "freq_range_ghz", "workload_cycles", "budget_s"):
        lo, hi = getattr(cfg, key)
        if not (lo > 0 and hi >= lo):
            raise ConfigError(key, f"expected 0 < low <= high, got [{lo}, {hi}]")
    if not cfg.panel_efficiency[1] < 1.0:
        raise ConfigError("panel_efficiency", "must stay below 1")
    if not cfg.initial_soc[1] <= 1.0:
        raise ConfigError("initial_soc", "must stay at or below 1")
    if not 0.0 < cfg.min_soc < 1.0:
        raise ConfigError("min_soc", "must lie in (0, 1)")
    for key in ("battery_capacity_wh", "cpu_coeff", "sigma", "integration_dt_s",
                "horizon_s", "solar_constant_w_m2"):
        if getattr(cfg, key) <= 0:
            raise ConfigError(key, "must be positive")


def load_config(
    path: str | None = None,
    cli_overrides: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
) -> ScenarioConfig:
    """Resolve a scenario from defaults, environment, file, and CLI overrides."""
    env = os.environ if env is None else env
    fields: dict[str, Any] = {}

    seed_env = env.get("SCPN_SEED")
    if seed_env is not None:
        try:
            fields["master_seed"] = int(seed_env)
        except ValueError:
            raise ConfigError("SCPN_SEED", f"expected an integer, got {seed_env!r}")

    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {path}")
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"cannot parse {path}: {exc}")
        for section, entries in doc.items():
            if section not in _SCHEMA:
                raise ConfigError(section, "unknown config section")
            if not isinstance(entries, dict):
                raise ConfigError(section, "expected a section of key = value pairs")
            for key, raw in entries.items():
                field = _SCHEMA[section].get(key)
                if field is None:
                    raise ConfigError(f"{section}.{key}", "unknown config key")
                fields[field] = _coerce(field, raw)

    if cli_overrides:
        for field, value in cli_overrides.items():
            if value is not None:
                fields[field] = _coerce(field, value)

    cfg = ScenarioConfig(**fields)
    validate_config(cfg)
    return cfg
