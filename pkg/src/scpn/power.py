"""Solar harvesting, processor task power, and battery depth-of-discharge bookkeeping.

Units: watts, joules, seconds. Battery capacity is converted from Wh to
joules once, at construction. Harvested energy covers demand first; only the
shortfall discharges the battery, and any surplus recharges it with no
round-trip loss.
"""

from __future__ import annotations

from dataclasses import dataclass

from .orbit import OrbitParams, SunModel, cosine_factor, eclipse_indicator, propagate

SOLAR_CONSTANT_W_M2 = 1361.0


@dataclass(frozen=True)
class SatelliteSpec:
    """Static physical parameters of one satellite."""

    sat_id: int
    panel_area_m2: float
    panel_efficiency: float
    operational_power_w: float
    battery_capacity_wh: float
    min_soc: float
    cpu_coeff_w_per_hz3: float
    f_min_hz: float
    f_max_hz: float
    orbit: OrbitParams

    def __post_init__(self) -> None:
        for name in (
            "panel_area_m2",
            "operational_power_w",
            "battery_capacity_wh",
            "cpu_coeff_w_per_hz3",
            "f_min_hz",
            "f_max_hz",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.panel_efficiency < 1.0:
            raise ValueError(f"panel_efficiency must lie in (0, 1), got {self.panel_efficiency}")
        if not 0.0 < self.min_soc < 1.0:
            raise ValueError(f"min_soc must lie in (0, 1), got {self.min_soc}")
        if self.f_min_hz > self.f_max_hz:
            raise ValueError("f_min_hz must not exceed f_max_hz")

    @property
    def capacity_j(self) -> float:
        return self.battery_capacity_wh * 3600.0

    @property
    def dod_limit(self) -> float:
        """Deepest admissible discharge before the state-of-charge floor."""
        return 1.0 - self.min_soc


@dataclass(frozen=True)
class BatteryState:
    """Depth of discharge; soc = 1 - dod."""

    dod: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.dod <= 1.0:
            raise ValueError(f"dod must lie in [0, 1], got {self.dod}")

    @property
    def soc(self) -> float:
        return 1.0 - self.dod


@dataclass(frozen=True)
class PowerSample:
    """Instantaneous power balance of one satellite."""

    harvested_w: float
    consumed_w: float

    @property
    def net_deficit_w(self) -> float:
        return self.consumed_w - self.harvested_w


def harvested_power(
    spec: SatelliteSpec,
    t_s: float,
    sun: SunModel,
    solar_constant_w_m2: float = SOLAR_CONSTANT_W_M2,
) -> float:
    """Panel output at time t_s: irradiance times area, efficiency, shadow and cosine."""
    pos = propagate(spec.orbit, t_s)
    lit = eclipse_indicator(pos, sun, spec.orbit.earth_radius_m)
    cos_eff = cosine_factor(pos, sun, spec.orbit.semi_major_axis_m)
    return lit * solar_constant_w_m2 * spec.panel_area_m2 * spec.panel_efficiency * cos_eff


def task_power(spec: SatelliteSpec, freq_hz: float) -> float:
    """Dynamic processor power, cubic in clock frequency; zero when idle."""
    if freq_hz == 0.0:
        return 0.0
    if not spec.f_min_hz <= freq_hz <= spec.f_max_hz:
        raise ValueError(
            f"frequency {freq_hz} Hz outside hardware range "
            f"[{spec.f_min_hz}, {spec.f_max_hz}]"
        )
    return spec.cpu_coeff_w_per_hz3 * freq_hz**3


def dod_rate(spec: SatelliteSpec, sample: PowerSample) -> float:
    """Depth-of-discharge rate in 1/s; negative while the battery charges."""
    return sample.net_deficit_w / spec.capacity_j


def step_battery(state: BatteryState, rate_per_s: float, dt_s: float) -> BatteryState:
    """Advance the battery one step, saturating at empty (dod 1) and full (dod 0)."""
    if dt_s <= 0.0:
        raise ValueError(f"dt must be positive, got {dt_s}")
    d = state.dod + rate_per_s * dt_s
    return BatteryState(min(1.0, max(0.0, d)))
