"""Battery cycle-life law and the path-dependent life-consumption integral.

All costs are fractions of the baseline life at 100% depth of discharge, so
the absolute-life anchor cancels out everywhere; only the stress exponent
matters. Discharging at depth d consumes life at the closed-form marginal
rate, and a task's total cost is that rate integrated along the depth
trajectory while it is rising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import _kernels
from .orbit import SunModel, sun_projection
from .power import SOLAR_CONSTANT_W_M2, BatteryState, SatelliteSpec

if TYPE_CHECKING:
    from .sched import ExecutionPlan

LN10 = math.log(10.0)


@dataclass(frozen=True)
class DegradationParams:
    """Stress exponent of the cycle-life law; epsilon only anchors absolute counts."""

    sigma: float = 0.8
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be strictly positive, got {self.sigma}")


@dataclass(frozen=True)
class DegradationCost:
    """Life consumed, as a fraction of the baseline life at full depth."""

    life_consumed: float

    def __post_init__(self) -> None:
        if self.life_consumed < 0.0:
            raise ValueError("life_consumed cannot be negative")


def cycle_life(params: DegradationParams, epsilon: float, d: float) -> float:
    """Endurable full cycles at constant depth d: 10**(epsilon - sigma*d)."""
    if d <= 0.0:
        raise ValueError(f"depth of discharge must be positive, got {d}")
    return 10.0 ** (epsilon - params.sigma * d)


def integrated_consumption(params: DegradationParams, d: float) -> float:
    """Life consumed by one discharge from full to depth d: d * 10**(sigma*(d-1))."""
    return d * 10.0 ** (params.sigma * (d - 1.0))


def instantaneous_rate(params: DegradationParams, d: float) -> float:
    """Marginal life consumed per unit depth discharged at depth d.

    This is the derivative of ``integrated_consumption``; it grows
    monotonically in d, which is what makes deep operation expensive.
    """
    s = params.sigma
    return 10.0 ** (s * (d - 1.0)) * (1.0 + s * LN10 * d)


def evaluate_window(
    spec: SatelliteSpec,
    params: DegradationParams,
    consumed_w: float,
    initial_dod: float,
    start_s: float,
    duration_s: float,
    sun: SunModel,
    dt_s: float,
    solar_constant_w_m2: float = SOLAR_CONSTANT_W_M2,
) -> tuple[float, float, float, float]:
    """Step the battery through a constant-draw window against the harvest curve.

    Single integration entry point for every cost evaluation. Returns
    (life_consumed, final_dod, max_dod, net_energy_j) where the last term is
    the plain consumed-minus-harvested integral, uncapped by saturation.
    """
    if dt_s <= 0.0:
        raise ValueError(f"dt must be positive, got {dt_s}")
    alpha, beta = sun_projection(spec.orbit, sun)
    ge_w = solar_constant_w_m2 * spec.panel_area_m2 * spec.panel_efficiency
    times, rem = _kernels.step_grid(start_s, duration_s, dt_s)
    harvested = _kernels.harvest_series(
        alpha, beta, spec.orbit.mean_motion_rad_s, spec.orbit.arg_latitude0_rad, ge_w, times
    )
    return _kernels.integrate_net_power(
        consumed_w - harvested, dt_s, rem, spec.capacity_j, initial_dod, params.sigma
    )


def task_degradation(
    spec: SatelliteSpec,
    params: DegradationParams,
    plan: ExecutionPlan,
    initial: BatteryState,
    sun: SunModel,
    dt_s: float,
    solar_constant_w_m2: float = SOLAR_CONSTANT_W_M2,
) -> tuple[DegradationCost, BatteryState, bool]:
    """Cost, final battery state, and safety flag for executing one plan.

    Steps the battery from the plan's start through its duration at dt_s,
    drawing task plus baseline power against the orbit's harvest curve. The
    flag is False when the depth of discharge ever exceeds the satellite's
    admissible limit (including at the start); the cost is still reported.
    """
    life, d_final, d_max, _ = evaluate_window(
        spec,
        params,
        plan.task_power_w + spec.operational_power_w,
        initial.dod,
        plan.start_s,
        plan.duration_s,
        sun,
        dt_s,
        solar_constant_w_m2,
    )
    feasible = initial.dod <= spec.dod_limit and d_max <= spec.dod_limit
    return DegradationCost(life), BatteryState(d_final), feasible


def integrate_power_profile(
    params: DegradationParams,
    capacity_j: float,
    initial: BatteryState,
    segments: Sequence[tuple[float, float]],
    dt_s: float,
) -> tuple[DegradationCost, BatteryState, float]:
    """Run the task integrator over explicit (duration_s, net_power_w) segments.

    Exposes the same stepping core that ``task_degradation`` uses, for
    validation against closed-form expectations on piecewise-constant
    profiles. Returns (cost, final state, max depth reached).
    """
    if dt_s <= 0.0:
        raise ValueError(f"dt must be positive, got {dt_s}")
    d = initial.dod
    d_max = d
    life = 0.0
    for duration_s, net_power_w in segments:
        times, rem = _kernels.step_grid(0.0, duration_s, dt_s)
        net = np.full(times.shape[0], float(net_power_w))
        seg_life, d, seg_max, _ = _kernels.integrate_net_power(
            net, dt_s, rem, capacity_j, d, params.sigma
        )
        life += seg_life
        d_max = max(d_max, seg_max)
    return DegradationCost(life), BatteryState(d), d_max
