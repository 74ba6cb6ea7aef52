"""Self-contained invariant gate: analytic oracles against the live integrator.

Runs the aging-model identities and the scheduler dominance/safety
invariants on a small seeded instance. Used by the CLI's ``oracle-check``
subcommand; any failure names the violated invariant. The profile checks
accept an injectable integrator so tests can verify the gate actually
catches a corrupted implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import ScenarioConfig
from .degradation import DegradationParams, integrate_power_profile
from .power import BatteryState
from .rng import substream
from .sched import HEURISTIC_STREAM_INDEX, HeuristicKind, feasible_set, schedule
from .sim import generate_tasks, instantiate
from . import rng as rng_mod

ProfileIntegrator = Callable[..., tuple]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    value: float | None = None


def _g(sigma: float, d: float) -> float:
    # closed-form cumulative life consumption; kept local so the gate does
    # not trust the module under test for its expectations
    return d * 10.0 ** (sigma * (d - 1.0))


def _analytic_profile_cost(
    sigma: float, capacity_j: float, d0: float, segments: Sequence[tuple[float, float]]
) -> float:
    """Exact cost of a piecewise-constant net-power profile.

    Follows the continuous saturating depth trajectory and sums the
    cumulative-consumption differences over rising spans.
    """
    d = d0
    cost = 0.0
    for duration_s, net_w in segments:
        rate = net_w / capacity_j
        d_end = min(1.0, max(0.0, d + rate * duration_s))
        if d_end > d:
            cost += _g(sigma, d_end) - _g(sigma, d)
        d = d_end
    return cost


def _random_profile(
    stream: np.random.Generator,
) -> tuple[float, list[tuple[float, float]]]:
    """Random piecewise-constant profile with whole-second segments.

    Keeps the trajectory strictly inside (0, 1) so the continuous oracle and
    the fixed-step integrator see identical saturation behaviour, and
    guarantees at least one discharging segment.
    """
    capacity_j = 1200.0 * 3600.0
    while True:
        d0 = float(stream.uniform(0.05, 0.6))
        n_seg = int(stream.integers(3, 9))
        durations = stream.integers(5, 61, n_seg).astype(float)
        powers = stream.uniform(-800.0, 800.0, n_seg)
        d = d0
        ok = True
        discharged = 0.0
        for dur, w in zip(durations, powers):
            d += (w / capacity_j) * dur
            if w > 0:
                discharged += (w / capacity_j) * dur
            if not 0.01 < d < 0.99:
                ok = False
                break
        if ok and discharged > 0.01:
            return d0, list(zip(durations, powers))


def check_derivative_identity(sigma: float = 0.8) -> CheckResult:
    """Marginal aging rate must be the derivative of cumulative consumption."""
    from .degradation import instantaneous_rate

    params = DegradationParams(sigma=sigma)
    h = 1e-6
    worst = 0.0
    for d in np.arange(0.0, 1.0 + 1e-12, 0.05):
        fd = (_g(sigma, d + h) - _g(sigma, d - h)) / (2.0 * h)
        worst = max(worst, abs(instantaneous_rate(params, float(d)) - fd))
    return CheckResult(
        "derivative-identity", worst < 1e-6,
        f"max |rate - d(cumulative)/dd| = {worst:.3e}", worst,
    )


def check_profile_oracle(
    dt_s: float = 1.0,
    n_profiles: int = 100,
    seed: int = 20240601,
    tolerance: float | None = None,
    integrator: ProfileIntegrator | None = None,
) -> CheckResult:
    """Integrator vs closed-form cost on random piecewise-constant profiles."""
    integrator = integrator or integrate_power_profile
    # trapezoid residual shrinks quadratically in the step: 1e-4 at dt=1,
    # 1e-6 at dt=0.1
    tol = tolerance if tolerance is not None else 1e-4 * dt_s * dt_s
    params = DegradationParams()
    capacity_j = 1200.0 * 3600.0
    stream = substream(seed, 900)
    worst = 0.0
    for _ in range(n_profiles):
        d0, segments = _random_profile(stream)
        cost, _, _ = integrator(params, capacity_j, BatteryState(d0), segments, dt_s)
        expected = _analytic_profile_cost(params.sigma, capacity_j, d0, segments)
        worst = max(worst, abs(cost.life_consumed - expected) / expected)
    return CheckResult(
        "profile-oracle",
        worst < tol,
        f"max relative residual {worst:.3e} over {n_profiles} profiles at dt={dt_s}",
        worst,
    )


def check_path_dependence(sigma: float = 0.8) -> CheckResult:
    """Equal-depth discharges must cost more when started deeper."""
    params = DegradationParams(sigma=sigma)
    capacity_j = 1200.0 * 3600.0
    power_w = 0.1 / 1000.0 * capacity_j  # exactly +0.1 depth over 1000 s
    seg = [(1000.0, power_w)]
    shallow, _, _ = integrate_power_profile(params, capacity_j, BatteryState(0.1), seg, 1.0)
    deep, _, _ = integrate_power_profile(params, capacity_j, BatteryState(0.8), seg, 1.0)
    expected_ratio = (_g(sigma, 0.9) - _g(sigma, 0.8)) / (_g(sigma, 0.2) - _g(sigma, 0.1))
    ratio = deep.life_consumed / shallow.life_consumed
    ok = deep.life_consumed > shallow.life_consumed and abs(ratio / expected_ratio - 1.0) < 1e-4
    return CheckResult(
        "path-dependence", ok,
        f"deep/shallow cost ratio {ratio:.6f}, expected {expected_ratio:.6f}", ratio,
    )


def _small_instance(seed: int) -> ScenarioConfig:
    return ScenarioConfig(
        planes=3, sats_per_plane=2, master_seed=seed, panel_efficiency=(0.05, 0.15)
    )


def check_grid_dominance(
    seed: int = 7, n_tasks: int = 50, grid: tuple[int, int] = (5, 5)
) -> CheckResult:
    """Grid search must never lose to a heuristic whose plan its grid contains."""
    cfg = _small_instance(seed)
    constellation = instantiate(cfg)
    tasks = generate_tasks(cfg, n_tasks, rng_mod.task_stream(cfg.master_seed, 0))
    heuristics = [
        HeuristicKind.RANDOM,
        HeuristicKind.DOD_FIRST,
        HeuristicKind.MIN_POWER_DEFICIT,
        HeuristicKind.MIN_NET_ENERGY,
    ]
    violations = 0
    compared = 0
    for i, task in enumerate(tasks):
        shared = feasible_set(constellation, task)
        grid_result = schedule(
            HeuristicKind.GRID_BASELINE, constellation, task,
            rng_mod.trial_stream(cfg.master_seed, 0, i, 4),
            trial_id=i, grid_starts=grid[0], grid_freqs=grid[1],
        )
        for kind in heuristics:
            r = schedule(
                kind, constellation, task,
                rng_mod.trial_stream(cfg.master_seed, 0, i, HEURISTIC_STREAM_INDEX[kind]),
                trial_id=i, feasible=shared,
            )
            if r.infeasible or grid_result.infeasible:
                continue
            compared += 1
            if grid_result.cost > r.cost:
                violations += 1
    return CheckResult(
        "grid-dominance",
        violations == 0,
        f"{violations} violations over {compared} comparisons on {n_tasks} tasks",
    )


def check_schedule_invariants(seed: int = 7, n_tasks: int = 50) -> CheckResult:
    """Every feasible result holds its deadline and battery-floor guarantees."""
    cfg = _small_instance(seed)
    constellation = instantiate(cfg)
    tasks = generate_tasks(cfg, n_tasks, rng_mod.task_stream(cfg.master_seed, 0))
    heuristics = list(HEURISTIC_STREAM_INDEX)
    bad = 0
    for i, task in enumerate(tasks):
        for kind in heuristics:
            r = schedule(
                kind, constellation, task,
                rng_mod.trial_stream(cfg.master_seed, 0, i, HEURISTIC_STREAM_INDEX[kind]),
                trial_id=i,
            )
            if r.infeasible:
                if r.plan is not None or r.cost is not None:
                    bad += 1
                continue
            plan = r.plan
            spec = constellation.specs[plan.satellite_id]
            if not (
                plan.start_s >= task.arrival_s - 1e-6
                and plan.start_s + plan.duration_s <= task.deadline_s + 1e-6
                and spec.f_min_hz <= plan.freq_hz <= spec.f_max_hz
                and r.cost >= 0.0
            ):
                bad += 1
    return CheckResult(
        "schedule-invariants", bad == 0, f"{bad} violations over {n_tasks} tasks x {len(heuristics)} heuristics"
    )


def run_oracle_checks(
    dt_s: float = 1.0,
    seed: int = 7,
    profile_integrator: ProfileIntegrator | None = None,
) -> list[CheckResult]:
    """Full gate; ``profile_integrator`` is an injection point for mutation tests."""
    return [
        check_derivative_identity(),
        check_profile_oracle(dt_s=dt_s, integrator=profile_integrator),
        check_path_dependence(),
        check_grid_dominance(seed=seed),
        check_schedule_invariants(seed=seed),
    ]
