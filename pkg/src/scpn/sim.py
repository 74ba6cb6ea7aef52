"""Constellation instantiation, background evolution, and experiment harnesses.

Trials are independent: each task is scheduled against the task-free
background trajectory of the constellation at its arrival time, and never
mutates persistent state. That makes trials a pure parallel map; results are
ordered by trial index, so any worker count produces identical output.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from multiprocessing import get_context
from typing import Iterable, Sequence

import numpy as np

from . import _kernels, rng
from .config import ScenarioConfig
from .degradation import DegradationParams
from .orbit import SunModel, WalkerConfig, walker_init
from .power import BatteryState, SatelliteSpec
from .sched import (
    HEURISTIC_STREAM_INDEX,
    HeuristicKind,
    TaskSpec,
    TrialResult,
    feasible_set,
    schedule,
)

TRIAL_CSV_HEADER = (
    "trial_id,heuristic,task_workload_cycles,task_arrival_s,task_budget_s,"
    "satellite_id,freq_hz,start_s,duration_s,degradation,infeasible"
)
AGGREGATE_CSV_HEADER = (
    "sweep_value,heuristic,mean_degradation,std_degradation,n_feasible,n_infeasible"
)


@dataclass
class Constellation:
    """Read-only scenario snapshot shared by every trial.

    Holds the satellite specs plus flat per-satellite arrays for the hot
    paths, and the precomputed background (task-free) depth-of-discharge and
    harvest timelines on the integration grid.
    """

    specs: list[SatelliteSpec]
    sun: SunModel
    deg_params: DegradationParams
    dt_s: float
    solar_constant_w_m2: float
    horizon_s: float
    timeline_end_s: float
    alpha: np.ndarray
    beta: np.ndarray
    mean_motion: np.ndarray
    u0: np.ndarray
    ge_w: np.ndarray
    operational_power_w: np.ndarray
    capacity_j: np.ndarray
    dod_limit: np.ndarray
    initial_dods: np.ndarray
    harvest_grid: np.ndarray = field(repr=False)
    dod_grid: np.ndarray = field(repr=False)

    @property
    def n_sats(self) -> int:
        return len(self.specs)

    def harvests_at(self, t_s: float) -> np.ndarray:
        """Panel output of every satellite at an arbitrary time."""
        u = self.u0 + self.mean_motion * t_s
        dot = self.alpha * np.cos(u) + self.beta * np.sin(u)
        return self.ge_w * np.maximum(0.0, dot)

    def _grid_index(self, t_s: float) -> tuple[int, float]:
        if not 0.0 <= t_s <= self.timeline_end_s:
            raise ValueError(
                f"time {t_s} outside the background timeline [0, {self.timeline_end_s}]"
            )
        k = min(int(t_s / self.dt_s), self.dod_grid.shape[1] - 1)
        return k, t_s - k * self.dt_s

    def dods_at(self, t_s: float) -> np.ndarray:
        """Background depth of discharge of every satellite at time t_s.

        Full integrator steps up to the last grid point before t_s, then one
        partial step over the remainder.
        """
        k, tau = self._grid_index(t_s)
        base = self.dod_grid[:, k]
        if tau == 0.0:
            return base.copy()
        net_w = self.operational_power_w - self.harvest_grid[:, k]
        return np.clip(base + net_w / self.capacity_j * tau, 0.0, 1.0)

    def dod_at(self, sat_id: int, t_s: float) -> float:
        k, tau = self._grid_index(t_s)
        d = self.dod_grid[sat_id, k]
        if tau == 0.0:
            return float(d)
        net_w = self.operational_power_w[sat_id] - self.harvest_grid[sat_id, k]
        return float(min(1.0, max(0.0, d + net_w / self.capacity_j[sat_id] * tau)))


def instantiate(cfg: ScenarioConfig, timeline_extension_s: float | None = None) -> Constellation:
    """Build the constellation with attributes sampled from the config's seed.

    Satellite attributes come from the dedicated constellation RNG stream in
    a fixed draw order (areas, efficiencies, baseline powers, initial SoC),
    so the same seed always yields the same fleet. The background timelines
    are evolved immediately on the integration grid, covering the horizon
    plus one maximum time budget so delayed starts of late-arriving tasks
    can still be placed (extending the timeline never changes its prefix).
    """
    walker = WalkerConfig(
        planes=cfg.planes,
        sats_per_plane=cfg.sats_per_plane,
        phasing=cfg.phasing,
        altitude_m=cfg.altitude_km * 1000.0,
        inclination_rad=math.radians(cfg.inclination_deg),
    )
    orbits = walker_init(walker)
    n = walker.total
    stream = rng.constellation_stream(cfg.master_seed)
    areas = stream.uniform(*cfg.panel_area_m2, n)
    effs = stream.uniform(*cfg.panel_efficiency, n)
    op_powers = stream.uniform(*cfg.operational_power_w, n)
    socs = stream.uniform(*cfg.initial_soc, n)

    f_min, f_max = (f * 1e9 for f in cfg.freq_range_ghz)
    specs = [
        SatelliteSpec(
            sat_id=i,
            panel_area_m2=float(areas[i]),
            panel_efficiency=float(effs[i]),
            operational_power_w=float(op_powers[i]),
            battery_capacity_wh=cfg.battery_capacity_wh,
            min_soc=cfg.min_soc,
            cpu_coeff_w_per_hz3=cfg.cpu_coeff,
            f_min_hz=f_min,
            f_max_hz=f_max,
            orbit=orbits[i],
        )
        for i in range(n)
    ]
    sun = SunModel.from_vector(*cfg.sun_direction)

    alpha = np.empty(n)
    beta = np.empty(n)
    for i, spec in enumerate(specs):
        p, q = spec.orbit.plane_basis()
        alpha[i] = p.dot(sun.direction)
        beta[i] = q.dot(sun.direction)
    mean_motion = np.array([s.orbit.mean_motion_rad_s for s in specs])
    u0 = np.array([s.orbit.arg_latitude0_rad for s in specs])
    ge_w = cfg.solar_constant_w_m2 * areas * effs
    capacity_j = np.full(n, cfg.battery_capacity_wh * 3600.0)
    initial_dods = 1.0 - socs

    if timeline_extension_s is None:
        timeline_extension_s = cfg.budget_s[1]
    timeline_end = cfg.horizon_s + timeline_extension_s
    n_steps = max(1, math.ceil(timeline_end / cfg.integration_dt_s - 1e-9))
    t_grid = cfg.integration_dt_s * np.arange(n_steps + 1)
    u = u0[:, None] + mean_motion[:, None] * t_grid[None, :]
    harvest_grid = ge_w[:, None] * np.maximum(0.0, alpha[:, None] * np.cos(u) + beta[:, None] * np.sin(u))
    dod_grid = np.empty((n, n_steps + 1))
    for i in range(n):
        net = op_powers[i] - harvest_grid[i, :-1]
        dod_grid[i] = _kernels.clamped_walk(
            net, cfg.integration_dt_s, float(capacity_j[i]), float(initial_dods[i])
        )

    return Constellation(
        specs=specs,
        sun=sun,
        deg_params=DegradationParams(sigma=cfg.sigma),
        dt_s=cfg.integration_dt_s,
        solar_constant_w_m2=cfg.solar_constant_w_m2,
        horizon_s=cfg.horizon_s,
        timeline_end_s=n_steps * cfg.integration_dt_s,
        alpha=alpha,
        beta=beta,
        mean_motion=mean_motion,
        u0=u0,
        ge_w=ge_w,
        operational_power_w=op_powers,
        capacity_j=capacity_j,
        dod_limit=np.full(n, 1.0 - cfg.min_soc),
        initial_dods=initial_dods,
        harvest_grid=harvest_grid,
        dod_grid=dod_grid,
    )


def background_state(constellation: Constellation, t_s: float) -> list[BatteryState]:
    """Battery state of every satellite at time t_s under baseline load only."""
    return [BatteryState(float(d)) for d in constellation.dods_at(t_s)]


def generate_tasks(cfg: ScenarioConfig, count: int, stream: np.random.Generator) -> list[TaskSpec]:
    """Sample tasks: arrivals over the horizon, workloads and budgets per config."""
    if count <= 0:
        raise ValueError(f"task count must be positive, got {count}")
    arrivals = stream.uniform(0.0, cfg.horizon_s, count)
    workloads = stream.uniform(*cfg.workload_cycles, count)
    budgets = stream.uniform(*cfg.budget_s, count)
    return [
        TaskSpec(
            workload_cycles=float(workloads[i]),
            arrival_s=float(arrivals[i]),
            deadline_s=float(arrivals[i] + budgets[i]),
        )
        for i in range(count)
    ]


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep: the swept grid plus the fixed complement."""

    parameter: str  # "workload" | "budget"
    values: tuple[float, ...]
    trials_per_point: int = 1000
    fixed_workload_cycles: float = 1e12
    fixed_budget_s: float = 1500.0

    def __post_init__(self) -> None:
        if self.parameter not in ("workload", "budget"):
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if not self.values:
            raise ValueError("sweep grid must be non-empty")
        if list(self.values) != sorted(self.values):
            raise ValueError("sweep grid must be sorted ascending")
        if self.trials_per_point <= 0:
            raise ValueError("trials_per_point must be positive")


@dataclass(frozen=True)
class AggregateRow:
    """Per-(sweep point, heuristic) summary over feasible trials."""

    sweep_value: float
    heuristic: HeuristicKind
    mean_degradation: float
    std_degradation: float
    n_feasible: int
    n_infeasible: int


# Worker context for forked trial execution; set by the parent before the
# pool spawns so children inherit it read-only.
_WORKER_CTX: dict = {}


def _run_one_trial(
    constellation: Constellation,
    task: TaskSpec,
    trial_id: int,
    master_seed: int,
    point_index: int,
    heuristics: Sequence[HeuristicKind],
    grid_starts: int,
    grid_freqs: int,
) -> list[TrialResult]:
    """All heuristics on one identical snapshot (paired comparison)."""
    shared = None
    if any(k is not HeuristicKind.GRID_BASELINE for k in heuristics):
        shared = feasible_set(constellation, task)
    results = []
    for kind in heuristics:
        stream = rng.trial_stream(
            master_seed, point_index, trial_id, HEURISTIC_STREAM_INDEX[kind]
        )
        results.append(
            schedule(
                kind,
                constellation,
                task,
                stream,
                trial_id=trial_id,
                grid_starts=grid_starts,
                grid_freqs=grid_freqs,
                feasible=shared,
            )
        )
    return results


def _worker_chunk(bounds: tuple[int, int]) -> list[TrialResult]:
    lo, hi = bounds
    ctx = _WORKER_CTX
    out: list[TrialResult] = []
    for i in range(lo, hi):
        out.extend(
            _run_one_trial(
                ctx["constellation"],
                ctx["tasks"][i],
                ctx["trial_id_base"] + i,
                ctx["master_seed"],
                ctx["point_index"],
                ctx["heuristics"],
                ctx["grid_starts"],
                ctx["grid_freqs"],
            )
        )
    return out


def run_point(
    constellation: Constellation,
    tasks: Sequence[TaskSpec],
    heuristics: Sequence[HeuristicKind],
    master_seed: int,
    point_index: int = 0,
    trial_id_base: int = 0,
    grid_starts: int = 5,
    grid_freqs: int = 5,
    threads: int = 1,
) -> list[TrialResult]:
    """Schedule every task with every heuristic; order fixed by trial index."""
    global _WORKER_CTX
    n = len(tasks)
    if threads <= 1 or n < 2:
        out: list[TrialResult] = []
        for i, task in enumerate(tasks):
            out.extend(
                _run_one_trial(
                    constellation, task, trial_id_base + i, master_seed,
                    point_index, heuristics, grid_starts, grid_freqs,
                )
            )
        return out

    _WORKER_CTX = {
        "constellation": constellation,
        "tasks": list(tasks),
        "trial_id_base": trial_id_base,
        "master_seed": master_seed,
        "point_index": point_index,
        "heuristics": list(heuristics),
        "grid_starts": grid_starts,
        "grid_freqs": grid_freqs,
    }
    n_chunks = min(n, threads * 4)
    edges = np.linspace(0, n, n_chunks + 1, dtype=int)
    bounds = [(int(edges[i]), int(edges[i + 1])) for i in range(n_chunks)]
    try:
        with ProcessPoolExecutor(
            max_workers=threads, mp_context=get_context("fork")
        ) as pool:
            chunks = list(pool.map(_worker_chunk, bounds))
    finally:
        _WORKER_CTX = {}
    return [r for chunk in chunks for r in chunk]


def aggregate_trials(
    trials: Iterable[TrialResult],
    sweep_value: float,
    heuristics: Sequence[HeuristicKind],
) -> list[AggregateRow]:
    """Mean/std of degradation over feasible trials; infeasible counted apart."""
    rows = []
    by_kind: dict[HeuristicKind, list[TrialResult]] = {k: [] for k in heuristics}
    for t in trials:
        by_kind[t.heuristic].append(t)
    for kind in heuristics:
        costs = np.array([t.cost for t in by_kind[kind] if not t.infeasible])
        n_inf = sum(1 for t in by_kind[kind] if t.infeasible)
        mean = float(costs.mean()) if costs.size else 0.0
        std = float(costs.std(ddof=1)) if costs.size > 1 else 0.0
        rows.append(AggregateRow(sweep_value, kind, mean, std, int(costs.size), n_inf))
    return rows


def run_regime_experiment(
    cfg: ScenarioConfig,
    heuristics: Sequence[HeuristicKind],
    n_tasks: int = 1000,
    threads: int = 1,
    grid_starts: int = 5,
    grid_freqs: int = 5,
) -> tuple[Constellation, list[TrialResult], list[AggregateRow]]:
    """Paired heuristic comparison on one harvesting regime.

    Each trial advances the constellation to the task's arrival along the
    background timeline, runs every heuristic on that identical snapshot,
    and aggregates feasible-trial degradation per heuristic. The aggregate
    row is keyed by the midpoint of the panel-efficiency range.
    """
    constellation = instantiate(cfg)
    tasks = generate_tasks(cfg, n_tasks, rng.task_stream(cfg.master_seed, 0))
    trials = run_point(
        constellation, tasks, heuristics, cfg.master_seed,
        point_index=0, grid_starts=grid_starts, grid_freqs=grid_freqs, threads=threads,
    )
    sweep_value = 0.5 * (cfg.panel_efficiency[0] + cfg.panel_efficiency[1])
    return constellation, trials, aggregate_trials(trials, sweep_value, heuristics)


def run_sweep(
    cfg: ScenarioConfig,
    sweep: SweepSpec,
    heuristics: Sequence[HeuristicKind],
    threads: int = 1,
    grid_starts: int = 5,
    grid_freqs: int = 5,
) -> tuple[Constellation, list[TrialResult], list[AggregateRow]]:
    """Sweep one task parameter; fresh arrival samples per grid point.

    The constellation is instantiated once. Each grid point gets its own
    task stream keyed by the point index, so extending the grid never
    perturbs earlier points.
    """
    max_budget = sweep.fixed_budget_s if sweep.parameter == "workload" else max(sweep.values)
    constellation = instantiate(cfg, timeline_extension_s=max_budget)
    all_trials: list[TrialResult] = []
    all_rows: list[AggregateRow] = []
    for p_idx, value in enumerate(sweep.values):
        stream = rng.task_stream(cfg.master_seed, p_idx)
        arrivals = stream.uniform(0.0, cfg.horizon_s, sweep.trials_per_point)
        if sweep.parameter == "workload":
            workload, budget = value, sweep.fixed_budget_s
        else:
            workload, budget = sweep.fixed_workload_cycles, value
        tasks = [
            TaskSpec(workload, float(a), float(a + budget)) for a in arrivals
        ]
        trials = run_point(
            constellation, tasks, heuristics, cfg.master_seed,
            point_index=p_idx, trial_id_base=p_idx * sweep.trials_per_point,
            grid_starts=grid_starts, grid_freqs=grid_freqs, threads=threads,
        )
        all_trials.extend(trials)
        all_rows.extend(aggregate_trials(trials, value, heuristics))
    return constellation, all_trials, all_rows


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(x))


def write_trials_csv(path: str, trials: Iterable[TrialResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_CSV_HEADER.split(","))
        for t in trials:
            if t.infeasible:
                w.writerow(
                    [t.trial_id, t.heuristic.value, _fmt(t.task.workload_cycles),
                     _fmt(t.task.arrival_s), _fmt(t.task.budget_s), "", "", "", "", "", 1]
                )
            else:
                w.writerow(
                    [t.trial_id, t.heuristic.value, _fmt(t.task.workload_cycles),
                     _fmt(t.task.arrival_s), _fmt(t.task.budget_s), t.plan.satellite_id,
                     _fmt(t.plan.freq_hz), _fmt(t.plan.start_s),
                     _fmt(t.plan.duration_s), _fmt(t.cost), 0]
                )


def write_aggregate_csv(path: str, rows: Iterable[AggregateRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_CSV_HEADER.split(","))
        for r in rows:
            w.writerow(
                [_fmt(r.sweep_value), r.heuristic.value, _fmt(r.mean_degradation),
                 _fmt(r.std_degradation), r.n_feasible, r.n_infeasible]
            )
