"""Single-task scheduling: frequency policy, feasibility, selection heuristics.

Every heuristic shares one deterministic local policy: run at the lowest
hardware frequency that still meets the deadline, starting immediately, so
comparisons isolate the satellite-selection decision. The grid baseline is
the one component allowed to delay the start or raise the frequency; it
exhaustively scans a discretized plan space and lower-bounds the heuristics
whenever its grid contains the immediate-start policy point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .degradation import DegradationCost, evaluate_window
from .power import task_power

if TYPE_CHECKING:
    from .sim import Constellation

DEADLINE_SLACK_S = 1e-6


class HeuristicKind(enum.Enum):
    """Satellite-selection policies; values double as CLI/CSV tokens."""

    RANDOM = "random"
    DOD_FIRST = "dod-first"
    MIN_POWER_DEFICIT = "min-power-deficit"
    MIN_NET_ENERGY = "min-net-energy"
    GRID_BASELINE = "grid"


HEURISTIC_STREAM_INDEX = {
    HeuristicKind.RANDOM: 0,
    HeuristicKind.DOD_FIRST: 1,
    HeuristicKind.MIN_POWER_DEFICIT: 2,
    HeuristicKind.MIN_NET_ENERGY: 3,
    HeuristicKind.GRID_BASELINE: 4,
}


@dataclass(frozen=True)
class TaskSpec:
    """One computational task: total work, arrival, absolute deadline."""

    workload_cycles: float
    arrival_s: float
    deadline_s: float

    def __post_init__(self) -> None:
        if self.workload_cycles <= 0.0:
            raise ValueError(f"workload must be positive, got {self.workload_cycles}")
        if self.deadline_s <= self.arrival_s:
            raise ValueError("deadline must come after arrival")

    @property
    def budget_s(self) -> float:
        return self.deadline_s - self.arrival_s


@dataclass(frozen=True)
class ExecutionPlan:
    """Where, when and how fast one task runs."""

    satellite_id: int
    start_s: float
    freq_hz: float
    duration_s: float
    task_power_w: float


@dataclass(frozen=True)
class Infeasible:
    """Why a satellite cannot take the task: 'frequency' or 'battery'."""

    reason: str


@dataclass(frozen=True)
class Candidate:
    """A feasible (satellite, plan) pair with its simulated outcome cached."""

    sat_id: int
    plan: ExecutionPlan
    cost: float
    dod_at_start: float
    final_dod: float
    max_dod: float
    surplus_w: float
    net_energy_j: float


@dataclass(frozen=True)
class TrialResult:
    """Outcome of scheduling one task with one heuristic."""

    trial_id: int
    heuristic: HeuristicKind
    task: TaskSpec
    plan: ExecutionPlan | None
    cost: float | None
    infeasible: bool


def _required_frequency(spec, task: TaskSpec) -> float | None:
    """Lowest in-range frequency meeting the deadline; None if none exists."""
    f_required = task.workload_cycles / task.budget_s
    if f_required > spec.f_max_hz:
        return None
    return max(f_required, spec.f_min_hz)


def _build_plan(spec, task: TaskSpec, freq_hz: float) -> ExecutionPlan:
    return ExecutionPlan(
        satellite_id=spec.sat_id,
        start_s=task.arrival_s,
        freq_hz=freq_hz,
        duration_s=task.workload_cycles / freq_hz,
        task_power_w=task_power(spec, freq_hz),
    )


def local_policy(
    spec,
    task: TaskSpec,
    initial_dod: float,
    sun,
    params,
    dt_s: float,
    solar_constant_w_m2: float,
) -> ExecutionPlan | Infeasible:
    """Immediate start at the lowest deadline-meeting frequency, battery permitting.

    The required frequency is the workload over the time budget; above the
    hardware maximum the task cannot make its deadline, below the hardware
    minimum the processor runs at its floor and finishes early. The plan is
    then simulated to confirm the state-of-charge floor is never crossed.
    """
    freq = _required_frequency(spec, task)
    if freq is None:
        return Infeasible("frequency")
    plan = _build_plan(spec, task, freq)
    _, _, d_max, _ = evaluate_window(
        spec,
        params,
        plan.task_power_w + spec.operational_power_w,
        initial_dod,
        plan.start_s,
        plan.duration_s,
        sun,
        dt_s,
        solar_constant_w_m2,
    )
    if initial_dod > spec.dod_limit or d_max > spec.dod_limit:
        return Infeasible("battery")
    return plan


def feasible_set(constellation: "Constellation", task: TaskSpec) -> list[Candidate]:
    """All satellites able to run the task from its arrival, with cached outcomes.

    Candidates carry the simulated cost, depth trajectory extremes, the
    instantaneous power surplus at arrival, and the plan-window net energy,
    so selectors never re-integrate. An empty list means the task is
    unschedulable at its arrival time.
    """
    dods = constellation.dods_at(task.arrival_s)
    surpluses = constellation.harvests_at(task.arrival_s) - constellation.operational_power_w
    out: list[Candidate] = []
    for spec in constellation.specs:
        freq = _required_frequency(spec, task)
        if freq is None:
            continue
        d0 = float(dods[spec.sat_id])
        if d0 > spec.dod_limit:
            continue
        plan = _build_plan(spec, task, freq)
        life, d_final, d_max, net_j = evaluate_window(
            spec,
            constellation.deg_params,
            plan.task_power_w + spec.operational_power_w,
            d0,
            plan.start_s,
            plan.duration_s,
            constellation.sun,
            constellation.dt_s,
            constellation.solar_constant_w_m2,
        )
        if d_max > spec.dod_limit:
            continue
        out.append(
            Candidate(
                sat_id=spec.sat_id,
                plan=plan,
                cost=life,
                dod_at_start=d0,
                final_dod=d_final,
                max_dod=d_max,
                surplus_w=float(surpluses[spec.sat_id]),
                net_energy_j=net_j,
            )
        )
    return out


def select_random(feasible: Sequence[Candidate], rng: np.random.Generator) -> Candidate:
    """Uniform draw over the feasible pool."""
    if not feasible:
        raise ValueError("cannot select from an empty feasible set")
    return feasible[int(rng.integers(len(feasible)))]


def select_dod_first(feasible: Sequence[Candidate]) -> Candidate:
    """Satellite with the shallowest current depth of discharge; ties to lowest id."""
    if not feasible:
        raise ValueError("cannot select from an empty feasible set")
    return min(feasible, key=lambda c: (c.dod_at_start, c.sat_id))


def select_min_power_deficit(feasible: Sequence[Candidate]) -> Candidate:
    """Satellite with the largest instantaneous harvest-minus-baseline surplus.

    The surplus is evaluated at the task's arrival; ties go to the lowest id.
    """
    if not feasible:
        raise ValueError("cannot select from an empty feasible set")
    return min(feasible, key=lambda c: (-c.surplus_w, c.sat_id))


def select_min_net_energy(
    feasible: Sequence[Candidate], rng: np.random.Generator
) -> Candidate:
    """Prefer energy-self-sufficient plans; otherwise the cheapest net drain.

    Any candidate whose plan-window net energy is non-positive is considered
    fully solar-covered, and one of those is drawn uniformly at random.
    Failing that, the candidate with the smallest positive net energy wins,
    ties to the lowest id.
    """
    if not feasible:
        raise ValueError("cannot select from an empty feasible set")
    surplus = [c for c in feasible if c.net_energy_j <= 0.0]
    if surplus:
        return surplus[int(rng.integers(len(surplus)))]
    return min(feasible, key=lambda c: (c.net_energy_j, c.sat_id))


def grid_baseline(
    constellation: "Constellation",
    task: TaskSpec,
    n_start: int = 5,
    n_freq: int = 5,
) -> tuple[ExecutionPlan, DegradationCost] | None:
    """Exhaustive search over a start-time and frequency grid per satellite.

    Start times span from arrival to the latest instant the task can still
    finish at full clock; frequencies span from the lowest deadline-meeting
    value to the hardware maximum. Every grid point is simulated against the
    battery floor. Ties break by earliest start, then lowest frequency, then
    lowest satellite id. Returns None when no grid point is feasible.

    This is a discretized near-optimal baseline, not an exact optimum.
    """
    if n_start < 1 or n_freq < 1:
        raise ValueError("grid dimensions must be at least 1")
    best_key: tuple[float, float, float, int] | None = None
    best_plan: ExecutionPlan | None = None
    for spec in constellation.specs:
        latest_start = task.deadline_s - task.workload_cycles / spec.f_max_hz
        if latest_start < task.arrival_s:
            # float crumbs: a budget exactly equal to W/f_max must keep its
            # single admissible start
            if task.workload_cycles / task.budget_s <= spec.f_max_hz:
                latest_start = task.arrival_s
            else:
                continue
        for start_s in np.linspace(task.arrival_s, latest_start, n_start):
            start_s = float(start_s)
            f_lo = max(spec.f_min_hz, task.workload_cycles / (task.deadline_s - start_s))
            if f_lo > spec.f_max_hz:
                continue
            d0 = constellation.dod_at(spec.sat_id, start_s)
            if d0 > spec.dod_limit:
                continue
            for freq_hz in np.linspace(f_lo, spec.f_max_hz, n_freq):
                freq_hz = float(freq_hz)
                duration_s = task.workload_cycles / freq_hz
                if start_s + duration_s > task.deadline_s + DEADLINE_SLACK_S:
                    continue
                p_task = task_power(spec, freq_hz)
                life, _, d_max, _ = evaluate_window(
                    spec,
                    constellation.deg_params,
                    p_task + spec.operational_power_w,
                    d0,
                    start_s,
                    duration_s,
                    constellation.sun,
                    constellation.dt_s,
                    constellation.solar_constant_w_m2,
                )
                if d_max > spec.dod_limit:
                    continue
                key = (life, start_s, freq_hz, spec.sat_id)
                if best_key is None or key < best_key:
                    best_key = key
                    best_plan = ExecutionPlan(
                        satellite_id=spec.sat_id,
                        start_s=start_s,
                        freq_hz=freq_hz,
                        duration_s=duration_s,
                        task_power_w=p_task,
                    )
    if best_plan is None:
        return None
    return best_plan, DegradationCost(best_key[0])


def schedule(
    kind: HeuristicKind,
    constellation: "Constellation",
    task: TaskSpec,
    rng: np.random.Generator,
    trial_id: int = 0,
    grid_starts: int = 5,
    grid_freqs: int = 5,
    feasible: Sequence[Candidate] | None = None,
) -> TrialResult:
    """Run one heuristic on one task and package the outcome.

    Unschedulable tasks produce an infeasible result instead of raising.
    Chosen plans are re-asserted against the deadline and battery-floor
    constraints before being reported. A precomputed feasible set may be
    passed so paired comparisons share one snapshot evaluation.
    """
    if kind is HeuristicKind.GRID_BASELINE:
        found = grid_baseline(constellation, task, grid_starts, grid_freqs)
        if found is None:
            return TrialResult(trial_id, kind, task, None, None, True)
        plan, cost = found
        _assert_plan_window(plan, task)
        return TrialResult(trial_id, kind, task, plan, cost.life_consumed, False)

    if feasible is None:
        feasible = feasible_set(constellation, task)
    if not feasible:
        return TrialResult(trial_id, kind, task, None, None, True)
    if kind is HeuristicKind.RANDOM:
        chosen = select_random(feasible, rng)
    elif kind is HeuristicKind.DOD_FIRST:
        chosen = select_dod_first(feasible)
    elif kind is HeuristicKind.MIN_POWER_DEFICIT:
        chosen = select_min_power_deficit(feasible)
    elif kind is HeuristicKind.MIN_NET_ENERGY:
        chosen = select_min_net_energy(feasible, rng)
    else:
        raise ValueError(f"unknown heuristic {kind!r}")
    _assert_plan_window(chosen.plan, task)
    spec = constellation.specs[chosen.sat_id]
    assert chosen.max_dod <= spec.dod_limit, "battery floor violated by a chosen plan"
    return TrialResult(trial_id, kind, task, chosen.plan, chosen.cost, False)


def _assert_plan_window(plan: ExecutionPlan, task: TaskSpec) -> None:
    assert plan.start_s >= task.arrival_s - DEADLINE_SLACK_S
    assert plan.start_s + plan.duration_s <= task.deadline_s + DEADLINE_SLACK_S
