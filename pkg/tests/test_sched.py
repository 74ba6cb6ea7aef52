import math

import numpy as np
import pytest

from scpn.config import ScenarioConfig
from scpn.degradation import DegradationParams, task_degradation
from scpn.orbit import EciVector, OrbitParams, SunModel
from scpn.power import BatteryState, SatelliteSpec, task_power
from scpn.rng import substream
from scpn.sched import (
    Candidate,
    ExecutionPlan,
    HeuristicKind,
    Infeasible,
    TaskSpec,
    feasible_set,
    grid_baseline,
    local_policy,
    schedule,
    select_dod_first,
    select_min_net_energy,
    select_min_power_deficit,
    select_random,
)
from scpn.sim import instantiate

SUN_Z = SunModel(EciVector(0.0, 0.0, 1.0))
PARAMS = DegradationParams(0.8)


def dark_spec(sat_id=0, op=60.0):
    """Zero-harvest geometry (equatorial orbit, sun on +Z)."""
    return SatelliteSpec(
        sat_id=sat_id, panel_area_m2=10.0, panel_efficiency=0.1,
        operational_power_w=op, battery_capacity_wh=1200.0, min_soc=0.2,
        cpu_coeff_w_per_hz3=1e-26, f_min_hz=1e9, f_max_hz=4e9,
        orbit=OrbitParams(550e3, 0.0, 0.0, 0.0),
    )


def run_policy(spec, task, dod=0.0):
    return local_policy(spec, task, dod, SUN_Z, PARAMS, 1.0, 1361.0)


def make_candidate(sat_id, dod=0.1, surplus=0.0, net=1.0, cost=0.0):
    plan = ExecutionPlan(sat_id, 0.0, 1e9, 100.0, 10.0)
    return Candidate(
        sat_id=sat_id, plan=plan, cost=cost, dod_at_start=dod, final_dod=dod,
        max_dod=dod, surplus_w=surplus, net_energy_j=net,
    )


class TestLocalPolicy:
    def test_exact_fit_frequency(self):
        task = TaskSpec(1e12, 0.0, 500.0)
        plan = run_policy(dark_spec(), task)
        assert isinstance(plan, ExecutionPlan)
        assert plan.freq_hz == pytest.approx(2e9)
        assert plan.duration_s == pytest.approx(500.0)
        assert plan.start_s == 0.0

    def test_budget_too_tight_for_hardware(self):
        task = TaskSpec(1e12, 0.0, 100.0)
        result = run_policy(dark_spec(), task)
        assert result == Infeasible("frequency")

    def test_slow_task_clamps_to_floor_and_finishes_early(self):
        task = TaskSpec(1e11, 0.0, 1000.0)
        plan = run_policy(dark_spec(), task)
        assert plan.freq_hz == pytest.approx(1e9)
        assert plan.duration_s == pytest.approx(100.0)

    def test_battery_floor_infeasible(self):
        # 700 W draw in the dark from depth 0.79 crosses the 0.8 floor
        task = TaskSpec(2e12, 0.0, 500.0)  # 4 GHz, 640 W task power
        result = run_policy(dark_spec(op=60.0), task, dod=0.79)
        assert result == Infeasible("battery")

    def test_battery_safe_plan_accepted(self):
        task = TaskSpec(2e12, 0.0, 500.0)
        plan = run_policy(dark_spec(op=60.0), task, dod=0.0)
        assert isinstance(plan, ExecutionPlan)


class TestFeasibleSet:
    def test_all_satellites_feasible(self, small_constellation):
        task = TaskSpec(1e11, 100.0, 1100.0)
        cands = feasible_set(small_constellation, task)
        assert len(cands) == small_constellation.n_sats
        assert [c.sat_id for c in cands] == list(range(6))

    def test_impossible_budget_empties_the_set(self, small_constellation):
        task = TaskSpec(1e12, 100.0, 200.0)  # needs 10 GHz
        assert feasible_set(small_constellation, task) == []

    def test_deep_battery_excluded(self, small_cfg):
        # force one satellite to sit at the floor by recharging none of them
        cfg = ScenarioConfig(
            planes=1, sats_per_plane=2, phasing=0, master_seed=3,
            panel_efficiency=(1e-6, 2e-6), initial_soc=(0.21, 0.22),
        )
        constellation = instantiate(cfg)
        task = TaskSpec(2e12, 0.0, 500.0)
        cands = feasible_set(constellation, task)
        assert cands == []


class TestSelectors:
    def test_random_singleton(self):
        c = make_candidate(3)
        assert select_random([c], substream(0, 1)) is c

    def test_random_seeded_replay(self):
        cands = [make_candidate(i) for i in range(3)]
        picks_a = [select_random(cands, substream(42, 9, i)).sat_id for i in range(50)]
        picks_b = [select_random(cands, substream(42, 9, i)).sat_id for i in range(50)]
        assert picks_a == picks_b

    def test_random_is_uniform(self):
        cands = [make_candidate(i) for i in range(4)]
        stream = substream(2024, 0)
        counts = np.zeros(4)
        n = 100_000
        for _ in range(n):
            counts[select_random(cands, stream).sat_id] += 1
        assert np.all(np.abs(counts / n - 0.25) < 0.01 * 0.25)

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError):
            select_random([], substream(0, 1))
        with pytest.raises(ValueError):
            select_dod_first([])

    def test_dod_first_argmin(self):
        cands = [make_candidate(0, dod=0.3), make_candidate(1, dod=0.1), make_candidate(2, dod=0.5)]
        assert select_dod_first(cands).sat_id == 1

    def test_dod_first_tie_breaks_low_id(self):
        cands = [make_candidate(2, dod=0.2), make_candidate(1, dod=0.2)]
        assert select_dod_first(cands).sat_id == 1

    def test_dod_first_ignores_everything_else(self):
        # rescaling surpluses and energies must not affect the choice
        a = [make_candidate(0, dod=0.4, surplus=1e6, net=-1e9),
             make_candidate(1, dod=0.2, surplus=-1e6, net=1e9)]
        b = [make_candidate(0, dod=0.4, surplus=0.0, net=0.0),
             make_candidate(1, dod=0.2, surplus=0.0, net=0.0)]
        assert select_dod_first(a).sat_id == select_dod_first(b).sat_id == 1

    def test_min_power_deficit_argmax_surplus(self):
        cands = [make_candidate(0, surplus=-50.0), make_candidate(1, surplus=200.0),
                 make_candidate(2, surplus=10.0)]
        assert select_min_power_deficit(cands).sat_id == 1

    def test_min_power_deficit_all_negative(self):
        cands = [make_candidate(0, surplus=-90.0), make_candidate(1, surplus=-60.0),
                 make_candidate(2, surplus=-75.0)]
        assert select_min_power_deficit(cands).sat_id == 1

    def test_min_power_deficit_tie_breaks_low_id(self):
        cands = [make_candidate(5, surplus=7.0), make_candidate(2, surplus=7.0)]
        assert select_min_power_deficit(cands).sat_id == 2

    def test_min_net_energy_single_surplus_candidate(self):
        cands = [make_candidate(0, net=5e3), make_candidate(1, net=-1e4),
                 make_candidate(2, net=2e3)]
        for i in range(20):
            assert select_min_net_energy(cands, substream(7, i)).sat_id == 1

    def test_min_net_energy_uniform_over_surplus_pool(self):
        cands = [make_candidate(0, net=-1.0), make_candidate(1, net=-2.0),
                 make_candidate(2, net=0.0), make_candidate(3, net=9.0)]
        stream = substream(11, 0)
        picks = {select_min_net_energy(cands, stream).sat_id for _ in range(200)}
        assert picks == {0, 1, 2}

    def test_min_net_energy_all_positive_takes_argmin(self):
        cands = [make_candidate(0, net=5e3), make_candidate(1, net=2e3),
                 make_candidate(2, net=9e3)]
        assert select_min_net_energy(cands, substream(1, 2)).sat_id == 1


class TestGridBaseline:
    def test_degenerate_grid_reduces_to_local_policy(self, small_constellation):
        task = TaskSpec(3e11, 50.0, 650.0)
        cands = feasible_set(small_constellation, task)
        found = grid_baseline(small_constellation, task, n_start=1, n_freq=1)
        assert found is not None
        plan, cost = found
        by_id = {c.sat_id: c for c in cands}
        match = by_id[plan.satellite_id]
        assert plan.freq_hz == match.plan.freq_hz
        assert plan.start_s == match.plan.start_s
        assert cost.life_consumed == min(c.cost for c in cands)

    def test_sunlit_candidate_hits_zero_cost(self, small_constellation):
        task = TaskSpec(1e11, 100.0, 700.0)
        found = grid_baseline(small_constellation, task, n_start=3, n_freq=3)
        assert found is not None
        assert found[1].life_consumed == 0.0

    def test_matches_brute_force_enumeration(self, small_cfg):
        cfg = ScenarioConfig(planes=1, sats_per_plane=2, phasing=0, master_seed=5)
        constellation = instantiate(cfg)
        task = TaskSpec(8e11, 200.0, 900.0)
        n_start, n_freq = 3, 3

        found = grid_baseline(constellation, task, n_start, n_freq)

        # independent straight-line enumeration over the same lattice
        best = None
        for spec in constellation.specs:
            t_hi = task.deadline_s - task.workload_cycles / spec.f_max_hz
            if t_hi < task.arrival_s:
                continue
            for t0 in np.linspace(task.arrival_s, t_hi, n_start):
                f_lo = max(spec.f_min_hz, task.workload_cycles / (task.deadline_s - t0))
                for f in np.linspace(f_lo, spec.f_max_hz, n_freq):
                    d0 = constellation.dod_at(spec.sat_id, float(t0))
                    plan = ExecutionPlan(
                        spec.sat_id, float(t0), float(f),
                        task.workload_cycles / float(f), task_power(spec, float(f)),
                    )
                    cost, _, ok = task_degradation(
                        spec, constellation.deg_params, plan, BatteryState(d0),
                        constellation.sun, constellation.dt_s,
                    )
                    if not ok or d0 > spec.dod_limit:
                        continue
                    key = (cost.life_consumed, float(t0), float(f), spec.sat_id)
                    if best is None or key < best:
                        best = key
        assert found is not None and best is not None
        plan, cost = found
        assert (cost.life_consumed, plan.start_s, plan.freq_hz, plan.satellite_id) == best

    def test_unschedulable_returns_none(self, small_constellation):
        task = TaskSpec(1e12, 100.0, 200.0)
        assert grid_baseline(small_constellation, task) is None

    def test_grid_dimensions_validated(self, small_constellation):
        task = TaskSpec(1e11, 0.0, 500.0)
        with pytest.raises(ValueError):
            grid_baseline(small_constellation, task, n_start=0)


class TestSchedule:
    def test_unschedulable_task_marked_infeasible(self, small_constellation):
        task = TaskSpec(1e12, 100.0, 200.0)
        for kind in HeuristicKind:
            r = schedule(kind, small_constellation, task, substream(0, 0))
            assert r.infeasible
            assert r.plan is None and r.cost is None

    def test_single_feasible_satellite_makes_heuristics_agree(self):
        cfg = ScenarioConfig(planes=1, sats_per_plane=1, phasing=0, master_seed=2)
        constellation = instantiate(cfg)
        task = TaskSpec(5e11, 10.0, 600.0)
        results = [
            schedule(kind, constellation, task, substream(3, i))
            for i, kind in enumerate(
                [HeuristicKind.RANDOM, HeuristicKind.DOD_FIRST,
                 HeuristicKind.MIN_POWER_DEFICIT, HeuristicKind.MIN_NET_ENERGY]
            )
        ]
        assert len({r.plan.satellite_id for r in results}) == 1
        assert len({r.cost for r in results}) == 1

    def test_deadline_always_respected(self, small_constellation):
        stream = substream(99, 0)
        for i in range(30):
            arrival = float(stream.uniform(0, 5000))
            task = TaskSpec(
                float(stream.uniform(1e11, 1e12)), arrival,
                arrival + float(stream.uniform(25, 1000)),
            )
            for kind in HeuristicKind:
                r = schedule(kind, small_constellation, task, substream(99, 1, i))
                if not r.infeasible:
                    assert r.plan.start_s + r.plan.duration_s <= task.deadline_s + 1e-6

    def test_grid_dominates_heuristics(self, small_constellation):
        stream = substream(55, 0)
        for i in range(25):
            arrival = float(stream.uniform(0, 5000))
            task = TaskSpec(
                float(stream.uniform(1e11, 1e12)), arrival,
                arrival + float(stream.uniform(200, 1000)),
            )
            shared = feasible_set(small_constellation, task)
            g = schedule(
                HeuristicKind.GRID_BASELINE, small_constellation, task,
                substream(55, 1, i), grid_starts=5, grid_freqs=5,
            )
            for j, kind in enumerate(
                [HeuristicKind.RANDOM, HeuristicKind.DOD_FIRST,
                 HeuristicKind.MIN_POWER_DEFICIT, HeuristicKind.MIN_NET_ENERGY]
            ):
                r = schedule(kind, small_constellation, task, substream(55, 2, i, j),
                             feasible=shared)
                if not r.infeasible and not g.infeasible:
                    assert g.cost <= r.cost


class TestTaskSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            TaskSpec(0.0, 0.0, 100.0)
        with pytest.raises(ValueError):
            TaskSpec(1e11, 100.0, 100.0)
        assert TaskSpec(1e11, 50.0, 150.0).budget_s == 100.0
