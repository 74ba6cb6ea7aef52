"""Regime-dependence studies of the selection heuristics.

These runs place the fleet in a genuinely harvest-starved regime (panel
output an order of magnitude below the stock attribute ranges, where no
satellite can cover even its baseline draw from sunlight alone) and verify
the qualitative behaviour the aging model predicts there:

* when solar power cannot cover demand, battery-state-aware selection wins
  and surplus-seeking selection loses its edge;
* as workload grows at a fixed deadline, surplus-seeking selection decays
  from best to worst;
* as deadlines relax at a fixed workload, the energy-aware selectors
  converge to near-zero cost while depth-first selection plateaus.

The stock-parameter twins of these studies live in the acceptance module.
"""

import numpy as np
import pytest

from scpn.config import ScenarioConfig
from scpn.sched import HeuristicKind
from scpn.sim import SweepSpec, run_regime_experiment, run_sweep

FOUR = [
    HeuristicKind.RANDOM,
    HeuristicKind.DOD_FIRST,
    HeuristicKind.MIN_POWER_DEFICIT,
    HeuristicKind.MIN_NET_ENERGY,
]

pytestmark = pytest.mark.slow


def by_heuristic(rows, value=None):
    out = {}
    for r in rows:
        if value is None or r.sweep_value == value:
            out[r.heuristic] = r
    return out


class TestStarvedRegime:
    def test_battery_aware_selection_dominates(self):
        cfg = ScenarioConfig(panel_efficiency=(0.0012, 0.0024))
        _, _, rows = run_regime_experiment(cfg, FOUR, n_tasks=600)
        stats = by_heuristic(rows)
        dod = stats[HeuristicKind.DOD_FIRST]
        mpd = stats[HeuristicKind.MIN_POWER_DEFICIT]
        mne = stats[HeuristicKind.MIN_NET_ENERGY]

        assert dod.mean_degradation == min(r.mean_degradation for r in rows)
        assert dod.std_degradation == min(r.std_degradation for r in rows)
        assert dod.mean_degradation < mpd.mean_degradation
        assert mne.mean_degradation < mpd.mean_degradation


class TestWorkloadCrossover:
    def test_surplus_seeking_decays_from_best_to_beaten(self):
        cfg = ScenarioConfig(panel_efficiency=(0.005, 0.015))
        grid = tuple(float(v) for v in np.geomspace(1e11, 3e12, 5))
        sweep = SweepSpec("workload", grid, trials_per_point=300, fixed_budget_s=1500.0)
        _, _, rows = run_sweep(cfg, sweep, FOUR)

        small = by_heuristic(rows, grid[0])
        large = by_heuristic(rows, grid[-1])
        mpd_small = small[HeuristicKind.MIN_POWER_DEFICIT].mean_degradation
        assert mpd_small == min(r.mean_degradation for r in small.values())

        mpd_large = large[HeuristicKind.MIN_POWER_DEFICIT].mean_degradation
        battery_aware = min(
            large[HeuristicKind.DOD_FIRST].mean_degradation,
            large[HeuristicKind.MIN_NET_ENERGY].mean_degradation,
        )
        assert battery_aware < mpd_large


class TestBudgetRelaxation:
    def test_relaxed_deadlines_collapse_cost_for_energy_aware_selectors(self):
        cfg = ScenarioConfig(panel_efficiency=(0.005, 0.015))
        grid = (400.0, 800.0, 1400.0, 2000.0)
        sweep = SweepSpec("budget", grid, trials_per_point=300, fixed_workload_cycles=1e12)
        _, _, rows = run_sweep(cfg, sweep, FOUR)

        tight = by_heuristic(rows, 400.0)
        mid = by_heuristic(rows, 800.0)
        for kind in FOUR:
            assert mid[kind].mean_degradation < tight[kind].mean_degradation

        widest = by_heuristic(rows, 2000.0)
        dod = widest[HeuristicKind.DOD_FIRST].mean_degradation
        assert widest[HeuristicKind.MIN_POWER_DEFICIT].mean_degradation < dod
        assert widest[HeuristicKind.MIN_NET_ENERGY].mean_degradation < dod
