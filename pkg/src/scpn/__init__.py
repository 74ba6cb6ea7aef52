"""Battery-aging-aware task scheduling study for LEO constellation computing."""

from .config import ConfigError, ScenarioConfig, load_config
from .degradation import DegradationCost, DegradationParams, task_degradation
from .orbit import EciVector, OrbitParams, SunModel, WalkerConfig, walker_init
from .power import BatteryState, SatelliteSpec
from .sched import ExecutionPlan, HeuristicKind, TaskSpec, TrialResult, schedule
from .sim import (
    Constellation,
    SweepSpec,
    background_state,
    generate_tasks,
    instantiate,
    run_regime_experiment,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BatteryState",
    "ConfigError",
    "Constellation",
    "DegradationCost",
    "DegradationParams",
    "EciVector",
    "ExecutionPlan",
    "HeuristicKind",
    "OrbitParams",
    "SatelliteSpec",
    "ScenarioConfig",
    "SunModel",
    "SweepSpec",
    "TaskSpec",
    "TrialResult",
    "WalkerConfig",
    "__version__",
    "background_state",
    "generate_tasks",
    "instantiate",
    "load_config",
    "run_regime_experiment",
    "run_sweep",
    "schedule",
    "task_degradation",
    "walker_init",
]
