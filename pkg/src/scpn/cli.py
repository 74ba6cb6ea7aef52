"""Command-line surface binding configs, experiments, and outputs.

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 invariant
violation from the oracle gate. Every run directory gets a manifest with the
fully resolved scenario and sampled satellite attributes, sufficient to
reproduce the output byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .checks import run_oracle_checks
from .config import ConfigError, ScenarioConfig, load_config
from .sched import HeuristicKind
from .sim import (
    Constellation,
    SweepSpec,
    aggregate_trials,
    run_regime_experiment,
    run_sweep,
    write_aggregate_csv,
    write_trials_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_INVARIANT = 3

DEFAULT_HEURISTICS = "random,dod-first,min-power-deficit,min-net-energy"


def _parse_range(text: str, key: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(key, f"expected low:high, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(key, f"expected numbers, got {text!r}")
    if not lo <= hi:
        raise ConfigError(key, f"low must not exceed high, got {text!r}")
    return lo, hi


def _parse_grid(text: str, log_spaced: bool) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("grid", f"expected low:high:count, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError("grid", f"expected low:high:count, got {text!r}")
    if n < 1:
        raise ConfigError("grid", f"count must be at least 1, got {n}")
    if not 0 < lo <= hi:
        raise ConfigError("grid", f"expected 0 < low <= high, got {text!r}")
    if n == 1:
        return (lo,)
    values = np.geomspace(lo, hi, n) if log_spaced else np.linspace(lo, hi, n)
    return tuple(float(v) for v in values)


def _parse_heuristics(text: str) -> list[HeuristicKind]:
    kinds = []
    for token in text.split(","):
        token = token.strip()
        try:
            kinds.append(HeuristicKind(token))
        except ValueError:
            known = ", ".join(k.value for k in HeuristicKind)
            raise ConfigError("heuristics", f"unknown heuristic {token!r}; known: {known}")
    if not kinds:
        raise ConfigError("heuristics", "need at least one heuristic")
    return kinds


def _prepare_out_dir(out_dir: str, force: bool) -> str:
    os.makedirs(out_dir, exist_ok=True)
    manifest = os.path.join(out_dir, "manifest.json")
    if os.path.exists(manifest) and not force:
        raise FileExistsError(
            f"{manifest} already exists; pass --force to overwrite the run"
        )
    return manifest


def _write_manifest(
    path: str,
    command: str,
    cfg: ScenarioConfig,
    constellation: Constellation,
    extra: dict,
) -> None:
    doc = {
        "package_version": __version__,
        "command": command,
        "config": cfg.to_dict(),
        "satellites": {
            "panel_area_m2": [s.panel_area_m2 for s in constellation.specs],
            "panel_efficiency": [s.panel_efficiency for s in constellation.specs],
            "operational_power_w": [s.operational_power_w for s in constellation.specs],
            "initial_soc": [1.0 - float(d) for d in constellation.initial_dods],
        },
        **extra,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _print_aggregate(rows) -> None:
    print(f"{'sweep_value':>14}  {'heuristic':<18} {'mean':>12} {'std':>12} {'feas':>6} {'infeas':>6}")
    for r in rows:
        print(
            f"{r.sweep_value:>14.6g}  {r.heuristic.value:<18} "
            f"{r.mean_degradation:>12.6g} {r.std_degradation:>12.6g} "
            f"{r.n_feasible:>6d} {r.n_infeasible:>6d}"
        )


def _common_overrides(args) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.dt is not None:
        overrides["integration_dt_s"] = args.dt
    if getattr(args, "efficiency", None) is not None:
        overrides["panel_efficiency"] = _parse_range(args.efficiency, "efficiency")
    return overrides


def _cmd_regime(args) -> int:
    cfg = load_config(args.config, _common_overrides(args))
    heuristics = _parse_heuristics(args.heuristics)
    manifest = _prepare_out_dir(args.out, args.force)
    constellation, trials, rows = run_regime_experiment(
        cfg, heuristics, n_tasks=args.tasks, threads=args.threads,
        grid_starts=args.grid_starts, grid_freqs=args.grid_freqs,
    )
    trials_csv = os.path.join(args.out, "trials.csv")
    agg_csv = os.path.join(args.out, "aggregate.csv")
    write_trials_csv(trials_csv, trials)
    write_aggregate_csv(agg_csv, rows)
    _write_manifest(
        manifest, "regime", cfg, constellation,
        {
            "n_tasks": args.tasks,
            "heuristics": [k.value for k in heuristics],
            "grid_starts": args.grid_starts,
            "grid_freqs": args.grid_freqs,
            "outputs": {"trials_csv": "trials.csv", "aggregate_csv": "aggregate.csv"},
        },
    )
    print(f"regime run: {len(trials)} rows -> {args.out}")
    _print_aggregate(rows)
    return EXIT_OK


def _cmd_sweep(args, parameter: str) -> int:
    cfg = load_config(args.config, _common_overrides(args))
    heuristics = _parse_heuristics(args.heuristics)
    values = _parse_grid(args.grid, log_spaced=(parameter == "workload"))
    sweep = SweepSpec(
        parameter=parameter,
        values=values,
        trials_per_point=args.tasks,
        fixed_workload_cycles=args.workload if parameter == "budget" else 1e12,
        fixed_budget_s=args.budget if parameter == "workload" else 1500.0,
    )
    manifest = _prepare_out_dir(args.out, args.force)
    constellation, trials, rows = run_sweep(
        cfg, sweep, heuristics, threads=args.threads,
        grid_starts=args.grid_starts, grid_freqs=args.grid_freqs,
    )
    trials_csv = os.path.join(args.out, "trials.csv")
    agg_csv = os.path.join(args.out, "aggregate.csv")
    write_trials_csv(trials_csv, trials)
    write_aggregate_csv(agg_csv, rows)
    _write_manifest(
        manifest, f"sweep-{parameter}", cfg, constellation,
        {
            "sweep": {
                "parameter": sweep.parameter,
                "values": list(sweep.values),
                "trials_per_point": sweep.trials_per_point,
                "fixed_workload_cycles": sweep.fixed_workload_cycles,
                "fixed_budget_s": sweep.fixed_budget_s,
            },
            "heuristics": [k.value for k in heuristics],
            "grid_starts": args.grid_starts,
            "grid_freqs": args.grid_freqs,
            "outputs": {"trials_csv": "trials.csv", "aggregate_csv": "aggregate.csv"},
        },
    )
    print(f"{parameter} sweep: {len(values)} points -> {args.out}")
    _print_aggregate(rows)
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = load_config(args.config, _common_overrides(args))
    print(f"configuration ok ({cfg.n_satellites} satellites)")
    for key, value in cfg.to_dict().items():
        print(f"  {key} = {value}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    results = run_oracle_checks(dt_s=args.dt if args.dt is not None else 1.0, seed=args.seed or 7)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}")
    if failed:
        print(f"invariant violated: {failed[0].name}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, with_outputs: bool = True) -> None:
    parser.add_argument("--config", help="scenario config file (TOML)")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--dt", type=float, help="integration step override, seconds")
    if with_outputs:
        parser.add_argument("--out", required=True, help="output directory")
        parser.add_argument("--force", action="store_true", help="overwrite an existing run")
        parser.add_argument("--tasks", type=int, default=1000, help="trials per point")
        parser.add_argument("--heuristics", default=DEFAULT_HEURISTICS)
        parser.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        parser.add_argument("--grid-starts", type=int, default=5)
        parser.add_argument("--grid-freqs", type=int, default=5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scpn",
        description="Constellation energy simulation and aging-aware task scheduling",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("regime", help="paired heuristic comparison on one harvesting regime")
    _add_common(p)
    p.add_argument("--efficiency", help="panel efficiency range low:high")
    p.set_defaults(func=_cmd_regime)

    p = sub.add_parser("sweep-workload", help="sweep task workload at a fixed time budget")
    _add_common(p)
    p.add_argument("--efficiency", help="panel efficiency range low:high")
    p.add_argument("--grid", required=True, help="workload grid low:high:count (log-spaced)")
    p.add_argument("--budget", type=float, default=1500.0, help="fixed time budget, seconds")
    p.set_defaults(func=lambda a: _cmd_sweep(a, "workload"))

    p = sub.add_parser("sweep-budget", help="sweep time budget at a fixed workload")
    _add_common(p)
    p.add_argument("--efficiency", help="panel efficiency range low:high")
    p.add_argument("--grid", required=True, help="budget grid low:high:count (linear)")
    p.add_argument("--workload", type=float, default=1e12, help="fixed workload, cycles")
    p.set_defaults(func=lambda a: _cmd_sweep(a, "budget"))

    p = sub.add_parser("validate", help="resolve and validate the configuration")
    _add_common(p, with_outputs=False)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("oracle-check", help="run the analytic-oracle and invariant gate")
    _add_common(p, with_outputs=False)
    p.set_defaults(func=_cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, FileExistsError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
