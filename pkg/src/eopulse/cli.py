"""Command-line entry point.

Subcommands: grape, drlpe, pareto, noise-sweep, geodesic. Each validates
its configuration fully before creating the run directory, then writes a
stable layout: manifest.txt, config.cfg (exact echo), results.csv, task
tables (trace.csv), per-row pulse grids under pulses/ and Bloch
trajectories under trajectories/.
"""

import argparse
import math
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import _backend
from .config import (
    ConfigError,
    RunConfig,
    apply_fast,
    build_system,
    build_target,
    parse_config,
    serialize_config,
)
from .experiments import (
    METHOD_DRLPE,
    METHOD_DRLPE_WARM,
    METHOD_GRAPE,
    SweepRow,
    geodesic_experiment,
    log_noise_schedule,
    mean_action_pulses,
    noise_sweep,
    noisy_state_fidelity,
    pareto_sweep,
)
from .grape import GrapeConfig, optimize
from .qmath import bloch_vector, density, ket
from .rl import TrainConfig, train_rla1, train_rla2, warm_start
from .runio import (
    write_episode_trace,
    write_grape_trace,
    write_manifest,
    write_pulses,
    write_results,
    write_trajectory,
)
from .system import bloch_trajectory, energetic_cost, path_length


def _grape_config(cfg: RunConfig) -> GrapeConfig:
    g = cfg.grape
    return GrapeConfig(w_f=g.w_f, w_e=g.w_e, eps_f=g.eps_f, eps_e=g.eps_e,
                       n_iterations=g.n_iterations, seed=g.seed,
                       init_scale=g.init_scale)


def _train_config(cfg: RunConfig, n_episodes: int | None = None) -> TrainConfig:
    d = cfg.drlpe
    return TrainConfig(n_episodes=n_episodes or d.n_episodes,
                       learning_rate=d.learning_rate, batch_size=d.batch_size,
                       baseline_decay=d.baseline_decay, std_start=d.std_start,
                       std_end=d.std_end, seed=d.seed, w_f=d.w_f, w_e=d.w_e,
                       hidden_sizes=tuple(d.hidden_sizes), momentum=d.momentum,
                       imitation_metric=d.imitation_metric)


def _target_bloch(u_target, dim):
    if dim != 2:
        return (math.nan, math.nan, math.nan)
    psi0 = ket(0, 2)
    return tuple(bloch_vector(density(u_target @ psi0)))


def _write_rows(run_dir: Path, result, spec, u_target, with_traj: bool) -> None:
    ma = None
    if result.fidelity_ma is not None:
        ma = {"fidelity_ma": result.fidelity_ma,
              "energetic_cost_ma": result.energetic_cost_ma}
    write_results(run_dir / "results.csv", result.rows, ma)
    pulse_dir = run_dir / "pulses"
    pulse_dir.mkdir(exist_ok=True)
    for row, pulses in zip(result.rows, result.pulses):
        write_pulses(pulse_dir / f"row{row.row:03d}.csv", pulses,
                     spec.control_labels)
    if with_traj and result.trajectories:
        traj_dir = run_dir / "trajectories"
        traj_dir.mkdir(exist_ok=True)
        target_vec = _target_bloch(u_target, spec.dim)
        for row, traj in zip(result.rows, result.trajectories):
            if traj is not None:
                write_trajectory(traj_dir / f"row{row.row:03d}.csv", traj,
                                 target_vec)


class _Result:
    """Minimal SweepResult-shaped holder for single-run tasks."""

    def __init__(self, rows, pulses, trajectories):
        self.rows = rows
        self.pulses = pulses
        self.trajectories = trajectories
        self.fidelity_ma = None
        self.energetic_cost_ma = None


def run(cfg: RunConfig, jobs: int = 1) -> Path:
    """Execute one task and write its run directory; returns the directory."""
    started = time.perf_counter()
    spec = build_system(cfg)
    target_name, u_target = build_target(cfg)
    run_dir = Path(cfg.out)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.cfg").write_text(serialize_config(cfg))

    psi0 = ket(0, spec.dim)
    is_1q = spec.n_qubits == 1

    if cfg.task == "grape":
        gcfg = _grape_config(cfg)
        trace = optimize(spec, gcfg, u_target)
        pulses = trace.final_pulses
        write_grape_trace(run_dir / "trace.csv", trace)
        plen = path_length(spec, pulses, psi0) if is_1q else math.nan
        row = SweepRow(0, METHOD_GRAPE, target_name, gcfg.w_f, gcfg.w_e,
                       gcfg.eps_f, gcfg.eps_e, spec.t1, spec.t2, gcfg.seed,
                       trace.final_fidelity, 1.0 - trace.final_fidelity,
                       trace.final_energetic_cost, plen, 0.0)
        result = _Result([row], [pulses],
                         [bloch_trajectory(spec, pulses, psi0)] if is_1q else [])
        _write_rows(run_dir, result, spec, u_target, is_1q)

    elif cfg.task == "drlpe":
        tcfg = _train_config(cfg)
        method = METHOD_DRLPE
        init = None
        if cfg.drlpe.warm_start:
            method = METHOD_DRLPE_WARM
            gtrace = optimize(spec, _grape_config(cfg), u_target)
            rla2_policy, _ = train_rla2(
                spec, gtrace.final_pulses,
                _train_config(cfg, n_episodes=cfg.drlpe.imitation_episodes))
            init = warm_start(rla2_policy)
        policy, records = train_rla1(spec, u_target, tcfg, init_policy=init)
        write_episode_trace(run_dir / "trace.csv", records, tcfg.w_f, tcfg.w_e)
        pulses = mean_action_pulses(policy, records[0].observation,
                                     (spec.n_controls, spec.n_slices), 1.0)
        fid = noisy_state_fidelity(spec, pulses, u_target)
        cost = energetic_cost(spec, pulses)
        plen = path_length(spec, pulses, psi0) if is_1q else math.nan
        row = SweepRow(0, method, target_name, tcfg.w_f, tcfg.w_e, math.nan,
                       math.nan, spec.t1, spec.t2, tcfg.seed, fid, 1.0 - fid,
                       cost, plen, 0.0)
        result = _Result([row], [pulses],
                         [bloch_trajectory(spec, pulses, psi0)] if is_1q else [])
        _write_rows(run_dir, result, spec, u_target, is_1q)

    elif cfg.task == "pareto":
        result = pareto_sweep(spec, [(target_name, u_target)],
                              list(cfg.pareto.weights), list(cfg.pareto.eps_pairs),
                              list(cfg.pareto.seeds),
                              n_iterations=cfg.grape.n_iterations,
                              init_scale=cfg.grape.init_scale, n_jobs=jobs)
        _write_rows(run_dir, result, spec, u_target, False)

    elif cfg.task == "noise-sweep":
        schedule = log_noise_schedule(spec.total_time, cfg.noise.points,
                                      cfg.noise.hi_factor, cfg.noise.lo_factor)
        result = noise_sweep(spec, u_target, cfg.noise.method, schedule,
                             _grape_config(cfg), _train_config(cfg),
                             target_name=target_name,
                             ma_window=cfg.noise.ma_window)
        _write_rows(run_dir, result, spec, u_target, False)

    elif cfg.task == "geodesic":
        result = geodesic_experiment(spec, u_target, list(cfg.geodesic.methods),
                                     list(cfg.geodesic.weights),
                                     _grape_config(cfg), _train_config(cfg),
                                     target_name=target_name)
        _write_rows(run_dir, result, spec, u_target, True)

    else:  # unreachable after validation
        raise ConfigError(f"unknown task {cfg.task!r}", "task")

    wall = time.perf_counter() - started
    rows = result.rows
    write_manifest(run_dir, cfg.task, _backend.active_backend(), wall,
                   row_wall_times=[r.wall_time_s for r in rows],
                   extra={"n_rows": len(rows)})
    return run_dir


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", default=None,
                   help="config file (defaults are used when omitted)")
    p.add_argument("--target", metavar="GATE", default=None,
                   help="override the target gate name")
    p.add_argument("--seed", type=int, default=None,
                   help="override the optimizer seed")
    p.add_argument("--out", metavar="DIR", default=None,
                   help="run directory (overrides config and EOPULSE_OUT)")
    p.add_argument("--fast", action="store_true",
                   help="desk scale: iteration/episode counts divided by 10")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for sweep rows")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eopulse",
        description="Energy-aware quantum control pulse optimization")
    sub = parser.add_subparsers(dest="task", required=True)
    for task in ("grape", "drlpe", "pareto", "noise-sweep", "geodesic"):
        _add_common_flags(sub.add_parser(task))
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config, task_override=args.task)
        if args.target is not None:
            cfg = replace(cfg, target=replace(cfg.target, gate=args.target))
        if args.seed is not None:
            cfg = replace(cfg,
                          grape=replace(cfg.grape, seed=args.seed),
                          drlpe=replace(cfg.drlpe, seed=args.seed))
        out = args.out or os.environ.get("EOPULSE_OUT") or cfg.out
        cfg = replace(cfg, out=out)
        if args.fast:
            cfg = apply_fast(cfg)
        # Re-validate after overrides (e.g. an unknown --target value).
        cfg = parse_config(serialize_config(cfg))
    except ConfigError as exc:
        print(f"eopulse: config error: {exc}", file=sys.stderr)
        return 2

    try:
        run_dir = run(cfg, jobs=args.jobs)
    except Exception as exc:
        print(f"eopulse: {args.task} failed: {exc}", file=sys.stderr)
        return 1
    print(f"{args.task}: wrote {run_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
