"""Experiment suites: weight sweeps, noise sweeps, and geodesic analysis.

Each suite returns a SweepResult whose rows are reproducible from their
recorded (seed, config) pair; per-run seeds are base seed + row index.
Metric conventions: the weight-sweep and geodesic figures report
closed-system process fidelity, the noise sweep reports noisy-state fidelity
from rho_0 = |0..0><0..0|.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .grape import GrapeConfig, optimize
from .qmath import density, ket, process_fidelity, state_fidelity
from .rl import TrainConfig, policy_forward, train_rla1, train_rla2, warm_start
from .system import (
    PulseSet,
    SystemSpec,
    bloch_trajectory,
    energetic_cost,
    path_length,
    propagate_closed,
    propagate_noisy,
)

METHOD_GRAPE = "EO-GRAPE"
METHOD_DRLPE = "EO-DRLPE"
METHOD_DRLPE_WARM = "EO-DRLPE+warm"
METHODS = (METHOD_GRAPE, METHOD_DRLPE, METHOD_DRLPE_WARM)


@dataclass
class SweepRow:
    """One completed run of a sweep."""

    row: int
    method: str
    target: str
    w_f: float
    w_e: float
    eps_f: float
    eps_e: float
    t1: float
    t2: float
    seed: int
    fidelity: float
    infidelity: float
    energetic_cost: float
    path_length: float  # nan for multi-qubit systems
    wall_time_s: float


@dataclass
class SweepResult:
    """Rows plus per-row artifacts (final pulses, optional Bloch trajectories)."""

    rows: list
    pulses: list
    trajectories: list = field(default_factory=list)
    fidelity_ma: np.ndarray | None = None
    energetic_cost_ma: np.ndarray | None = None
    ma_window: int | None = None


def moving_average(series, window: int) -> np.ndarray:
    """Simple sliding-window mean over the valid region (length N - window + 1)."""
    series = np.asarray(series, dtype=np.float64)
    if series.size == 0:
        raise ValueError("empty series")
    if not 1 <= window <= series.size:
        raise ValueError(f"window {window} out of range for length {series.size}")
    return np.convolve(series, np.ones(window) / window, mode="valid")


def log_noise_schedule(total_time: float, points: int = 10,
                       hi: float = 100.0, lo: float = 1.0):
    """Log-spaced (t1, t2) pairs from hi*T down to lo*T with t1 = t2."""
    ts = np.geomspace(hi * total_time, lo * total_time, points)
    return [(float(t), float(t)) for t in ts]


def weight_grid(n: int = 10):
    """The standard weight ladder (w_f, w_e) = (1, 0) .. (0.1, 0.9) in steps of 0.1."""
    return [(round(1.0 - 0.1 * i, 10), round(0.1 * i, 10)) for i in range(n)]


def _grape_row(args):
    (row, spec, target_name, u_target, w_f, w_e, eps_f, eps_e, seed,
     n_iterations, init_scale, want_traj, psi0) = args
    t0 = time.perf_counter()
    cfg = GrapeConfig(w_f=w_f, w_e=w_e, eps_f=eps_f, eps_e=eps_e,
                      n_iterations=n_iterations, seed=seed, init_scale=init_scale)
    trace = optimize(spec, cfg, u_target)
    pulses = trace.final_pulses
    fid = trace.final_fidelity
    cost = trace.final_energetic_cost
    traj = None
    plen = math.nan
    if spec.n_qubits == 1:
        traj = bloch_trajectory(spec, pulses, psi0)
        plen = float(np.sum(np.linalg.norm(np.diff(traj, axis=0), axis=1)))
    wall = time.perf_counter() - t0
    sweep_row = SweepRow(row, METHOD_GRAPE, target_name, cfg.w_f, cfg.w_e,
                         eps_f, eps_e, spec.t1, spec.t2, seed, fid, 1.0 - fid,
                         cost, plen, wall)
    return sweep_row, pulses, (traj if want_traj else None)


def _run_jobs(fn, jobs, n_jobs: int):
    if n_jobs <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, jobs))


def pareto_sweep(spec: SystemSpec, targets, weights, lrs, seeds,
                 n_iterations: int = 100, init_scale: float = 1.0,
                 n_jobs: int = 1) -> SweepResult:
    """One EO-GRAPE run per (target, learning-rate pair, weight, seed).

    ``targets`` is a list of (name, unitary) pairs; rows appear in product
    order with the weight ladder innermost, so each (target, lr, seed) group
    is contiguous and ordered by ascending w_e.
    """
    psi0 = ket(0, spec.dim)
    jobs = []
    row = 0
    for target_name, u_target in targets:
        for eps_f, eps_e in lrs:
            for seed in seeds:
                for w_f, w_e in weights:
                    jobs.append((row, spec, target_name, u_target, w_f, w_e,
                                 eps_f, eps_e, seed, n_iterations, init_scale,
                                 False, psi0))
                    row += 1
    results = _run_jobs(_grape_row, jobs, n_jobs)
    rows = [r for r, _, _ in results]
    pulses = [p for _, p, _ in results]
    return SweepResult(rows=rows, pulses=pulses)


def noisy_state_fidelity(spec: SystemSpec, pulses: PulseSet,
                          u_target: np.ndarray) -> float:
    rho0 = density(ket(0, spec.dim))
    rho_t = u_target @ rho0 @ u_target.conj().T
    return state_fidelity(rho_t, propagate_noisy(spec, pulses, rho0))


def mean_action_pulses(policy, observation, shape, bound) -> PulseSet:
    means = policy_forward(policy, observation)
    return PulseSet(np.clip(means, -bound, bound).reshape(shape), bound)


def noise_sweep(spec: SystemSpec, u_target: np.ndarray, method: str,
                schedule, grape_config: GrapeConfig,
                train_config: TrainConfig | None = None,
                target_name: str = "target", ma_window: int = 5) -> SweepResult:
    """Re-optimize from scratch at each noise point and score on the noisy system.

    Records the noisy-state fidelity (the declared metric for noise figures)
    and the energetic cost of the final pulses, plus moving averages of both
    across the schedule.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    t1s = [t1 for t1, _ in schedule]
    if any(b > a + 1e-12 for a, b in zip(t1s, t1s[1:])):
        raise ValueError("noise schedule must be non-increasing in t1")

    rows, pulse_list = [], []
    if method != METHOD_GRAPE and train_config is None:
        raise ValueError("train_config is required for RL methods")
    psi0 = ket(0, spec.dim)
    for i, (t1, t2) in enumerate(schedule):
        t0 = time.perf_counter()
        spec_i = replace(spec, t1=float(t1), t2=float(t2))
        seed_i = (grape_config.seed if method == METHOD_GRAPE
                  else train_config.seed) + i
        if method == METHOD_GRAPE:
            cfg = replace(grape_config, seed=seed_i)
            trace = optimize(spec_i, cfg, u_target)
            pulses = trace.final_pulses
            w_f, w_e = cfg.w_f, cfg.w_e
            eps_f, eps_e = cfg.eps_f, cfg.eps_e
        else:
            cfg = replace(train_config, seed=seed_i)
            init = None
            if method == METHOD_DRLPE_WARM:
                gcfg = replace(grape_config, seed=seed_i)
                gtrace = optimize(spec_i, gcfg, u_target)
                rla2_policy, _ = train_rla2(spec_i, gtrace.final_pulses, cfg)
                init = warm_start(rla2_policy)
            policy, records = train_rla1(spec_i, u_target, cfg, init_policy=init)
            pulses = mean_action_pulses(policy, records[0].observation,
                                         (spec.n_controls, spec.n_slices), 1.0)
            w_f, w_e = cfg.w_f, cfg.w_e
            eps_f, eps_e = math.nan, math.nan
        fid = noisy_state_fidelity(spec_i, pulses, u_target)
        cost = energetic_cost(spec_i, pulses)
        plen = path_length(spec_i, pulses, psi0) if spec.n_qubits == 1 else math.nan
        rows.append(SweepRow(i, method, target_name, w_f, w_e, eps_f, eps_e,
                             spec_i.t1, spec_i.t2, seed_i, fid, 1.0 - fid,
                             cost, plen, time.perf_counter() - t0))
        pulse_list.append(pulses)

    window = min(ma_window, len(rows))
    return SweepResult(
        rows=rows,
        pulses=pulse_list,
        fidelity_ma=moving_average([r.fidelity for r in rows], window),
        energetic_cost_ma=moving_average([r.energetic_cost for r in rows], window),
        ma_window=window,
    )


def geodesic_experiment(spec: SystemSpec, u_target: np.ndarray, methods,
                        weights, grape_config: GrapeConfig,
                        train_config: TrainConfig | None = None,
                        target_name: str = "rx_pi_2") -> SweepResult:
    """Path-length study on the Bloch sphere for a single-qubit target.

    For every method and weight setting, runs the optimizer, records the
    final pulses' Bloch path length and energetic cost, and keeps the full
    (N + 1)-point trajectory from |0>.
    """
    if spec.n_qubits != 1:
        raise ValueError("the geodesic analysis is a single-qubit experiment")
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        if method != METHOD_GRAPE and train_config is None:
            raise ValueError("train_config is required for RL methods")
    psi0 = ket(0, 2)
    rows, pulse_list, trajs = [], [], []
    row = 0
    for method in methods:
        for w_f, w_e in weights:
            t0 = time.perf_counter()
            # Fixed seed across the weight ladder so rows differ only in the
            # weights; cross-method rows still vary by their own base seed.
            seed_i = (grape_config.seed if method == METHOD_GRAPE
                      else train_config.seed)
            if method == METHOD_GRAPE:
                cfg = replace(grape_config, w_f=w_f, w_e=w_e, seed=seed_i)
                trace = optimize(spec, cfg, u_target)
                pulses = trace.final_pulses
                fid = trace.final_fidelity
                eps_f, eps_e = cfg.eps_f, cfg.eps_e
            else:
                cfg = replace(train_config, w_f=w_f, w_e=w_e, seed=seed_i)
                init = None
                if method == METHOD_DRLPE_WARM:
                    gtrace = optimize(spec, replace(grape_config, w_f=w_f, w_e=w_e,
                                                    seed=seed_i), u_target)
                    rla2_policy, _ = train_rla2(spec, gtrace.final_pulses, cfg)
                    init = warm_start(rla2_policy)
                policy, records = train_rla1(spec, u_target, cfg, init_policy=init)
                pulses = mean_action_pulses(policy, records[0].observation,
                                             (spec.n_controls, spec.n_slices), 1.0)
                u_final, _ = propagate_closed(spec, pulses)
                fid = process_fidelity(u_target, u_final)
                eps_f, eps_e = math.nan, math.nan
            traj = bloch_trajectory(spec, pulses, psi0)
            plen = float(np.sum(np.linalg.norm(np.diff(traj, axis=0), axis=1)))
            cost = energetic_cost(spec, pulses)
            rows.append(SweepRow(row, method, target_name, w_f / (w_f + w_e),
                                 w_e / (w_f + w_e), eps_f, eps_e, spec.t1,
                                 spec.t2, seed_i, fid, 1.0 - fid, cost, plen,
                                 time.perf_counter() - t0))
            pulse_list.append(pulses)
            trajs.append(traj)
            row += 1
    return SweepResult(rows=rows, pulses=pulse_list, trajectories=trajs)
