"""Run-directory output: manifest, tabular results, pulses, trajectories.

All tabular files are comma-separated with a single header row, a fixed
column order, and a leading schema_version column; the plotting component
consumes exactly these schemas. Wall-clock and timestamp information lives
only in the manifest, so re-running with identical seeds reproduces every
tabular file byte for byte.
"""

import hashlib
import math
import time
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

RESULTS_COLUMNS = ("row", "method", "target", "w_f", "w_e", "eps_f", "eps_e",
                   "t1", "t2", "seed", "fidelity", "infidelity",
                   "energetic_cost", "path_length")
TRACE_COLUMNS = ("iteration", "fidelity", "energetic_cost", "combined_cost")
TRAJECTORY_COLUMNS = ("slice", "x", "y", "z", "target_x", "target_y", "target_z")


def _fmt(value) -> str:
    if isinstance(value, np.floating):
        value = float(value)
    elif isinstance(value, np.integer):
        value = int(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def write_csv(path, columns, rows) -> None:
    """Write rows (iterables of cells) with a schema_version lead column."""
    path = Path(path)
    lines = ["schema_version," + ",".join(columns)]
    for row in rows:
        lines.append(",".join([str(SCHEMA_VERSION)] + [_fmt(c) for c in row]))
    path.write_text("\n".join(lines) + "\n")


def write_results(path, sweep_rows, ma: dict | None = None) -> None:
    """The per-run results table; optional *_ma columns for noise sweeps."""
    columns = RESULTS_COLUMNS
    extra = ()
    if ma:
        extra = tuple(sorted(ma))
        columns = columns + extra
    rows = []
    for i, r in enumerate(sweep_rows):
        row = [r.row, r.method, r.target, r.w_f, r.w_e, r.eps_f, r.eps_e,
               r.t1, r.t2, r.seed, r.fidelity, r.infidelity, r.energetic_cost,
               r.path_length]
        for name in extra:
            series = ma[name]
            row.append(float(series[i]) if i < len(series) else math.nan)
        rows.append(row)
    write_csv(path, columns, rows)


def write_grape_trace(path, trace) -> None:
    rows = [(i, trace.fidelity[i], trace.energetic_cost[i], trace.combined_cost[i])
            for i in range(len(trace.fidelity))]
    write_csv(path, TRACE_COLUMNS, rows)


def write_episode_trace(path, records, w_f: float, w_e: float) -> None:
    """Same tabular shape as the optimizer trace, one row per episode."""
    rows = [(i, r.fidelity, r.energetic_cost,
             w_f * (1.0 - r.fidelity) + w_e * r.energetic_cost)
            for i, r in enumerate(records)]
    write_csv(path, TRACE_COLUMNS, rows)


def write_pulses(path, pulses, labels) -> None:
    """N rows x K columns; the header names the controls."""
    amps = pulses.amplitudes
    if len(labels) != amps.shape[0]:
        raise ValueError("one label per control is required")
    rows = [(n, *amps[:, n]) for n in range(amps.shape[1])]
    write_csv(path, ("slice", *labels), rows)


def write_trajectory(path, traj, target_vec) -> None:
    tx, ty, tz = (float(v) for v in target_vec)
    rows = [(n, traj[n, 0], traj[n, 1], traj[n, 2], tx, ty, tz)
            for n in range(traj.shape[0])]
    write_csv(path, TRAJECTORY_COLUMNS, rows)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(run_dir, task: str, backend: str, wall_time_s: float,
                   row_wall_times=(), extra: dict | None = None) -> None:
    """Key-value manifest with config echo hash and per-file digests.

    The manifest is the only output carrying timestamps and wall times.
    """
    run_dir = Path(run_dir)
    lines = [
        f"schema_version = {SCHEMA_VERSION}",
        f"task = {task}",
        f"backend = {backend}",
        f"created_utc = {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}",
        f"wall_time_s = {wall_time_s:.3f}",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    lines.append("")
    lines.append("[files]")
    for f in sorted(run_dir.rglob("*")):
        if f.is_file() and f.name != "manifest.txt":
            lines.append(f"{f.relative_to(run_dir)} = {_sha256(f)}")
    if row_wall_times:
        lines.append("")
        lines.append("[row_wall_times_s]")
        for i, w in enumerate(row_wall_times):
            lines.append(f"row{i:03d} = {w:.3f}")
    (run_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def read_manifest(path) -> dict:
    """Parse the flat key-value part of a manifest (sections flattened)."""
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("[") or "=" not in line:
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out
