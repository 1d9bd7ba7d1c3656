"""Readers for the versioned CSV tables and manifest of a run directory.

A schema_version mismatch is a hard error, never a best-effort parse.
"""

import csv
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

RESULTS_FILE = "results.csv"
TRACE_FILE = "trace.csv"
PULSES_DIR = "pulses"
TRAJECTORIES_DIR = "trajectories"


class SchemaError(ValueError):
    """Missing or ill-formed run-directory table."""


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path) -> dict:
    """Read one versioned CSV into {column: list}; numbers become floats."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(
            f"{path} is missing; expected a schema-version-{SCHEMA_VERSION} "
            "comma-separated table with a single header row")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        if header[0] != "schema_version":
            raise SchemaError(
                f"{path}: first column must be schema_version, got {header[0]!r}")
        columns = {name: [] for name in header[1:]}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(f"{path}:{lineno}: expected {len(header)} "
                                  f"cells, got {len(row)}")
            version = int(float(row[0]))
            if version != SCHEMA_VERSION:
                raise SchemaError(
                    f"{path}:{lineno}: schema_version {version} != expected "
                    f"{SCHEMA_VERSION}")
            for name, cell in zip(header[1:], row[1:]):
                columns[name].append(_parse_cell(cell))
    return columns


def _require(columns: dict, names, path) -> None:
    missing = [n for n in names if n not in columns]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {missing}; expected "
                          f"schema columns {sorted(columns) + missing}")


def read_results(run_dir) -> dict:
    path = Path(run_dir) / RESULTS_FILE
    cols = read_table(path)
    _require(cols, ("row", "method", "w_f", "w_e", "t1", "fidelity",
                    "infidelity", "energetic_cost", "path_length"), path)
    return cols


def read_trace(run_dir) -> dict:
    path = Path(run_dir) / TRACE_FILE
    cols = read_table(path)
    _require(cols, ("iteration", "fidelity", "energetic_cost",
                    "combined_cost"), path)
    return cols


def read_pulses(run_dir, row: int = 0):
    """Returns (slice indices, {control label: amplitudes})."""
    path = Path(run_dir) / PULSES_DIR / f"row{row:03d}.csv"
    cols = read_table(path)
    _require(cols, ("slice",), path)
    slices = np.asarray(cols.pop("slice"))
    return slices, {name: np.asarray(vals) for name, vals in cols.items()}


def read_trajectory(run_dir, row: int = 0):
    """Returns (trajectory (N+1, 3), target Bloch vector (3,))."""
    path = Path(run_dir) / TRAJECTORIES_DIR / f"row{row:03d}.csv"
    cols = read_table(path)
    _require(cols, ("slice", "x", "y", "z", "target_x", "target_y",
                    "target_z"), path)
    traj = np.column_stack([cols["x"], cols["y"], cols["z"]])
    target = np.array([cols["target_x"][0], cols["target_y"][0],
                       cols["target_z"][0]])
    return traj, target


def moving_average(series, window: int) -> np.ndarray:
    """Valid-region sliding mean, matching the producer's convention."""
    series = np.asarray(series, dtype=float)
    window = max(1, min(int(window), series.size))
    return np.convolve(series, np.ones(window) / window, mode="valid")
