"""Figure rendering from eopulse run directories.

Five figure kinds: pulses, pareto, noise, bloch, pathlength. Rendering is
deterministic for identical inputs and never mutates the run directory.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import (
    moving_average,
    read_pulses,
    read_results,
    read_trajectory,
)

KINDS = ("pulses", "pareto", "noise", "bloch", "pathlength")

# Caption color convention for the Bloch figure.
COLOR_INITIAL = "green"
COLOR_TARGET = "orange"
COLOR_TRAJECTORY = "blue"

# Noise-sweep curve colors: fidelity red, energetic cost green.
COLOR_FIDELITY = "tab:red"
COLOR_COST = "tab:green"

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Software": "pulseplots"}}


@dataclass(frozen=True)
class FigureSpec:
    """What to render: kind, input run directory, output path, styling."""

    kind: str
    run_dir: Path
    output: Path
    ma_window: int = 5
    marker_step: int = 1
    row: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {KINDS}")
        if self.ma_window < 1 or self.marker_step < 1:
            raise ValueError("ma_window and marker_step must be >= 1")


def _fig_pulses(spec: FigureSpec):
    slices, channels = read_pulses(spec.run_dir, spec.row)
    fig, axes = plt.subplots(len(channels), 1, sharex=True,
                             figsize=(7, 1.8 * len(channels)), squeeze=False)
    for ax, (label, amps) in zip(axes[:, 0], channels.items()):
        ax.step(slices, amps, where="mid", lw=1.2)
        ax.axhline(0.0, color="grey", lw=0.6, ls="dashed")
        ax.set_ylabel(label)
        ax.set_ylim(-1.05, 1.05)
    axes[-1, 0].set_xlabel("time slice")
    fig.suptitle(f"control pulses (row {spec.row})")
    fig.tight_layout()
    return fig


def _fig_pareto(spec: FigureSpec):
    cols = read_results(spec.run_dir)
    infid = np.asarray(cols["infidelity"])
    cost = np.asarray(cols["energetic_cost"])
    w_e = np.asarray(cols["w_e"])
    order = np.argsort(w_e, kind="stable")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(infid[order], cost[order], color="0.7", lw=0.8, zorder=1)
    sel = order[:: spec.marker_step]
    ax.scatter(infid[sel], cost[sel], marker="D", c=w_e[sel], cmap="viridis",
               zorder=2)
    for i in sel:
        ax.annotate(f"{w_e[i]:.1f}", (infid[i], cost[i]), fontsize=7,
                    xytext=(3, 3), textcoords="offset points")
    ax.set_xscale("log")
    ax.set_xlabel("infidelity (1 - F)")
    ax.set_ylabel("energetic cost")
    ax.set_title("fidelity / energy trade-off (diamonds: weight settings)")
    fig.tight_layout()
    return fig


def _fig_noise(spec: FigureSpec):
    cols = read_results(spec.run_dir)
    t1 = np.asarray(cols["t1"])
    fid = np.asarray(cols["fidelity"])
    cost = np.asarray(cols["energetic_cost"])
    window = max(1, min(spec.ma_window, len(fid)))
    off = (window - 1) // 2
    x_ma = t1[off:off + len(fid) - window + 1]
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ax.plot(t1, fid, color=COLOR_FIDELITY, alpha=0.35, lw=1.0, label="fidelity")
    ax.plot(x_ma, moving_average(fid, window), color=COLOR_FIDELITY, lw=2.2,
            label=f"fidelity MA({window})")
    ax.plot(t1, cost, color=COLOR_COST, alpha=0.35, lw=1.0,
            label="energetic cost")
    ax.plot(x_ma, moving_average(cost, window), color=COLOR_COST, lw=2.2,
            label=f"energetic cost MA({window})")
    ax.set_xscale("log")
    ax.invert_xaxis()  # noise increases rightward
    ax.set_xlabel("decoherence time T1 = T2 (units of gate time)")
    ax.set_ylabel("value")
    ax.set_title("performance under increasing noise")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _fig_bloch(spec: FigureSpec):
    traj, target = read_trajectory(spec.run_dir, spec.row)
    fig = plt.figure(figsize=(5.5, 5.5))
    ax = fig.add_subplot(projection="3d")
    u = np.linspace(0, 2 * np.pi, 40)
    v = np.linspace(0, np.pi, 20)
    xs = np.outer(np.cos(u), np.sin(v))
    ys = np.outer(np.sin(u), np.sin(v))
    zs = np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(xs, ys, zs, color="0.85", lw=0.3)
    ax.plot(traj[:, 0], traj[:, 1], traj[:, 2], color=COLOR_TRAJECTORY,
            lw=1.6, label="trajectory")
    ax.quiver(0, 0, 0, *traj[0], color=COLOR_INITIAL, lw=2,
              arrow_length_ratio=0.08, label="initial state")
    ax.quiver(0, 0, 0, *target, color=COLOR_TARGET, lw=2,
              arrow_length_ratio=0.08, label="target state")
    ax.set_box_aspect((1, 1, 1))
    ax.set_xlim(-1, 1), ax.set_ylim(-1, 1), ax.set_zlim(-1, 1)
    ax.set_xlabel("x"), ax.set_ylabel("y"), ax.set_zlabel("z")
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title(f"Bloch-sphere path (row {spec.row})")
    return fig


def _fig_pathlength(spec: FigureSpec):
    cols = read_results(spec.run_dir)
    methods = cols["method"]
    path = np.asarray(cols["path_length"])
    cost = np.asarray(cols["energetic_cost"])
    fid = np.asarray(cols["fidelity"])
    w_e = np.asarray(cols["w_e"])
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for method in dict.fromkeys(methods):  # stable unique order
        idx = np.array([i for i, m in enumerate(methods) if m == method])
        order = idx[np.argsort(w_e[idx], kind="stable")]
        ax.plot(path[order], cost[order], lw=0.8, alpha=0.6, label=method)
    sc = ax.scatter(path, cost, marker="D", c=fid, cmap="viridis", zorder=2)
    fig.colorbar(sc, ax=ax, label="fidelity")
    ax.set_xlabel("Bloch path length")
    ax.set_ylabel("energetic cost")
    ax.set_title("path length vs energetic cost (diamonds: weight settings)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "pulses": _fig_pulses,
    "pareto": _fig_pareto,
    "noise": _fig_noise,
    "bloch": _fig_bloch,
    "pathlength": _fig_pathlength,
}


def build_figure(spec: FigureSpec):
    """Build (but do not save) the matplotlib Figure for a spec."""
    return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> Path:
    """Render the figure to spec.output; returns the written path."""
    fig = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, **_SAVE_KWARGS)
    finally:
        plt.close(fig)
    return out
