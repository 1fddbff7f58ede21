"""Figure rendering for traces, fit reports and dataset statistics.

Everything draws through the Agg backend straight to files; figures land
next to the delimited output the CLI writes.  Time axes are seconds,
values are plant units.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .engine import Trace  # noqa: E402
from .fitting.tables import VARIABLES  # noqa: E402


def _save(fig, outdir: str, name: str) -> str:
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_trace(trace: Trace, outdir: str, conduits: tuple[int, ...] = (1, 2)) -> list[str]:
    """Render the standard trace panels; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    t = np.array(trace.column("t"))
    written = []

    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(t, trace.column("lwc_gm3"), lw=1.2, color="tab:blue")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("LWC (g/m$^3$)")
    ax.grid(alpha=0.3)
    written.append(_save(fig, outdir, "lwc.png"))

    fig, ax = plt.subplots(figsize=(8, 3))
    mvd = np.array([m if m is not None else np.nan for m in trace.column("mvd_um")])
    ax.plot(t, mvd, lw=1.2, color="tab:orange")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("MVD (µm)")
    ax.grid(alpha=0.3)
    written.append(_save(fig, outdir, "mvd.png"))

    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(t, trace.column("t_n_c"), lw=1.2, color="tab:red")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("T$_n$ (°C)")
    ax.grid(alpha=0.3)
    written.append(_save(fig, outdir, "t_n.png"))

    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    for c in conduits:
        flows = [row.water[c - 1]["flow_lph"] for row in trace.rows]
        sets = [row.water[c - 1]["setpoint_lph"] for row in trace.rows]
        axes[0].plot(t, flows, lw=1.0, label=f"valve {c} flow")
        axes[0].plot(t, sets, lw=0.8, ls="--", label=f"valve {c} setpoint")
        opens = [row.water[c - 1]["opening"] for row in trace.rows]
        axes[1].plot(t, opens, lw=1.0, label=f"valve {c}")
    axes[0].set_ylabel("water flow (L/h)")
    axes[0].legend(fontsize=8, ncol=2)
    axes[0].grid(alpha=0.3)
    axes[1].set_ylabel("opening (fraction)")
    axes[1].set_xlabel("time (s)")
    axes[1].grid(alpha=0.3)
    written.append(_save(fig, outdir, "water_valves.png"))

    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    for c in conduits:
        flows = [row.air[c - 1]["flow_lpm"] for row in trace.rows]
        sets = [row.air[c - 1]["setpoint_lpm"] for row in trace.rows]
        axes[0].plot(t, flows, lw=1.0, label=f"valve {c} flow")
        axes[0].plot(t, sets, lw=0.8, ls="--", label=f"valve {c} setpoint")
        opens = [row.air[c - 1]["opening"] for row in trace.rows]
        axes[1].plot(t, opens, lw=1.0, label=f"valve {c}")
    axes[0].set_ylabel("air flow (L/min)")
    axes[0].legend(fontsize=8, ncol=2)
    axes[0].grid(alpha=0.3)
    axes[1].set_ylabel("opening (fraction)")
    axes[1].set_xlabel("time (s)")
    axes[1].grid(alpha=0.3)
    written.append(_save(fig, outdir, "air_valves.png"))

    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    axes[0].plot(t, trace.column("h_m"), lw=1.2, color="tab:blue")
    axes[0].set_ylabel("water level (m)")
    axes[0].grid(alpha=0.3)
    axes[1].plot(t, trace.column("n_active_water"), lw=1.2, drawstyle="steps-post")
    axes[1].set_ylabel("active conduits")
    axes[1].set_xlabel("time (s)")
    axes[1].grid(alpha=0.3)
    written.append(_save(fig, outdir, "tank_and_conduits.png"))

    return written


def plot_fit(predictions: np.ndarray, truths: np.ndarray, target: str,
             outdir: str) -> list[str]:
    """Predicted-vs-observed and per-record error panels."""
    os.makedirs(outdir, exist_ok=True)
    idx = np.arange(len(truths))
    written = []

    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(idx, truths, "o-", ms=3, lw=0.8, label="data")
    ax.plot(idx, predictions, "s--", ms=3, lw=0.8, label="model")
    ax.set_xlabel("record")
    ax.set_ylabel(target)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    written.append(_save(fig, outdir, f"fit_{target}_validation.png"))

    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(idx, predictions - truths, "o-", ms=3, lw=0.8, color="tab:red")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("record")
    ax.set_ylabel(f"{target} error")
    ax.grid(alpha=0.3)
    written.append(_save(fig, outdir, f"fit_{target}_error.png"))
    return written


def plot_correlation(matrix: np.ndarray, outdir: str) -> list[str]:
    """Annotated correlation heatmap over the nine variables."""
    os.makedirs(outdir, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    im = ax.imshow(matrix, vmin=-1, vmax=1, cmap="RdBu_r")
    ax.set_xticks(range(len(VARIABLES)), VARIABLES, rotation=45, ha="right")
    ax.set_yticks(range(len(VARIABLES)), VARIABLES)
    for i in range(len(VARIABLES)):
        for j in range(len(VARIABLES)):
            ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center",
                    fontsize=7)
    fig.colorbar(im, ax=ax, shrink=0.85)
    return [_save(fig, outdir, "correlation.png")]
