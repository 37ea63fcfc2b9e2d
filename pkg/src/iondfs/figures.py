"""Figure rendering for the CLI report paths.

Each saver takes the same row dictionaries that go into the CSV/JSON output
and writes one PNG next to them. Figures are a convenience view; the
delimited output remains the interface of record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import TrapParams, bell_pulse_time, gate_time_cnot
from .noise import bare_dephasing_mean


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_cnot_figure(matrix: np.ndarray, path: str | Path) -> Path:
    labels = ["11", "10", "01", "00"]
    fig, axes = plt.subplots(1, 2, figsize=(7.2, 3.2))
    for ax, part, name in ((axes[0], matrix.real, "Re"), (axes[1], matrix.imag, "Im")):
        im = ax.imshow(part, cmap="RdBu", vmin=-1, vmax=1)
        ax.set_xticks(range(4), labels)
        ax.set_yticks(range(4), labels)
        ax.set_title(f"{name} of composed gate")
        fig.colorbar(im, ax=ax, fraction=0.046)
    return _finish(fig, path)


def save_teleport_figure(rows: list[dict], path: str | Path) -> Path:
    outcomes = sorted({r["outcome"] for r in rows})
    fig, (ax_f, ax_p) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    for outcome in outcomes:
        sel = [r for r in rows if r["outcome"] == outcome]
        thetas = [r["theta"] for r in sel]
        ax_f.plot(thetas, [r["fidelity"] for r in sel], "o-", ms=4, label=outcome)
        ax_p.plot(thetas, [r["probability"] for r in sel], "o-", ms=4, label=outcome)
    ax_f.set_xlabel("message phase (rad)")
    ax_f.set_ylabel("corrected fidelity")
    ax_f.set_ylim(-0.05, 1.05)
    ax_p.set_xlabel("message phase (rad)")
    ax_p.set_ylabel("outcome probability")
    ax_p.set_ylim(0, 0.5)
    ax_f.legend(fontsize=7)
    return _finish(fig, path)


def save_rabi_figure(rows: list[dict], path: str | Path) -> Path:
    xs = [r["sweep_value"] for r in rows]
    fig, (ax_w, ax_e) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    ax_w.plot(xs, [r["effective_rabi"] for r in rows], "o-", ms=4, label="closed form")
    ran = [r for r in rows if r["oracle_frequency"] is not None]
    ax_w.plot(
        [r["sweep_value"] for r in ran],
        [r["oracle_frequency"] for r in ran],
        "x",
        ms=7,
        label="ladder oracle",
    )
    ax_w.set_xlabel(rows[0]["sweep_param"] if rows else "sweep")
    ax_w.set_ylabel("effective Rabi frequency (rad/s)")
    ax_w.legend(fontsize=8)
    if ran:
        ax_e.semilogy(
            [r["sweep_value"] for r in ran], [max(r["relative_error"], 1e-18) for r in ran],
            "o-", ms=4, label="relative error",
        )
        ax_e.semilogy(
            [r["sweep_value"] for r in ran], [max(r["max_leakage"], 1e-18) for r in ran],
            "s--", ms=4, label="max leakage",
        )
    ax_e.set_xlabel(rows[0]["sweep_param"] if rows else "sweep")
    ax_e.legend(fontsize=8)
    return _finish(fig, path)


def save_timing_figure(params: TrapParams, path: str | Path) -> Path:
    ns = list(range(6))
    t_cn, t_bell = [], []
    for n in ns:
        p = TrapParams(params.rabi, params.lamb_dicke, params.trap_freq, params.detuning, n)
        t_cn.append(gate_time_cnot(p))
        t_bell.append(bell_pulse_time(p))
    fig, ax = plt.subplots(figsize=(4.4, 3.2))
    ax.semilogy(ns, t_cn, "o-", label="controlled-NOT")
    ax.semilogy(ns, t_bell, "s--", label="Bell pulse")
    ax.set_xlabel("vibrational quantum number n")
    ax.set_ylabel("pulse time (s)")
    ax.legend(fontsize=8)
    return _finish(fig, path)


def save_dephase_figure(rows: list[dict], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    for state, marker in (("dfs", "o"), ("bare", "s")):
        sel = [r for r in rows if r["state"] == state]
        sigmas = [r["sigma"] for r in sel]
        means = [r["mean_fidelity"] for r in sel]
        errs = [r["stderr"] if r["stderr"] is not None else 0.0 for r in sel]
        ax.errorbar(sigmas, means, yerr=errs, marker=marker, ls="", capsize=3, label=state)
    if rows:
        grid = np.linspace(0, max(r["sigma"] for r in rows), 200)
        ax.plot(grid, [bare_dephasing_mean(s) for s in grid], "k:", lw=1, label="bare, analytic")
    ax.set_xlabel("ensemble phase spread sigma (rad)")
    ax.set_ylabel("mean fidelity")
    ax.set_ylim(0.4, 1.05)
    ax.legend(fontsize=8)
    return _finish(fig, path)
