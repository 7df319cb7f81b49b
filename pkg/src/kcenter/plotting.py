"""Figures written next to the CSV reports."""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import Instance, assign  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 120,
    "savefig.bbox": "tight",
    # keeps repeated runs byte-stable
    "svg.hashsalt": "kcenter",
}

SOLVER_COLORS = {
    "dragoon": "#1b6ca8",
    "two_approx": "#e07b39",
    "macqueen": "#3a9b5c",
    "greedy": "#b8405e",
    "backtrack": "#7d5ba6",
}


def _save(fig, path) -> None:
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def draw_solution(ax, inst: Instance, centers: Sequence[int], title: str | None = None):
    """Customers, centers and customer-to-center segments on one axis."""
    xy = inst.coords
    a = assign(inst, centers)
    for i, o in enumerate(a.owner):
        ax.plot([xy[i, 0], xy[o, 0]], [xy[i, 1], xy[o, 1]], color="0.7", lw=0.7, zorder=1)
    ax.scatter(xy[:, 0], xy[:, 1], s=14, color="0.2", zorder=2, label="customer")
    cs = list(centers)
    ax.scatter(xy[cs, 0], xy[cs, 1], s=60, marker="s", facecolor="none",
               edgecolor="#c0392b", lw=1.4, zorder=3, label="center")
    worst = int(a.dist.argmax())
    circle = plt.Circle(xy[a.owner[worst]], a.objective, fill=False, ls="--", lw=0.8, color="#c0392b")
    ax.add_patch(circle)
    ax.set_xlim(-3, 103)
    ax.set_ylim(-3, 103)
    ax.set_aspect("equal")
    if title:
        ax.set_title(f"{title}  (D = {a.objective:.2f})")
    return ax


def plot_solutions(inst: Instance, solutions: dict[str, Sequence[int]], path) -> None:
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(solutions), figsize=(3.4 * len(solutions), 3.4), squeeze=False)
        for ax, (name, centers) in zip(axes[0], solutions.items()):
            draw_solution(ax, inst, centers, name)
        fig.legend(*axes[0][0].get_legend_handles_labels(), loc="lower center", ncol=2, frameon=False,
                   bbox_to_anchor=(0.5, -0.04))
        _save(fig, path)


def plot_average_summary(summaries, path) -> None:
    """Grouped bars of mean delta-D per setup and challenger."""
    columns: list[str] = []
    for s in summaries:
        columns.extend(c for c in s.stats if c not in columns)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 3.2))
        width = 0.8 / max(len(columns), 1)
        x = np.arange(len(summaries))
        for j, c in enumerate(columns):
            vals = [s.stats[c].mean if c in s.stats else np.nan for s in summaries]
            ax.bar(x + j * width - 0.4 + width / 2, vals, width, label=c, color=SOLVER_COLORS.get(c))
        ax.axhline(0.0, color="k", lw=0.6)
        ax.set_xticks(x)
        ax.set_xticklabels([s.setup.name for s in summaries])
        ax.set_xlabel("customers / centers")
        ax.set_ylabel(f"mean $\\Delta D$ vs {summaries[0].challenged}")
        ax.legend(ncol=2)
        _save(fig, path)


def plot_fitness_histories(outcomes, path) -> None:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        for o in outcomes:
            ax.plot(o.result.fitness_history, lw=0.9, color=SOLVER_COLORS.get(o.challenger),
                    label=f"{o.challenger} vs {o.challenged}")
        handles, labels = ax.get_legend_handles_labels()
        uniq = dict(zip(labels, handles))
        ax.legend(uniq.values(), uniq.keys())
        ax.set_xlabel("generation")
        ax.set_ylabel("best $\\Delta D$")
        _save(fig, path)


def plot_matrix(matrix: dict[tuple[str, str], float], kinds: Sequence[str], path) -> None:
    m = np.full((len(kinds), len(kinds)), np.nan)
    for i, a in enumerate(kinds):
        for j, b in enumerate(kinds):
            if a != b:
                m[i, j] = matrix[(a, b)]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.4, 3.8))
        im = ax.imshow(m, cmap="viridis")
        mid = np.nanmin(m) + 0.6 * (np.nanmax(m) - np.nanmin(m))
        for i in range(len(kinds)):
            for j in range(len(kinds)):
                if i != j:
                    ax.text(j, i, f"{m[i, j]:.2f}", ha="center", va="center", fontsize=7,
                            color="k" if m[i, j] > mid else "w")
        ax.set_xticks(range(len(kinds)))
        ax.set_xticklabels(kinds, rotation=45, ha="right")
        ax.set_yticks(range(len(kinds)))
        ax.set_yticklabels(kinds)
        ax.set_xlabel("challenged")
        ax.set_ylabel("challenger")
        fig.colorbar(im, ax=ax, label="best $\\Delta D$")
        _save(fig, path)
