"""Matplotlib rendering of contour overlays and scaling-sweep curves.

Figures are drawn on standalone Figure objects (no pyplot state), so the
module works headless and never touches the global backend.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

from .detect import evaluate_grid
from .grid import DomainGrid
from .refine import SolutionSet
from .solve import Problem

__all__ = ["render_contour_figure", "render_sweep_figure"]

_MAX_CONTOUR_POINTS = 401

_SWEEP_LINESTYLES = {2: "-.", 3: "--", 4: ":", 5: "-"}


def render_contour_figure(
    problem: Problem,
    g: DomainGrid,
    solutions: SolutionSet | None,
    path: str,
) -> str:
    """Zero-level contours of each function with the solutions marked.

    Only 2-variable systems can be drawn. The evaluation grid is capped at
    a moderate resolution; contour rendering does not need the solver's.
    """
    if g.ndim != 2:
        raise ValueError("contour figure requires 2 variables")

    plot_grid = g
    if any(ax.points > _MAX_CONTOUR_POINTS for ax in g.axes):
        plot_grid = DomainGrid(
            tuple(
                type(ax)(ax.lower, ax.upper, min(ax.points, _MAX_CONTOUR_POINTS))
                for ax in g.axes
            )
        )
    x1_nodes, x2_nodes = plot_grid.axis_nodes()
    tensors = evaluate_grid(problem, plot_grid)

    fig = Figure(figsize=(7.0, 6.0))
    ax = fig.add_subplot(1, 1, 1)
    colors = ["tab:blue", "tab:orange", "tab:green", "tab:red"]
    for i, tensor in enumerate(tensors):
        values = np.where(np.isfinite(tensor.values), tensor.values, np.nan)
        color = colors[i % len(colors)]
        ax.contour(
            x1_nodes, x2_nodes, values.T, levels=[0.0],
            colors=[color], linewidths=1.2,
        )
        ax.plot([], [], color=color, label=f"f{i + 1} = 0")
    if solutions is not None and len(solutions):
        coords = solutions.coordinates()
        ax.plot(
            coords[:, 0], coords[:, 1], "o", markersize=7,
            markerfacecolor="none", markeredgecolor="black", label="roots",
        )
    ax.set_xlabel(problem.vars.names[0])
    ax.set_ylabel(problem.vars.names[1])
    ax.set_xlim(plot_grid.axes[0].lower, plot_grid.axes[0].upper)
    ax.set_ylim(plot_grid.axes[1].lower, plot_grid.axes[1].upper)
    if problem.label:
        ax.set_title(problem.label)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def render_sweep_figure(records, path: str) -> str:
    """Mean run time against points per axis, one curve per dimension."""
    fig = Figure(figsize=(7.0, 5.0))
    ax = fig.add_subplot(1, 1, 1)
    dims = sorted({rec.ndim for rec in records if not rec.skipped})
    for n in dims:
        pts = [rec.points for rec in records if rec.ndim == n and not rec.skipped]
        times = [rec.mean_seconds for rec in records if rec.ndim == n and not rec.skipped]
        ax.plot(pts, times, linestyle=_SWEEP_LINESTYLES.get(n, "-"), marker="o",
                markersize=3, label=f"{n}D")
    ax.set_xlabel("points per variable")
    ax.set_ylabel("time (s)")
    ax.set_yscale("log")
    ax.legend(loc="best")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path
