"""Figure rendering for sweep tables.

Renders coherence-decay data to an image file next to the CSV output. A
single-valued axis collapses the figure to a line plot; two swept axes
produce a heatmap.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dephasing import SweepTable


def plot_sweep(table: SweepTable, path: str) -> str:
    """Render a sweep table to ``path`` (format from the file extension)."""
    rows = np.asarray(table.rows, dtype=float)
    if rows.size == 0:
        raise ValueError("cannot plot an empty sweep table")
    x_name, y_name, _ = table.columns
    xs = np.unique(rows[:, 0])
    ys = np.unique(rows[:, 1])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if len(xs) == 1 or len(ys) == 1:
        # one swept axis: line plot against it
        axis = 1 if len(xs) == 1 else 0
        order = np.argsort(rows[:, axis])
        ax.plot(rows[order, axis], rows[order, 2], lw=1.5)
        ax.set_xlabel(table.columns[axis])
        ax.set_ylabel("coherence")
        fixed_axis = 0 if axis == 1 else 1
        fixed_name = table.columns[fixed_axis]
        ax.set_title(f"coherence decay ({fixed_name}={rows[0, fixed_axis]:.6g})")
    else:
        grid = np.full((len(ys), len(xs)), np.nan)
        xi = {v: i for i, v in enumerate(xs)}
        yi = {v: i for i, v in enumerate(ys)}
        for x, y, c in rows:
            grid[yi[y], xi[x]] = c
        mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="coherence")
        ax.set_xlabel(x_name)
        ax.set_ylabel(y_name)
        ax.set_title(f"coherence decay ({table.metadata.get('family', 'sweep')})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
