"""Figures for a generation run, written to files (Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .generator import GenerationResult  # noqa: E402


def plot_coverage_matrix(result: GenerationResult, path):
    m = result.matrix
    grid = np.ma.masked_less(m.grid(), 0)
    fig, ax = plt.subplots(figsize=(max(4, 0.45 * m.ncols + 2), max(3, 0.3 * m.nrows + 1.5)))
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("lightgrey")
    im = ax.imshow(grid, cmap=cmap, aspect="auto", interpolation="nearest")
    if m.ncols <= 40:
        ax.set_xticks(range(m.ncols), m.column_labels(), rotation=90, fontsize=7)
    if m.nrows <= 60:
        ax.set_yticks(range(m.nrows), m.row_labels(), fontsize=7)
    ax.set_xlabel("value combination")
    ax.set_ylabel("parameter combination")
    ax.set_title(f"coverage counts, t={result.strength}, N={result.size} (grey: nonexistent)")
    fig.colorbar(im, ax=ax, label="rows covering")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_size_history(result: GenerationResult, path):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.step(range(len(result.size_history)), result.size_history, where="post")
    ax.set_xlabel("improvement round")
    ax.set_ylabel("suite size N")
    ax.set_title(f"seed {result.seed}")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_figures(result: GenerationResult, directory) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "coverage_matrix.png", out / "size_history.png"]
    plot_coverage_matrix(result, paths[0])
    plot_size_history(result, paths[1])
    return paths
