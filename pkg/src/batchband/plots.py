"""Matplotlib figure rendering for band layouts and benchmark summaries.

Figures are written straight to files; the Agg backend keeps this usable
on headless machines.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Patch

from .bands import BandGraph

_MULTI = "#b0b0b0"


def save_band_figure(graph: BandGraph, path, category_names=None) -> None:
    """One horizontal lane per column; single-category bands colored, shared grey."""
    cmap = plt.get_cmap("tab10")
    n_cols = graph.n_columns
    fig, ax = plt.subplots(figsize=(8, 1.0 + 0.6 * n_cols))
    seen: set[int] = set()
    for j, bands in enumerate(graph.columns):
        y = n_cols - 1 - j
        for b in bands:
            if len(b.categories) == 1:
                (cat,) = b.categories
                color = cmap(cat % 10)
                seen.add(cat)
            else:
                color = _MULTI
            width = max(b.high - b.low, 0.004)
            ax.broken_barh([(b.low, width)], (y - 0.3, 0.6), facecolors=color, edgecolors="black", linewidth=0.4)
    ax.set_yticks(range(n_cols))
    ax.set_yticklabels([f"column {n_cols - 1 - y}" for y in range(n_cols)])
    ax.set_xlim(-0.02, 1.02)
    ax.set_xlabel("normalized value")
    ax.set_title("value bands per column")
    handles = [
        Patch(facecolor=cmap(c % 10), label=(category_names[c] if category_names else f"category {c}"))
        for c in sorted(seen)
    ]
    handles.append(Patch(facecolor=_MULTI, label="shared"))
    ax.legend(handles=handles, loc="center left", bbox_to_anchor=(1.01, 0.5), fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bench_figure(rows, path) -> None:
    """Grouped bars of measured percent correct per dataset and mode,
    with reference figures overlaid as markers."""
    datasets = []
    for r in rows:
        if r.dataset not in datasets:
            datasets.append(r.dataset)
    modes = ("branch", "bands")
    colors = {"branch": "#4878d0", "bands": "#ee854a"}
    fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(datasets), 4))
    width = 0.38
    for m, mode in enumerate(modes):
        xs, ys, refs_x, refs_y = [], [], [], []
        for i, name in enumerate(datasets):
            row = next((r for r in rows if r.dataset == name and r.mode == mode), None)
            if row is None or row.report is None:
                continue
            x = i + (m - 0.5) * width
            xs.append(x)
            ys.append(row.report.percent_correct)
            if row.reference is not None:
                refs_x.append(x)
                refs_y.append(row.reference.percent)
        ax.bar(xs, ys, width=width, color=colors[mode], label=f"{mode} (measured)")
        if refs_x:
            ax.plot(refs_x, refs_y, "kv", markersize=6,
                    label=f"{mode} (reference)" if m == 0 else None)
    ax.set_xticks(range(len(datasets)))
    ax.set_xticklabels(datasets, rotation=30, ha="right")
    ax.set_ylabel("percent correct")
    ax.set_ylim(0, 105)
    ax.set_title("benchmark accuracy by mode (markers: recorded reference results)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
