"""Figure rendering for report output.

All figures are drawn on the Agg backend and written as PNG with pinned
metadata, so the bytes depend only on the plotted data and the library
versions, never on wall-clock time or display state. Each function takes
the already-computed numbers; nothing here re-runs analysis.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import BOTTOM_LINE, TOP_LINE

#: Pinned PNG text chunk; the default embeds the backend version string.
_METADATA = {"Software": "kpclust"}

_DPI = 150

# one fixed color per cluster label, recycled past the end
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _save(fig, path):
    fig.savefig(path, dpi=_DPI, metadata=_METADATA)
    plt.close(fig)


def save_scatter(path, points, labels, title, xlabel="x", ylabel="y") -> None:
    """2-D scatter colored by integer label."""
    points = np.asarray(points)
    labels = np.asarray(labels)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    for i, label in enumerate(np.unique(labels)):
        mask = labels == label
        ax.scatter(points[mask, 0], points[mask, 1], s=12,
                   color=_COLORS[i % len(_COLORS)], label=str(label))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(title="cluster", loc="best")
    _save(fig, path)


def save_asw_curve(path, asw_by_k, chosen_k) -> None:
    """Average silhouette width against cut size, chosen cut circled."""
    ks = sorted(asw_by_k)
    values = [asw_by_k[k] for k in ks]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ks, values, marker="o", color=_COLORS[0])
    ax.scatter([chosen_k], [asw_by_k[chosen_k]], s=120, facecolors="none",
               edgecolors=_COLORS[1], linewidths=2.0, zorder=3)
    ax.set_xticks(ks)
    ax.set_xlabel("number of clusters")
    ax.set_ylabel("average silhouette width")
    ax.set_title("dendrogram cut quality")
    _save(fig, path)


def save_fluence_duration(path, log10_t90, log10_ft, labels) -> None:
    """Total fluence against duration on log axes with the separating lines."""
    log10_t90 = np.asarray(log10_t90)
    log10_ft = np.asarray(log10_ft)
    labels = np.asarray(labels)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    for i, label in enumerate(np.unique(labels)):
        mask = labels == label
        ax.scatter(log10_t90[mask], log10_ft[mask], s=10,
                   color=_COLORS[i % len(_COLORS)], label=str(label))
    grid = np.linspace(log10_t90.min(), log10_t90.max(), 50)
    for (intercept, slope), style in ((BOTTOM_LINE, "--"), (TOP_LINE, ":")):
        ax.plot(grid, intercept - slope * grid, style, color="black", linewidth=1.0)
    ax.set_xlabel("log10 T90 [s]")
    ax.set_ylabel("log10 total fluence [erg cm^-2]")
    ax.set_title("fluence-duration plane")
    ax.legend(title="cluster", loc="best")
    _save(fig, path)
