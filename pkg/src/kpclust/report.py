"""Delimited output for pipeline runs.

Every emitter writes plain CSV or JSON with deterministic content: floats
are serialized with Python's shortest round-trip representation, rows keep
a documented order, and nothing records wall-clock state. Re-running a
command with the same inputs therefore reproduces each file byte for byte.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .data import SUMMARY_QUANTITIES
from .kernels import Kernel
from .pipeline import Clusters, GridCell, NoClustering


def _num(value):
    """Coerce numpy scalars so csv/json serialize them as plain numbers."""
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def _open_writer(path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def hyper_string(spec: Kernel) -> str:
    """Compact hyperparameter column for a kernel spec.

    A power-exponential spec with one common scale prints that scale once;
    distinct per-feature scales are printed in full.
    """
    fields = spec.to_dict()
    fields.pop("kernel")
    if "scales" in fields:
        scales = tuple(fields.pop("scales"))
        if len(set(scales)) == 1:
            fields["s"] = scales[0]
        else:
            fields["s"] = "(" + ", ".join(str(_num(s)) for s in scales) + ")"
    return "; ".join(f"{key}={_num(val)}" for key, val in fields.items())


def write_points_csv(path, points, labels) -> None:
    """Generated sample: one row per point with its ground-truth label."""
    points = np.asarray(points)
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow([f"x{j + 1}" for j in range(points.shape[1])] + ["label"])
        for row, label in zip(points, labels):
            writer.writerow([_num(v) for v in row] + [int(label)])


def write_scores_csv(path, scores, extra_columns=None) -> None:
    """KPC score matrix with optional label columns appended.

    ``extra_columns`` maps column name to a length-M integer sequence,
    written in insertion order after the score columns.
    """
    scores = np.asarray(scores)
    extra = dict(extra_columns or {})
    fh, writer = _open_writer(path)
    with fh:
        header = [f"kpc{j + 1}" for j in range(scores.shape[1])] + list(extra)
        writer.writerow(header)
        for i in range(scores.shape[0]):
            row = [_num(v) for v in scores[i]]
            row.extend(int(extra[name][i]) for name in extra)
            writer.writerow(row)


GRID_HEADER = ("kernel", "hyperparameters", "kpcs", "clusters", "sizes", "dunn", "note")


def write_grid_csv(path, cells, n_points: int) -> None:
    """Sweep table: one row per evaluated cell in grid order.

    A no-clustering outcome is reported as a single cluster holding every
    point, matching how sweep tables usually tabulate it; failures keep
    their reason in the note column.
    """
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(GRID_HEADER)
        for cell in cells:
            row = [cell.spec.name, hyper_string(cell.spec), cell.kpc_count]
            outcome = cell.outcome
            if isinstance(outcome, Clusters):
                sizes = " ".join(str(s) for s in outcome.sizes)
                row.extend([outcome.k, sizes, _num(outcome.dunn), ""])
            elif isinstance(outcome, NoClustering):
                row.extend([1, str(n_points), "", "no clustering"])
            else:
                row.extend(["", "", "", outcome.reason])
            writer.writerow(row)


def cell_to_dict(cell: GridCell) -> dict:
    payload = {"spec": cell.spec.to_dict(), "kpc_count": cell.kpc_count}
    outcome = cell.outcome
    if isinstance(outcome, Clusters):
        payload["outcome"] = {
            "kind": "clusters",
            "k": outcome.k,
            "sizes": list(outcome.sizes),
            "dunn": _num(outcome.dunn),
        }
    elif isinstance(outcome, NoClustering):
        payload["outcome"] = {"kind": "no_clustering"}
    else:
        payload["outcome"] = {"kind": "failed", "reason": outcome.reason}
    return payload


def write_best_json(path, cell: GridCell, grid_index: int) -> None:
    """Winning cell plus its grid position, for reproducing its clustering."""
    payload = cell_to_dict(cell)
    payload["grid_index"] = int(grid_index)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_asw_csv(path, asw_by_k: dict, chosen_k: int) -> None:
    """Average silhouette width per dendrogram cut, chosen cut marked."""
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["k", "asw", "chosen"])
        for k in sorted(asw_by_k):
            writer.writerow([int(k), _num(asw_by_k[k]), int(k == chosen_k)])


def write_knn_csv(path, n_neighbors: int, error: float) -> None:
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["n_neighbors", "loocv_error"])
        writer.writerow([int(n_neighbors), _num(error)])


def write_summary_csv(path, rows) -> None:
    """Per-cluster means and standard errors of the headline quantities."""
    fh, writer = _open_writer(path)
    with fh:
        header = ["cluster", "size"]
        for name in SUMMARY_QUANTITIES:
            header.extend([f"{name}_mean", f"{name}_sem"])
        writer.writerow(header)
        for row in rows:
            record = [int(row.cluster), int(row.size)]
            for name in SUMMARY_QUANTITIES:
                record.extend([_num(row.means[name]), _num(row.sems[name])])
            writer.writerow(record)


def write_ari_csv(path, entries) -> None:
    """Adjusted Rand scores, one named comparison per row."""
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["comparison", "adjusted_rand"])
        for name, value in entries:
            writer.writerow([name, _num(value)])


def write_fluence_csv(path, log10_t90, log10_ft, labels) -> None:
    """Fluence-duration scatter data matching the rendered figure."""
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(["log10_t90", "log10_ft", "cluster"])
        for t90, ft, label in zip(log10_t90, log10_ft, labels):
            writer.writerow([_num(t90), _num(ft), int(label)])
