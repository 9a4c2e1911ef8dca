"""Cluster validation indices and error measures.

Dunn index, gap statistic, silhouette widths, leave-one-out k-NN error,
and adjusted Rand agreement. All functions are pure; the gap statistic is
the only one that draws random numbers and it derives every stream from its
seed argument, so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clustering import distance_matrix, kmeans
from .errors import (
    EmptyInputError,
    KTooLargeError,
    LengthMismatchError,
    SingleClusterError,
    TooFewPointsError,
    ZeroDiameterError,
)
from .rng import derive_rng, derive_seed

Array = np.ndarray


def _label_array(labels) -> Array:
    """Accept a ClusterAssignment or a plain label sequence."""
    labels = getattr(labels, "labels", labels)
    return np.asarray(labels, dtype=np.int64)


def dunn_index(points, labels) -> float:
    """Minimum between-cluster distance over maximum cluster diameter.

    Uses the original form: the numerator is the smallest pointwise distance
    between any two clusters, the denominator the largest within-cluster
    pointwise distance. Larger is better; the value is unbounded above.
    """
    lab = _label_array(labels)
    ids = np.unique(lab)
    if ids.shape[0] < 2:
        raise SingleClusterError("Dunn index needs at least 2 clusters")
    D = distance_matrix(points)
    masks = [lab == c for c in ids]
    max_diameter = 0.0
    for mask in masks:
        sub = D[np.ix_(mask, mask)]
        if sub.shape[0] > 1:
            max_diameter = max(max_diameter, float(sub.max()))
    if max_diameter == 0.0:
        raise ZeroDiameterError(
            "all clusters have zero diameter; Dunn index is undefined"
        )
    min_separation = np.inf
    for a in range(len(masks)):
        for b in range(a + 1, len(masks)):
            min_separation = min(
                min_separation, float(D[np.ix_(masks[a], masks[b])].min())
            )
    return min_separation / max_diameter


@dataclass(frozen=True)
class GapResult:
    """Gap-statistic curve over k = 1..kmax.

    ``chosen_k`` is None when k = 1 wins, i.e. the statistic finds no
    clustering structure at all; that outcome is an ordinary result, not an
    error, because sweep reports tabulate it alongside real cluster counts.
    """

    ks: Array
    log_wk: Array
    gap: Array
    sk: Array
    chosen_k: Optional[int]

    def __post_init__(self):
        for name in ("ks", "log_wk", "gap", "sk"):
            a = np.asarray(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if not np.array_equal(self.ks, np.arange(1, self.ks.shape[0] + 1)):
            raise ValueError("ks must be contiguous from 1")
        if self.sk.min() < 0.0:
            raise ValueError("sk values must be >= 0")


def gap_statistic(points, kmax: int, B: int = 50, seed: int = 0, restarts: int = 25) -> GapResult:
    """Estimate the cluster count by Tibshirani's gap statistic.

    For each k up to kmax, compares log within-SS of the data against B
    reference datasets drawn uniformly over the per-feature bounding box.
    Chooses the smallest k with Gap(k) >= Gap(k+1) - s_{k+1}; when k = 1
    wins, ``chosen_k`` is None (no clustering structure). When no k up to
    kmax - 1 satisfies the rule the curve is still rising, and kmax is
    reported as the choice.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] == 0:
        raise EmptyInputError("no points")
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax}")
    if kmax > X.shape[0]:
        raise KTooLargeError(f"kmax={kmax} exceeds the number of points {X.shape[0]}")
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")

    m = X.shape[0]
    lo, hi = X.min(axis=0), X.max(axis=0)
    ks = np.arange(1, kmax + 1)

    log_wk = np.array(
        [
            np.log(kmeans(X, k, seed=derive_seed(seed, 0, k), restarts=restarts).within_ss)
            for k in ks
        ]
    )
    log_wk_ref = np.empty((B, kmax))
    for b in range(B):
        ref = derive_rng(seed, 1, b).uniform(lo, hi, size=X.shape)
        for k in ks:
            ss = kmeans(ref, k, seed=derive_seed(seed, 2, b, k), restarts=restarts).within_ss
            log_wk_ref[b, k - 1] = np.log(ss)

    gap = log_wk_ref.mean(axis=0) - log_wk
    sk = log_wk_ref.std(axis=0, ddof=0) * np.sqrt(1.0 + 1.0 / B)

    chosen = kmax
    for k in range(1, kmax):
        if gap[k - 1] >= gap[k] - sk[k]:
            chosen = k
            break
    return GapResult(
        ks=ks, log_wk=log_wk, gap=gap, sk=sk, chosen_k=None if chosen == 1 else chosen
    )


def silhouette(dist, labels) -> tuple[Array, float]:
    """Per-point silhouette widths and their mean.

    s(i) compares the mean distance to the point's own cluster (excluding
    itself) with the mean distance to the nearest other cluster. Points in
    singleton clusters get width 0, as do points where both means are 0.
    """
    D = np.asarray(dist, dtype=np.float64)
    lab = _label_array(labels)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] != lab.shape[0]:
        raise LengthMismatchError(
            f"distance matrix {D.shape} does not match {lab.shape[0]} labels"
        )
    ids = np.unique(lab)
    if ids.shape[0] < 2:
        raise SingleClusterError("silhouette needs at least 2 clusters")
    m = lab.shape[0]
    sums = np.stack([D[:, lab == c].sum(axis=1) for c in ids], axis=1)
    counts = np.array([(lab == c).sum() for c in ids])
    col_of = {c: idx for idx, c in enumerate(ids)}
    own = np.array([col_of[c] for c in lab])

    widths = np.zeros(m)
    for i in range(m):
        n_own = counts[own[i]]
        if n_own == 1:
            continue
        a = sums[i, own[i]] / (n_own - 1)
        b = np.inf
        for j in range(ids.shape[0]):
            if j != own[i]:
                b = min(b, sums[i, j] / counts[j])
        denom = max(a, b)
        if denom > 0.0:
            widths[i] = (b - a) / denom
    return widths, float(widths.mean())


def knn_loocv_error(points, labels, n_neighbors: int) -> float:
    """Leave-one-out k-nearest-neighbor misclassification rate.

    Each point is classified by majority vote among its n_neighbors nearest
    other points; distance ties keep the earlier-indexed point and vote ties
    go to the smaller label.
    """
    lab = _label_array(labels)
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    m = X.shape[0]
    if lab.shape[0] != m:
        raise LengthMismatchError(f"{m} points but {lab.shape[0]} labels")
    if n_neighbors < 1:
        raise ValueError(f"n_neighbors must be >= 1, got {n_neighbors}")
    if n_neighbors >= m:
        raise TooFewPointsError(
            f"need more than n_neighbors={n_neighbors} points, got {m}"
        )
    _, classes = np.unique(lab, return_inverse=True)
    D = distance_matrix(X)
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")[:, :n_neighbors]
    wrong = 0
    n_classes = int(classes.max()) + 1
    for i in range(m):
        votes = np.bincount(classes[order[i]], minlength=n_classes)
        if int(np.argmax(votes)) != classes[i]:
            wrong += 1
    return wrong / m


def adjusted_rand(labels_a, labels_b) -> float:
    """Chance-corrected agreement between two partitions of the same points.

    1 for identical partitions up to relabeling, about 0 for independent
    ones. Degenerate pairs whose expected and maximum agreement coincide
    (for example both all-singletons) score 1.
    """
    a = _label_array(labels_a)
    b = _label_array(labels_b)
    if a.shape[0] != b.shape[0]:
        raise LengthMismatchError(f"label lengths differ: {a.shape[0]} vs {b.shape[0]}")
    n = a.shape[0]
    if n == 0:
        return 1.0
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_ij = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    total = comb2(n)
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))
