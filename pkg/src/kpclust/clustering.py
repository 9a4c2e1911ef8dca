"""K-means and average-linkage clustering over score matrices.

The k-means here is the Hartigan-Wong variant: after a nearest-centroid
start, points are moved one at a time whenever the size-corrected transfer
cost ``n_j d^2(x, c_j) / (n_j + 1)`` of the receiving cluster beats the
size-corrected removal gain ``n_i d^2(x, c_i) / (n_i - 1)`` of the current
one, with centroids updated incrementally after every move. Each restart
draws its starting centroids from an independent seeded stream, so results
are reproducible no matter how restarts are scheduled.

Hierarchical clustering is UPGMA (average linkage): the distance between two
clusters is the mean over all cross pairs, maintained through the standard
size-weighted update. Cutting the tree removes the highest merges and labels
the remaining connected components.

Cluster labels from both methods are canonicalized: clusters are numbered by
decreasing size, ties broken by smallest member index, so reported cluster
sizes are comparable across runs and methods.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from numba import njit
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import pdist, squareform

from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    KTooLargeError,
    NonFiniteError,
)
from .rng import derive_rng

Array = np.ndarray

_MAX_PASSES = 200


@dataclass(frozen=True)
class KMeansMethod:
    seed: int
    restarts: int


@dataclass(frozen=True)
class HierarchicalMethod:
    cut_k: int


@dataclass(frozen=True)
class ClusterAssignment:
    """Point-to-cluster labels plus provenance.

    ``within_ss`` is the total within-cluster sum of squares; it is None for
    dendrogram cuts, which carry no point geometry to compute it from.
    """

    labels: Array
    k: int
    within_ss: Optional[float]
    method: Union[KMeansMethod, HierarchicalMethod]

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)
        if self.k < 1:
            raise ValueError(f"cluster count must be >= 1, got {self.k}")
        counts = np.bincount(lab, minlength=self.k)
        if counts.shape[0] != self.k or counts.min() == 0:
            raise ValueError("every cluster id in 0..k-1 must appear at least once")
        if self.within_ss is not None and self.within_ss < 0.0:
            raise ValueError(f"within_ss must be >= 0, got {self.within_ss}")

    @property
    def sizes(self) -> Array:
        """Cluster sizes indexed by label."""
        return np.bincount(self.labels, minlength=self.k)


@dataclass(frozen=True)
class Dendrogram:
    """Merge tree from agglomerative clustering.

    ``merges`` has one row per merge: (left node, right node, height, size of
    the merged cluster). Leaves are numbered 0..M-1 and merge i creates node
    M+i, so the columns can be fed to standard dendrogram plotters.
    """

    merges: Array
    n_leaves: int

    def __post_init__(self):
        m = np.asarray(self.merges, dtype=np.float64).reshape(-1, 4)
        m.setflags(write=False)
        object.__setattr__(self, "merges", m)
        if m.shape[0] != self.n_leaves - 1:
            raise ValueError(
                f"expected {self.n_leaves - 1} merges for {self.n_leaves} leaves, got {m.shape[0]}"
            )

    @property
    def heights(self) -> Array:
        return self.merges[:, 2]


def _as_matrix(points) -> Array:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise DimensionMismatchError(f"points must be a vector or 2-d matrix, got ndim={X.ndim}")
    if X.shape[0] == 0:
        raise EmptyInputError("no points to cluster")
    if not np.isfinite(X).all():
        raise NonFiniteError("points contain non-finite values")
    return X


def canonical_labels(labels: Array, k: int) -> Array:
    """Renumber clusters by decreasing size, ties by smallest member index."""
    labels = np.asarray(labels, dtype=np.int64)
    sizes = np.bincount(labels, minlength=k)
    first = np.full(k, labels.shape[0], dtype=np.int64)
    for idx in range(labels.shape[0] - 1, -1, -1):
        first[labels[idx]] = idx
    order = sorted(range(k), key=lambda c: (-sizes[c], first[c]))
    remap = np.empty(k, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    return remap[labels]


@njit(cache=True)
def _hw_passes(X, centroids, labels, sizes):  # pragma: no cover - compiled
    """Hartigan-Wong reallocation passes; mutates all arguments in place.

    Returns the number of passes run. Stops after a full pass without moves.
    Total within-cluster sum of squares strictly decreases with every move,
    so with the pass cap this always terminates.
    """
    m, n = X.shape
    k = centroids.shape[0]
    for sweep in range(_MAX_PASSES):
        moved = 0
        for i in range(m):
            c = labels[i]
            if sizes[c] <= 1:
                continue
            dc = 0.0
            for t in range(n):
                diff = X[i, t] - centroids[c, t]
                dc += diff * diff
            removal_gain = sizes[c] * dc / (sizes[c] - 1)
            best_j = -1
            best_cost = removal_gain
            for j in range(k):
                if j == c:
                    continue
                dj = 0.0
                for t in range(n):
                    diff = X[i, t] - centroids[j, t]
                    dj += diff * diff
                cost = sizes[j] * dj / (sizes[j] + 1)
                if cost < best_cost:
                    best_cost = cost
                    best_j = j
            if best_j >= 0:
                nc = sizes[c]
                nj = sizes[best_j]
                for t in range(n):
                    centroids[c, t] = (centroids[c, t] * nc - X[i, t]) / (nc - 1)
                    centroids[best_j, t] = (centroids[best_j, t] * nj + X[i, t]) / (nj + 1)
                sizes[c] = nc - 1
                sizes[best_j] = nj + 1
                labels[i] = best_j
                moved += 1
        if moved == 0:
            return sweep + 1
    return _MAX_PASSES


def _nearest_centroid(X: Array, centroids: Array) -> Array:
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    # argmin takes the first minimum, which is the lower cluster index
    return np.argmin(d2, axis=1).astype(np.int64)


def _repair_empty(X: Array, centroids: Array, labels: Array, sizes: Array) -> None:
    """Give each empty cluster the point farthest from its current centroid."""
    while sizes.min() == 0:
        empty = int(np.argmin(sizes))
        d2 = ((X - centroids[labels]) ** 2).sum(axis=1)
        # only points from clusters of size >= 2 can be taken away
        d2[sizes[labels] < 2] = -1.0
        donor = int(np.argmax(d2))
        src = labels[donor]
        nc = sizes[src]
        centroids[src] = (centroids[src] * nc - X[donor]) / (nc - 1)
        centroids[empty] = X[donor]
        sizes[src] -= 1
        sizes[empty] = 1
        labels[donor] = empty


def within_cluster_ss(X: Array, labels: Array, k: int) -> float:
    """Exact total within-cluster sum of squares."""
    total = 0.0
    for c in range(k):
        members = X[labels == c]
        if members.shape[0] > 0:
            total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def kmeans(points, k: int, seed: int, restarts: int = 25) -> ClusterAssignment:
    """Hartigan-Wong k-means, best of ``restarts`` seeded initializations.

    Each restart draws k distinct starting points from its own PRNG stream
    derived from (seed, restart index); the restart with the lowest final
    within-cluster sum of squares wins, earlier restarts winning ties. The
    result is deterministic given (points, k, seed, restarts).
    """
    X = _as_matrix(points)
    m = X.shape[0]
    if k < 1:
        raise ValueError(f"cluster count must be >= 1, got {k}")
    if k > m:
        raise KTooLargeError(f"cannot form {k} clusters from {m} points")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    method = KMeansMethod(seed=int(seed), restarts=int(restarts))

    if k == 1:
        ss = within_cluster_ss(X, np.zeros(m, dtype=np.int64), 1)
        return ClusterAssignment(
            labels=np.zeros(m, dtype=np.int64), k=1, within_ss=ss, method=method
        )

    best_ss = np.inf
    best_labels = None
    for r in range(restarts):
        rng = derive_rng(seed, r)
        start = rng.choice(m, size=k, replace=False)
        centroids = X[np.sort(start)].copy()
        labels = _nearest_centroid(X, centroids)
        sizes = np.bincount(labels, minlength=k).astype(np.int64)
        # recompute centroids as means of the initial assignment
        for c in range(k):
            if sizes[c] > 0:
                centroids[c] = X[labels == c].mean(axis=0)
        _repair_empty(X, centroids, labels, sizes)
        _hw_passes(X, centroids, labels, sizes)
        ss = within_cluster_ss(X, labels, k)
        if ss < best_ss:
            best_ss = ss
            best_labels = labels
    return ClusterAssignment(
        labels=canonical_labels(best_labels, k), k=k, within_ss=best_ss, method=method
    )


def distance_matrix(points) -> Array:
    """Pairwise Euclidean distances; exactly symmetric with a zero diagonal."""
    X = _as_matrix(points)
    if X.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(X))


def _check_distance_matrix(dist) -> Array:
    D = np.asarray(dist, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DimensionMismatchError(f"distance matrix must be square, got shape {D.shape}")
    if D.shape[0] == 0:
        raise EmptyInputError("empty distance matrix")
    if not np.isfinite(D).all():
        raise NonFiniteError("distance matrix contains non-finite values")
    if D.min() < 0.0 or np.abs(D.diagonal()).max() > 0.0 or not np.array_equal(D, D.T):
        raise ValueError("distance matrix must be symmetric, nonnegative, zero-diagonal")
    return D


def average_linkage(dist) -> Dendrogram:
    """UPGMA merge tree of a distance matrix.

    The height of each merge is the arithmetic mean of all cross-pair
    distances between the two clusters joined, kept exact by the
    size-weighted update rule.
    """
    D = _check_distance_matrix(dist)
    m = D.shape[0]
    if m == 1:
        return Dendrogram(merges=np.empty((0, 4)), n_leaves=1)
    Z = linkage(squareform(D, checks=False), method="average")
    return Dendrogram(merges=Z, n_leaves=m)


def cut_dendrogram(dend: Dendrogram, k: int) -> ClusterAssignment:
    """Partition into k clusters by dropping the k-1 highest merges."""
    m = dend.n_leaves
    if k < 1:
        raise ValueError(f"cluster count must be >= 1, got {k}")
    if k > m:
        raise KTooLargeError(f"cannot cut {m} leaves into {k} clusters")
    parent = np.arange(2 * m - 1)

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(m - k):
        left, right = int(dend.merges[i, 0]), int(dend.merges[i, 1])
        node = m + i
        parent[find(left)] = node
        parent[find(right)] = node
    roots = {}
    labels = np.empty(m, dtype=np.int64)
    for leaf in range(m):
        root = find(leaf)
        labels[leaf] = roots.setdefault(root, len(roots))
    return ClusterAssignment(
        labels=canonical_labels(labels, k),
        k=k,
        within_ss=None,
        method=HierarchicalMethod(cut_k=k),
    )
