"""Grid-search pipeline: standardize, sweep kernels and KPC counts, select.

The protocol mirrors the burst-catalog study the library packages. The data
matrix is column-standardized; a BCa bootstrap of the pooled scale supplies
three kernel scale candidates (interval endpoints and midpoint); the kernel
grid crosses those candidates with the power-exponential exponents and the
comparison kernels. Each grid entry is fit once by kernel PCA, then scored
at increasing KPC counts: the gap statistic picks the cluster count,
k-means clusters the scores, and the Dunn index grades the partition. The
cell with the largest Dunn index wins.

Per-cell randomness is derived from the root seed and the grid position, so
reports are reproducible bit-for-bit regardless of worker count, and a
manifest captures everything a rerun needs.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .bootstrap import bca_interval, hyperparameter_candidates, pooled_scale
from .clustering import ClusterAssignment, average_linkage, cut_dendrogram, distance_matrix, kmeans
from .errors import ConstantColumnError, EmptyInputError, KpclustError, NoBestCellError
from .kernels import (
    Kernel,
    LaplacianKernel,
    PolynomialKernel,
    PowerExponentialKernel,
    RbfKernel,
    SigmoidKernel,
)
from .kpca import EIGENVALUE_TOLERANCE, KpcaModel, fit_kpca
from .manifest import MANIFEST_FORMAT, MANIFEST_VERSION, fingerprint_matrix
from .rng import derive_seed
from .validation import dunn_index, gap_statistic, knn_loocv_error, silhouette

Array = np.ndarray

#: Power-exponential exponents crossed with every scale candidate.
GRID_EXPONENTS = (2.0, 1.0, 1.0 / 1.5, 0.5)

#: Neighborhood size for the robustness error rate.
KNN_NEIGHBORS = 11


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for one pipeline run; everything else is derived.

    ``candidates`` overrides the bootstrap scale candidates when given,
    which also skips the bootstrap entirely. ``workers`` > 1 evaluates grid
    entries in separate processes; results are identical either way.
    """

    seed: int = 0
    bootstrap_b: int = 2000
    alpha: float = 0.05
    gap_b: int = 50
    kmax: int = 8
    restarts: int = 25
    max_kpc: int = 6
    workers: int = 1
    candidates: Optional[tuple] = None

    def __post_init__(self):
        for name in ("bootstrap_b", "gap_b", "kmax", "restarts", "max_kpc", "workers"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.kmax < 2:
            raise ValueError(f"kmax must be >= 2, got {self.kmax}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.candidates is not None:
            cand = tuple(float(c) for c in self.candidates)
            if not cand:
                raise ValueError("candidates override must be non-empty")
            if any(not np.isfinite(c) or c <= 0.0 for c in cand):
                raise ValueError(f"candidates must be positive and finite, got {cand}")
            object.__setattr__(self, "candidates", cand)

    def to_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "bootstrap_b": int(self.bootstrap_b),
            "alpha": float(self.alpha),
            "gap_b": int(self.gap_b),
            "kmax": int(self.kmax),
            "restarts": int(self.restarts),
            "max_kpc": int(self.max_kpc),
            "workers": int(self.workers),
            "candidates": None if self.candidates is None else list(self.candidates),
        }

    @staticmethod
    def from_dict(payload: dict) -> "PipelineConfig":
        known = {
            "seed", "bootstrap_b", "alpha", "gap_b", "kmax",
            "restarts", "max_kpc", "workers", "candidates",
        }
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        payload = dict(payload)
        if payload.get("candidates") is not None:
            payload["candidates"] = tuple(payload["candidates"])
        return PipelineConfig(**payload)


@dataclass(frozen=True)
class Clusters:
    """A grid cell that produced a partition."""

    k: int
    sizes: tuple
    dunn: float

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if self.k < 2 or len(sizes) != self.k:
            raise ValueError(f"need one size per cluster, k={self.k}, sizes={sizes}")
        if any(s < 1 for s in sizes) or list(sizes) != sorted(sizes, reverse=True):
            raise ValueError(f"sizes must be positive and non-increasing, got {sizes}")
        if not self.dunn > 0.0:
            raise ValueError(f"Dunn index must be > 0, got {self.dunn}")


@dataclass(frozen=True)
class NoClustering:
    """The gap statistic preferred a single cluster."""


@dataclass(frozen=True)
class Failed:
    """The cell could not be evaluated; the reason is recorded verbatim."""

    reason: str


Outcome = Union[Clusters, NoClustering, Failed]


@dataclass(frozen=True)
class GridCell:
    """One kernel spec evaluated at one KPC count."""

    spec: Kernel
    kpc_count: int
    outcome: Outcome

    def __post_init__(self):
        if self.kpc_count < 1:
            raise ValueError(f"kpc_count must be >= 1, got {self.kpc_count}")
        if not isinstance(self.outcome, (Clusters, NoClustering, Failed)):
            raise TypeError(f"unexpected outcome type {type(self.outcome).__name__}")


@dataclass(frozen=True)
class PipelineReport:
    """All evaluated cells, the winning cell, and the reproduction manifest."""

    cells: tuple
    best: GridCell
    manifest: dict = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if not any(cell is self.best for cell in self.cells):
            raise ValueError("best must be one of the report's cells")
        if not isinstance(self.best.outcome, Clusters):
            raise ValueError("best cell must carry a Clusters outcome")
        top = max(
            cell.outcome.dunn
            for cell in self.cells
            if isinstance(cell.outcome, Clusters)
        )
        if self.best.outcome.dunn != top:
            raise ValueError("best cell does not attain the maximum Dunn index")


def standardize(data) -> tuple[Array, Array, Array]:
    """Center each column and scale it to unit sample standard deviation.

    Returns the standardized matrix together with the per-column means and
    sample standard deviations (divisor M - 1) that were removed.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"data must be a 2-D matrix, got shape {X.shape}")
    if X.shape[0] < 2:
        raise EmptyInputError(f"need at least 2 rows to standardize, got {X.shape[0]}")
    if not np.isfinite(X).all():
        raise ValueError("data contains non-finite entries")
    means = X.mean(axis=0)
    sds = X.std(axis=0, ddof=1)
    for j, sd in enumerate(sds):
        if sd <= 0.0:
            raise ConstantColumnError(f"column {j} is constant; cannot standardize")
    return (X - means) / sds, means, sds


def build_grid(candidates: Sequence[float], n_features: int) -> list:
    """Enumerate the kernel roster for a set of scale candidates.

    Each candidate yields one power-exponential spec per exponent in
    GRID_EXPONENTS (the common scale repeated across all features), one
    squared-exponential spec, and one exponential-L1 spec; polynomial
    degrees 1 and 2 and a parameter-free sigmoid close the roster. Three
    candidates therefore give 21 specs. Duplicate candidates are kept as
    duplicate specs.
    """
    cand = tuple(float(c) for c in candidates)
    if not cand:
        raise ValueError("need at least one scale candidate")
    if any(not np.isfinite(c) or c <= 0.0 for c in cand):
        raise ValueError(f"scale candidates must be positive and finite, got {cand}")
    if n_features < 1:
        raise ValueError(f"n_features must be >= 1, got {n_features}")
    grid: list = []
    for p in GRID_EXPONENTS:
        for c in cand:
            grid.append(PowerExponentialKernel(p=p, scales=(c,) * n_features))
    grid.extend(RbfKernel(sigma=c) for c in cand)
    grid.extend(LaplacianKernel(sigma=c) for c in cand)
    grid.append(PolynomialKernel(c=0.0, d=1))
    grid.append(PolynomialKernel(c=0.0, d=2))
    grid.append(SigmoidKernel(a=1.0, b=0.0))
    return grid


def _cell_outcome(scores: Array, config: PipelineConfig, cell_seed: int) -> Outcome:
    """Cluster one score matrix and grade it; errors become Failed outcomes."""
    try:
        gap = gap_statistic(
            scores, kmax=config.kmax, B=config.gap_b,
            seed=cell_seed, restarts=config.restarts,
        )
        if gap.chosen_k is None:
            return NoClustering()
        assignment = kmeans(scores, gap.chosen_k, seed=cell_seed, restarts=config.restarts)
        dunn = dunn_index(scores, assignment.labels)
        return Clusters(k=assignment.k, sizes=tuple(assignment.sizes.tolist()), dunn=dunn)
    except KpclustError as exc:
        return Failed(reason=f"{type(exc).__name__}: {exc}")


def _model_outcome(
    model: Optional[KpcaModel],
    fit_error: Optional[str],
    kpc_count: int,
    config: PipelineConfig,
    cell_seed: int,
) -> Outcome:
    if model is None:
        return Failed(reason=fit_error or "kernel PCA fit failed")
    if kpc_count > model.l:
        return Failed(reason=f"only {model.l} positive components available")
    return _cell_outcome(model.training_scores()[:, :kpc_count], config, cell_seed)


def _fit_or_reason(spec: Kernel, zdata: Array, max_components: int):
    try:
        return fit_kpca(spec, zdata, max_components=max_components), None
    except KpclustError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def evaluate_cell(
    spec: Kernel,
    zdata,
    kpc_count: int,
    config: PipelineConfig,
    grid_index: int = 0,
) -> GridCell:
    """Fit one kernel spec and grade its first kpc_count score columns.

    All failure modes (kernel divergence, empty spectrum, degenerate
    geometry) are folded into the cell's outcome rather than raised, so a
    sweep never aborts on one bad cell.
    """
    if kpc_count < 1:
        raise ValueError(f"kpc_count must be >= 1, got {kpc_count}")
    cell_seed = derive_seed(config.seed, 200, grid_index)
    model, reason = _fit_or_reason(spec, np.asarray(zdata, dtype=np.float64), kpc_count)
    outcome = _model_outcome(model, reason, kpc_count, config, cell_seed)
    return GridCell(spec=spec, kpc_count=kpc_count, outcome=outcome)


def kpc_search(
    spec: Kernel,
    zdata,
    config: PipelineConfig,
    grid_index: int = 0,
) -> list:
    """Grade a spec at increasing KPC counts until the Dunn index stalls.

    Counts 1 and 2 are always evaluated (a one-component cell that finds no
    clustering is often rescued by the second component). After that, the
    sweep stops at the first count whose Dunn index fails to beat the
    running maximum, or whose outcome degrades once a clustering exists.
    The cap bounds the search when every count keeps improving.
    """
    zdata = np.asarray(zdata, dtype=np.float64)
    cell_seed = derive_seed(config.seed, 200, grid_index)
    model, reason = _fit_or_reason(spec, zdata, config.max_kpc)
    if model is None:
        return [GridCell(spec=spec, kpc_count=1, outcome=Failed(reason=reason))]
    cells: list = []
    best_dunn: Optional[float] = None
    for count in range(1, min(config.max_kpc, model.l) + 1):
        outcome = _model_outcome(model, None, count, config, cell_seed)
        cells.append(GridCell(spec=spec, kpc_count=count, outcome=outcome))
        if isinstance(outcome, Clusters):
            if best_dunn is not None and outcome.dunn <= best_dunn:
                break
            best_dunn = outcome.dunn
        elif best_dunn is not None:
            break
    return cells


def _search_entry(args) -> list:
    index, spec, zdata, config = args
    return kpc_search(spec, zdata, config, grid_index=index)


def _resolve_candidates(zdata: Array, config: PipelineConfig) -> tuple:
    if config.candidates is not None:
        return config.candidates
    interval = bca_interval(
        zdata,
        pooled_scale,
        B=config.bootstrap_b,
        alpha=config.alpha,
        seed=derive_seed(config.seed, 100),
    )
    return hyperparameter_candidates(interval)


def run_pipeline(data, config: PipelineConfig = PipelineConfig()) -> PipelineReport:
    """Run the full sweep on a raw data matrix and pick the best cell.

    Standardizes the columns, resolves the scale candidates (bootstrap
    interval endpoints and midpoint unless overridden), enumerates the
    kernel grid, evaluates every spec across KPC counts, and selects the
    largest-Dunn cell. Ties keep the earliest cell in grid order. Raises
    NoBestCellError when no cell at all produced a partition.
    """
    raw = np.asarray(data, dtype=np.float64)
    zdata, _, _ = standardize(raw)
    candidates = _resolve_candidates(zdata, config)
    grid = build_grid(candidates, n_features=zdata.shape[1])

    entries = [(i, spec, zdata, config) for i, spec in enumerate(grid)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            per_spec = list(pool.map(_search_entry, entries))
    else:
        per_spec = [_search_entry(entry) for entry in entries]

    cells: list = []
    for spec_cells in per_spec:
        cells.extend(spec_cells)

    best = None
    for cell in cells:
        if isinstance(cell.outcome, Clusters):
            if best is None or cell.outcome.dunn > best.outcome.dunn:
                best = cell
    if best is None:
        raise NoBestCellError("no grid cell produced a clustering")

    manifest = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "config": config.to_dict(),
        "candidates": [float(c) for c in candidates],
        "grid_size": len(grid),
        "eigenvalue_tolerance": EIGENVALUE_TOLERANCE,
        "seed_paths": {"bootstrap": [100], "grid_entry": [200, "index"]},
        "data_fingerprint": fingerprint_matrix(raw),
        "data_shape": [int(raw.shape[0]), int(raw.shape[1])],
    }
    return PipelineReport(cells=tuple(cells), best=best, manifest=manifest)


def rerun_config(manifest: dict) -> PipelineConfig:
    """Rebuild the exact configuration of a previous run from its manifest.

    The resolved candidates recorded in the manifest are pinned as an
    override, so the rerun skips the bootstrap and reproduces the grid even
    if defaults change between runs.
    """
    config = PipelineConfig.from_dict(manifest["config"])
    return replace(config, candidates=tuple(manifest["candidates"]))


@dataclass(frozen=True)
class RobustnessResult:
    """Average-linkage cross-check of a winning cell's score matrix.

    ``asw_by_k`` maps each candidate cluster count to its average
    silhouette width; ``hierarchical`` is the dendrogram cut at the
    argmax-ASW count; ``knn_error`` is the leave-one-out error of a k-NN
    vote on the reference labels.
    """

    asw_by_k: dict
    hierarchical: ClusterAssignment
    knn_error: float


def robustness_check(
    best_scores,
    kmeans_labels,
    kmax: int = 8,
    n_neighbors: int = KNN_NEIGHBORS,
) -> RobustnessResult:
    """Check a partition against hierarchical clustering and a k-NN vote.

    Cuts an average-linkage dendrogram of the scores at k = 2..kmax, scores
    each cut by average silhouette width, and keeps the best cut (smallest
    k wins ties). The k-NN leave-one-out error treats the k-means labels as
    ground truth and measures how self-consistent they are.
    """
    scores = np.asarray(best_scores, dtype=np.float64)
    dist = distance_matrix(scores)
    if kmax < 2 or kmax >= scores.shape[0]:
        raise ValueError(f"kmax must be in [2, {scores.shape[0] - 1}], got {kmax}")
    dend = average_linkage(dist)
    asw_by_k: dict = {}
    chosen_k = None
    for k in range(2, kmax + 1):
        cut = cut_dendrogram(dend, k)
        _, asw = silhouette(dist, cut.labels)
        asw_by_k[k] = asw
        if chosen_k is None or asw > asw_by_k[chosen_k]:
            chosen_k = k
    hierarchical = cut_dendrogram(dend, chosen_k)
    knn_error = knn_loocv_error(scores, kmeans_labels, n_neighbors=n_neighbors)
    return RobustnessResult(
        asw_by_k=asw_by_k, hierarchical=hierarchical, knn_error=knn_error
    )
