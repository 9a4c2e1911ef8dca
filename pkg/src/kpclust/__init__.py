"""Kernel PCA feature extraction and cluster validation for noisy nonlinear data."""

from .bootstrap import BcaInterval, bca_interval, hyperparameter_candidates, pooled_scale
from .clustering import (
    ClusterAssignment,
    Dendrogram,
    average_linkage,
    cut_dendrogram,
    distance_matrix,
    kmeans,
    within_cluster_ss,
)
from .data import (
    DerivedQuantities,
    GrbCatalog,
    LabeledPoints,
    SeparatingClass,
    cluster_summary,
    derived,
    entangled_spirals,
    four_shapes,
    load_catalog,
    separating_class,
)
from .errors import KpclustError
from .kernels import (
    Kernel,
    KernelMatrix,
    LaplacianKernel,
    PolynomialKernel,
    PowerExponentialKernel,
    RbfKernel,
    SigmoidKernel,
    eval_kernel,
    kernel_from_dict,
    kernel_matrix,
)
from .kpca import KpcaModel, center_kernel_matrix, double_center, fit_kpca
from .pipeline import (
    Clusters,
    Failed,
    GridCell,
    NoClustering,
    PipelineConfig,
    PipelineReport,
    RobustnessResult,
    build_grid,
    evaluate_cell,
    kpc_search,
    rerun_config,
    robustness_check,
    run_pipeline,
    standardize,
)
from .rng import derive_rng, derive_seed
from .validation import (
    GapResult,
    adjusted_rand,
    dunn_index,
    gap_statistic,
    knn_loocv_error,
    silhouette,
)

__version__ = "0.1.0"

__all__ = [
    "BcaInterval",
    "ClusterAssignment",
    "Clusters",
    "Dendrogram",
    "DerivedQuantities",
    "Failed",
    "GapResult",
    "GrbCatalog",
    "GridCell",
    "Kernel",
    "KernelMatrix",
    "KpcaModel",
    "KpclustError",
    "LabeledPoints",
    "LaplacianKernel",
    "NoClustering",
    "PipelineConfig",
    "PipelineReport",
    "PolynomialKernel",
    "PowerExponentialKernel",
    "RbfKernel",
    "RobustnessResult",
    "SeparatingClass",
    "SigmoidKernel",
    "adjusted_rand",
    "average_linkage",
    "bca_interval",
    "build_grid",
    "center_kernel_matrix",
    "cluster_summary",
    "cut_dendrogram",
    "derive_rng",
    "derive_seed",
    "derived",
    "distance_matrix",
    "double_center",
    "dunn_index",
    "entangled_spirals",
    "eval_kernel",
    "evaluate_cell",
    "fit_kpca",
    "four_shapes",
    "gap_statistic",
    "hyperparameter_candidates",
    "kernel_from_dict",
    "kernel_matrix",
    "kmeans",
    "knn_loocv_error",
    "kpc_search",
    "load_catalog",
    "pooled_scale",
    "rerun_config",
    "robustness_check",
    "run_pipeline",
    "separating_class",
    "silhouette",
    "standardize",
    "within_cluster_ss",
]
