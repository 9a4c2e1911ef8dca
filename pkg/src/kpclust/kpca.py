"""Kernel principal component analysis.

Fitting builds the Gram matrix of a kernel over the training rows, double
centers it so the mapped features have zero mean in feature space, solves
the symmetric eigenproblem, and keeps the leading components with positive
eigenvalues. Dual coefficient columns are normalized so that
``alpha_k . alpha_k == 1 / lambda_k``, which makes the implicit feature-space
axes unit length. Projection of a new point x is then
``sum_i alpha_i_k * k(x_i, x)`` with the matching out-of-sample centering.

Eigenvalues reported are those of the centered Gram matrix itself; the
conventional factor M in ``M lambda alpha = K alpha`` only rescales them and
cancels everywhere they are used (ordering, normalization, variance ratios).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlreadyCenteredError,
    DimensionMismatchError,
    NoConvergenceError,
    NonFiniteError,
    NoPositiveEigenvaluesError,
)
from .kernels import Kernel, KernelMatrix, kernel_from_dict

Array = np.ndarray

# An eigenvalue counts as zero below this fraction of the largest one.
EIGENVALUE_TOLERANCE = 1e-9

_MODEL_FORMAT = "kpclust-kpca-model"


def double_center(values: Array) -> Array:
    """Subtract row means, column means, and add back the grand mean.

    For a symmetric input the output is symmetric bit-for-bit; the row and
    column corrections use the same mean vector, added in a symmetric order.
    """
    v = np.asarray(values, dtype=np.float64)
    col_means = v.mean(axis=0)
    grand_mean = col_means.mean()
    return v - (col_means[None, :] + col_means[:, None]) + grand_mean


def center_kernel_matrix(K: KernelMatrix) -> KernelMatrix:
    """Center a Gram matrix so mapped features average to zero.

    Every row and column of the result sums to zero up to rounding. Raises
    AlreadyCenteredError rather than silently centering twice.
    """
    if K.centered:
        raise AlreadyCenteredError("kernel matrix is already centered")
    return KernelMatrix(values=double_center(K.values), centered=True, spec=K.spec)


@dataclass(frozen=True)
class EigenResult:
    """Full spectrum of a symmetric matrix, eigenvalues descending."""

    eigenvalues: Array
    eigenvectors: Array


def symmetric_eigendecomposition(A) -> EigenResult:
    """Eigenvalues (descending) and orthonormal eigenvector columns of A."""
    a = np.asarray(A, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"matrix must be square, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise NonFiniteError("matrix contains non-finite entries")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix must be symmetric")
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"eigendecomposition failed to converge: {exc}") from exc
    order = np.arange(w.shape[0] - 1, -1, -1)
    return EigenResult(eigenvalues=w[order], eigenvectors=v[:, order])


def _fix_signs(vectors: Array) -> Array:
    """Flip each column so its largest-magnitude entry is positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        lead = int(np.argmax(np.abs(out[:, k])))
        if out[lead, k] < 0.0:
            out[:, k] = -out[:, k]
    return out


def _freeze(a: Array) -> Array:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KpcaModel:
    """Fitted kernel PCA model.

    Fields:
        kernel: the kernel the model was fitted with.
        training_data: M x N matrix the Gram matrix was built from.
        eigenvalues: retained eigenvalues of the centered Gram matrix,
            descending, all positive (length l).
        positive_eigenvalues: the full positive spectrum (length >= l),
            kept so variance ratios are taken against all usable variance.
        alphas: M x l dual coefficients, column k scaled so that
            dot(alphas[:, k], alphas[:, k]) * eigenvalues[k] == 1.
        column_means: per-column means of the uncentered Gram matrix.
        grand_mean: mean of all uncentered Gram entries.
        scores: cached M x l training scores (lambda_k * alpha_k).
    """

    kernel: Kernel
    training_data: Array
    eigenvalues: Array
    positive_eigenvalues: Array
    alphas: Array
    column_means: Array
    grand_mean: float
    scores: Array

    @property
    def l(self) -> int:
        """Number of retained components."""
        return self.alphas.shape[1]

    def training_scores(self) -> Array:
        """M x l matrix of kernel principal component scores of the training rows."""
        return self.scores

    def project(self, points) -> Array:
        """Project points onto the retained kernel principal components.

        Accepts a Q x N matrix (or a single N-vector) and returns Q x l
        scores. Projecting the training rows reproduces training_scores up
        to rounding.
        """
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2:
            raise DimensionMismatchError(f"points must be a 2-d matrix, got ndim={pts.ndim}")
        if pts.shape[0] == 0:
            return np.empty((0, self.l))
        if pts.shape[1] != self.training_data.shape[1]:
            raise DimensionMismatchError(
                f"points have {pts.shape[1]} coordinates, training data has "
                f"{self.training_data.shape[1]}"
            )
        rows = self.kernel.cross(pts, self.training_data)
        centered = (
            rows
            - self.column_means[None, :]
            - rows.mean(axis=1)[:, None]
            + self.grand_mean
        )
        return centered @ self.alphas

    def explained_variance_ratio(self) -> Array:
        """Share of positive-spectrum variance carried by each retained component."""
        return self.eigenvalues / self.positive_eigenvalues.sum()

    def to_dict(self) -> dict:
        return {
            "format": _MODEL_FORMAT,
            "version": 1,
            "kernel": self.kernel.to_dict(),
            "training_data": self.training_data.tolist(),
            "positive_eigenvalues": self.positive_eigenvalues.tolist(),
            "alphas": self.alphas.tolist(),
            "column_means": self.column_means.tolist(),
            "grand_mean": self.grand_mean,
        }

    def save(self, path) -> None:
        """Write the model to a JSON file; floats round-trip exactly."""
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def from_dict(cls, record: dict) -> "KpcaModel":
        if record.get("format") != _MODEL_FORMAT or record.get("version") != 1:
            raise ValueError("not a recognized kernel PCA model record")
        kernel = kernel_from_dict(record["kernel"])
        positive = np.asarray(record["positive_eigenvalues"], dtype=np.float64)
        alphas = np.asarray(record["alphas"], dtype=np.float64)
        eigenvalues = positive[: alphas.shape[1]]
        return cls(
            kernel=kernel,
            training_data=_freeze(np.asarray(record["training_data"])),
            eigenvalues=_freeze(eigenvalues),
            positive_eigenvalues=_freeze(positive),
            alphas=_freeze(alphas),
            column_means=_freeze(np.asarray(record["column_means"])),
            grand_mean=float(record["grand_mean"]),
            scores=_freeze(alphas * eigenvalues[None, :]),
        )

    @classmethod
    def load(cls, path) -> "KpcaModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def fit_kpca(kernel: Kernel, data, max_components: int) -> KpcaModel:
    """Fit kernel PCA on the rows of ``data``.

    Builds and centers the Gram matrix, takes the eigendecomposition, drops
    eigenvalues that are negative or below EIGENVALUE_TOLERANCE times the
    largest, and retains at most ``max_components`` components. Raises
    NoPositiveEigenvaluesError when nothing usable remains (for example when
    all rows are identical, so the centered Gram matrix is zero).
    """
    if max_components < 1:
        raise ValueError(f"max_components must be >= 1, got {max_components}")
    X = np.asarray(data, dtype=np.float64)
    K = kernel.gram(X)
    column_means = K.values.mean(axis=0)
    grand_mean = float(column_means.mean())
    centered = center_kernel_matrix(K)
    eig = symmetric_eigendecomposition(centered.values)

    lam = eig.eigenvalues
    if lam[0] <= 0.0:
        raise NoPositiveEigenvaluesError(
            "centered kernel matrix has no positive eigenvalues"
        )
    tol = EIGENVALUE_TOLERANCE * lam[0]
    positive = lam[lam > tol]
    n_keep = min(int(max_components), positive.shape[0])
    lam_kept = positive[:n_keep]

    vectors = _fix_signs(eig.eigenvectors[:, :n_keep])
    alphas = vectors / np.sqrt(lam_kept)[None, :]
    scores = alphas * lam_kept[None, :]

    # Consistency check of the dual form: centered-Gram times alpha must
    # reproduce lambda times alpha, otherwise the solver output is unusable.
    residual = centered.values @ alphas - scores
    if np.abs(residual).max() > 1e-8 * max(1.0, lam_kept[0]):
        raise NoConvergenceError("eigenvector residual exceeds tolerance")

    return KpcaModel(
        kernel=kernel,
        training_data=_freeze(X),
        eigenvalues=_freeze(lam_kept),
        positive_eigenvalues=_freeze(positive),
        alphas=_freeze(alphas),
        column_means=_freeze(column_means),
        grand_mean=grand_mean,
        scores=_freeze(scores),
    )
