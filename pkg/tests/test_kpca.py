"""Tests for Gram-matrix centering, the eigensolver wrapper, and kernel PCA."""

import numpy as np
import pytest

from kpclust.errors import (
    AlreadyCenteredError,
    DimensionMismatchError,
    NonFiniteError,
    NoPositiveEigenvaluesError,
)
from kpclust.kernels import (
    KernelMatrix,
    PolynomialKernel,
    PowerExponentialKernel,
    RbfKernel,
)
from kpclust.kpca import (
    KpcaModel,
    center_kernel_matrix,
    double_center,
    fit_kpca,
    symmetric_eigendecomposition,
)


def centering_oracle(K):
    """Direct expansion: K - 1M K - K 1M + 1M K 1M with 1M = all-ones/M."""
    m = K.shape[0]
    ones = np.full((m, m), 1.0 / m)
    return K - ones @ K - K @ ones + ones @ K @ ones


def random_gram(rng, m, kind="rbf"):
    X = rng.normal(size=(m, 3))
    return RbfKernel(sigma=1.0).gram(X)


# ---------------------------------------------------------------- centering


def test_double_center_two_by_two_closed_form():
    a = 0.3
    K = np.array([[1.0, a], [a, 1.0]])
    want = np.array([[(1 - a) / 2, (a - 1) / 2], [(a - 1) / 2, (1 - a) / 2]])
    np.testing.assert_allclose(double_center(K), want, atol=1e-15)


def test_double_center_constant_matrix_is_zero():
    K = np.full((4, 4), 0.7)
    np.testing.assert_allclose(double_center(K), np.zeros((4, 4)), atol=1e-15)


def test_double_center_matches_ones_matrix_expansion():
    rng = np.random.default_rng(21)
    for _ in range(50):
        m = int(rng.integers(2, 13))
        A = rng.normal(size=(m, m))
        K = (A + A.T) / 2
        np.testing.assert_allclose(double_center(K), centering_oracle(K), atol=1e-12)


def test_centered_rows_and_columns_sum_to_zero():
    rng = np.random.default_rng(22)
    for _ in range(50):
        K = random_gram(rng, int(rng.integers(2, 40)))
        C = center_kernel_matrix(K)
        m = C.size
        bound = 1e-9 * m * np.abs(K.values).max()
        assert np.abs(C.values.sum(axis=0)).max() < bound
        assert np.abs(C.values.sum(axis=1)).max() < bound


def test_centering_is_idempotent():
    rng = np.random.default_rng(23)
    K = random_gram(rng, 15)
    once = double_center(K.values)
    twice = double_center(once)
    assert np.abs(twice - once).max() < 1e-12


def test_centering_twice_raises():
    K = random_gram(np.random.default_rng(24), 6)
    C = center_kernel_matrix(K)
    assert C.centered is True
    with pytest.raises(AlreadyCenteredError):
        center_kernel_matrix(C)


def test_centered_matrix_is_exactly_symmetric():
    rng = np.random.default_rng(25)
    K = random_gram(rng, 300)
    C = center_kernel_matrix(K)
    assert np.array_equal(C.values, C.values.T)


# ---------------------------------------------------------------- eigensolver


def test_eigendecomposition_identity():
    res = symmetric_eigendecomposition(np.eye(3))
    np.testing.assert_allclose(res.eigenvalues, [1.0, 1.0, 1.0], atol=1e-15)


def test_eigendecomposition_two_by_two():
    res = symmetric_eigendecomposition(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(res.eigenvalues, [3.0, 1.0], atol=1e-12)
    v0, v1 = res.eigenvectors[:, 0], res.eigenvectors[:, 1]
    r = 1.0 / np.sqrt(2.0)
    assert min(np.abs(v0 - [r, r]).max(), np.abs(v0 + [r, r]).max()) < 1e-12
    assert min(np.abs(v1 - [r, -r]).max(), np.abs(v1 + [r, -r]).max()) < 1e-12


def test_eigendecomposition_reconstructs_input():
    rng = np.random.default_rng(31)
    for _ in range(20):
        A = rng.normal(size=(10, 10))
        A = (A + A.T) / 2
        res = symmetric_eigendecomposition(A)
        rebuilt = res.eigenvectors @ np.diag(res.eigenvalues) @ res.eigenvectors.T
        rel = np.linalg.norm(rebuilt - A) / np.linalg.norm(A)
        assert rel < 1e-9
        assert np.all(np.diff(res.eigenvalues) <= 0.0)
        gram = res.eigenvectors.T @ res.eigenvectors
        assert np.abs(gram - np.eye(10)).max() < 1e-10
        resid = A @ res.eigenvectors - res.eigenvectors * res.eigenvalues[None, :]
        assert np.abs(resid).max() < 1e-10 * np.abs(A).max() * 10


def test_eigendecomposition_rejects_bad_input():
    with pytest.raises(DimensionMismatchError):
        symmetric_eigendecomposition(np.ones((2, 3)))
    with pytest.raises(ValueError):
        symmetric_eigendecomposition(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NonFiniteError):
        symmetric_eigendecomposition(np.array([[np.nan, 0.0], [0.0, 1.0]]))


# ---------------------------------------------------------------- fitting


def test_alpha_normalization():
    rng = np.random.default_rng(41)
    X = rng.normal(size=(30, 4))
    model = fit_kpca(PowerExponentialKernel(p=0.8, scales=(1.0,) * 4), X, max_components=5)
    for k in range(model.l):
        norm = model.alphas[:, k] @ model.alphas[:, k] * model.eigenvalues[k]
        assert abs(norm - 1.0) < 1e-8
    assert np.all(np.diff(model.eigenvalues) <= 0.0)
    assert model.eigenvalues[-1] > 0.0


def test_identical_rows_raise_no_positive_eigenvalues():
    X = np.ones((8, 3))
    with pytest.raises(NoPositiveEigenvaluesError):
        fit_kpca(RbfKernel(sigma=1.0), X, max_components=2)


def test_training_scores_have_zero_mean_and_variance_lambda_over_m():
    rng = np.random.default_rng(42)
    X = rng.normal(size=(25, 3))
    model = fit_kpca(RbfKernel(sigma=1.5), X, max_components=4)
    S = model.training_scores()
    m = X.shape[0]
    assert np.abs(S.mean(axis=0)).max() < 1e-9
    for k in range(model.l):
        var = np.var(S[:, k])
        want = model.eigenvalues[k] / m
        assert abs(var - want) < 1e-8 * want


def test_retention_respects_rank_and_cap():
    rng = np.random.default_rng(43)
    # rank-2 data under a linear kernel leaves exactly 2 positive eigenvalues
    basis = rng.normal(size=(2, 5))
    X = rng.normal(size=(12, 2)) @ basis
    model = fit_kpca(PolynomialKernel(c=0.0, d=1), X, max_components=6)
    assert model.l == 2
    assert model.positive_eigenvalues.shape[0] == 2
    capped = fit_kpca(PolynomialKernel(c=0.0, d=1), X, max_components=1)
    assert capped.l == 1
    assert capped.positive_eigenvalues.shape[0] == 2


def test_max_components_must_be_positive():
    with pytest.raises(ValueError):
        fit_kpca(RbfKernel(sigma=1.0), np.eye(3), max_components=0)


def classical_pca_scores(X):
    """Covariance-route PCA: center columns, eigendecompose X_c^T X_c, project."""
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc
    w, v = np.linalg.eigh(cov)
    order = np.argsort(w)[::-1]
    return Xc @ v[:, order], w[order]


def test_linear_kernel_reproduces_classical_pca():
    rng = np.random.default_rng(44)
    for _ in range(20):
        m = int(rng.integers(6, 30))
        n = int(rng.integers(2, 6))
        X = rng.normal(size=(m, n)) * rng.uniform(0.5, 3.0, size=n)
        model = fit_kpca(PolynomialKernel(c=0.0, d=1), X, max_components=n)
        got = model.training_scores()
        want, _ = classical_pca_scores(X)
        want = want[:, : model.l]
        for k in range(model.l):
            diff = min(
                np.abs(got[:, k] - want[:, k]).max(),
                np.abs(got[:, k] + want[:, k]).max(),
            )
            assert diff < 1e-8


# ---------------------------------------------------------------- projection


def test_project_training_data_matches_training_scores():
    rng = np.random.default_rng(45)
    X = rng.normal(size=(20, 3))
    model = fit_kpca(PowerExponentialKernel(p=0.5, scales=(1.0, 1.2, 0.8)), X, max_components=3)
    np.testing.assert_allclose(model.project(X), model.training_scores(), atol=1e-8)


def test_project_empty_input():
    X = np.random.default_rng(46).normal(size=(10, 2))
    model = fit_kpca(RbfKernel(sigma=1.0), X, max_components=2)
    out = model.project(np.empty((0, 2)))
    assert out.shape == (0, 2)


def test_project_dimension_mismatch():
    X = np.random.default_rng(47).normal(size=(10, 2))
    model = fit_kpca(RbfKernel(sigma=1.0), X, max_components=2)
    with pytest.raises(DimensionMismatchError):
        model.project(np.ones((3, 5)))


def test_project_far_away_point_feature_space_oracle():
    # With a bounded kernel a remote point has kernel row ~ 0, so only the
    # centering offsets survive: score_k = (grand_mean - column_means) @ alpha_k.
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    kern = PowerExponentialKernel(p=0.5, scales=(0.05, 0.05))
    model = fit_kpca(kern, X, max_components=2)
    far = np.array([[500.0, 500.0]])
    want = (model.grand_mean - model.column_means) @ model.alphas
    got = model.project(far)[0]
    np.testing.assert_allclose(got, want, atol=1e-8)


def test_permuting_rows_permutes_scores():
    rng = np.random.default_rng(48)
    X = rng.normal(size=(15, 3))
    perm = rng.permutation(15)
    kern = RbfKernel(sigma=1.1)
    a = fit_kpca(kern, X, max_components=3).training_scores()
    b = fit_kpca(kern, X[perm], max_components=3).training_scores()
    np.testing.assert_allclose(b, a[perm], atol=1e-8)


def test_scores_deterministic_across_repeat_fits():
    rng = np.random.default_rng(49)
    X = rng.normal(size=(40, 3))
    kern = PowerExponentialKernel(p=0.5, scales=(0.9, 1.0, 1.1))
    a = fit_kpca(kern, X, max_components=4)
    b = fit_kpca(kern, X, max_components=4)
    assert np.array_equal(a.training_scores(), b.training_scores())
    assert np.array_equal(a.alphas, b.alphas)


# ---------------------------------------------------------------- reporting


def test_explained_variance_ratio_examples():
    rng = np.random.default_rng(50)
    X = rng.normal(size=(12, 3))
    model = fit_kpca(RbfKernel(sigma=1.0), X, max_components=50)
    ratios = model.explained_variance_ratio()
    np.testing.assert_allclose(
        ratios, model.eigenvalues / model.positive_eigenvalues.sum(), atol=1e-15
    )
    assert ratios.sum() <= 1.0 + 1e-12
    truncated = fit_kpca(RbfKernel(sigma=1.0), X, max_components=2)
    assert truncated.explained_variance_ratio().sum() < 1.0
    # two retained eigenvalues (3, 1) split variance 0.75 / 0.25
    toy = KpcaModel(
        kernel=RbfKernel(sigma=1.0),
        training_data=np.zeros((2, 1)),
        eigenvalues=np.array([3.0, 1.0]),
        positive_eigenvalues=np.array([3.0, 1.0]),
        alphas=np.eye(2),
        column_means=np.zeros(2),
        grand_mean=0.0,
        scores=np.zeros((2, 2)),
    )
    np.testing.assert_allclose(toy.explained_variance_ratio(), [0.75, 0.25])
    single = KpcaModel(
        kernel=RbfKernel(sigma=1.0),
        training_data=np.zeros((2, 1)),
        eigenvalues=np.array([2.0]),
        positive_eigenvalues=np.array([2.0]),
        alphas=np.ones((2, 1)),
        column_means=np.zeros(2),
        grand_mean=0.0,
        scores=np.zeros((2, 1)),
    )
    np.testing.assert_allclose(single.explained_variance_ratio(), [1.0])


def test_model_round_trip_is_bit_stable(tmp_path):
    rng = np.random.default_rng(51)
    X = rng.normal(size=(18, 2))
    model = fit_kpca(PowerExponentialKernel(p=0.5, scales=(0.7, 1.3)), X, max_components=3)
    path = tmp_path / "model.json"
    model.save(path)
    loaded = KpcaModel.load(path)
    assert loaded.kernel == model.kernel
    assert np.array_equal(loaded.training_data, model.training_data)
    assert np.array_equal(loaded.eigenvalues, model.eigenvalues)
    assert np.array_equal(loaded.positive_eigenvalues, model.positive_eigenvalues)
    assert np.array_equal(loaded.alphas, model.alphas)
    assert np.array_equal(loaded.column_means, model.column_means)
    assert loaded.grand_mean == model.grand_mean
    assert np.array_equal(loaded.training_scores(), model.training_scores())
    probe = rng.normal(size=(4, 2))
    assert np.array_equal(loaded.project(probe), model.project(probe))


def test_load_rejects_unknown_format(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "something-else", "version": 1}')
    with pytest.raises(ValueError):
        KpcaModel.load(path)


def test_centered_gram_spectrum_nonnegative_for_bounded_kernels():
    rng = np.random.default_rng(52)
    for kern in (
        PowerExponentialKernel(p=0.5, scales=(1.0, 1.0)),
        RbfKernel(sigma=1.0),
    ):
        X = rng.normal(size=(25, 2))
        C = center_kernel_matrix(kern.gram(X))
        w = np.linalg.eigvalsh(C.values)
        assert w.min() >= -1e-8 * w.max()


def test_kernel_matrix_centered_flag_round_trip():
    K = random_gram(np.random.default_rng(53), 8)
    C = center_kernel_matrix(K)
    assert isinstance(C, KernelMatrix)
    assert C.spec == K.spec
