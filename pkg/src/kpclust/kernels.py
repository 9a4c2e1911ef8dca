"""Kernel functions and Gram-matrix construction.

The central kernel here is :class:`PowerExponentialKernel`,

    k(x, y) = exp(-sum_i |(x_i - y_i) / s_i| ** p),

a bounded, positive-definite kernel for exponent ``0 < p <= 2`` with one
positive scale per coordinate. Small exponents keep the sum finite when
points are far apart, which is what makes the kernel usable on heavy-tailed
data where a Gaussian bandwidth blows up. Four comparison kernels are
provided: polynomial, Gaussian RBF, Laplacian (L1), and sigmoid.

Gram matrices are built by evaluating each unordered pair once and mirroring,
so ``K[i, j] == K[j, i]`` holds bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import ClassVar

import numpy as np

from .errors import DimensionMismatchError, NonFiniteError

Array = np.ndarray

# Rows per block when filling large cross/Gram matrices; bounds peak memory
# at roughly _BLOCK_ROWS * M * N floats without changing any result.
_BLOCK_ROWS = 256


def parse_number(value) -> float:
    """Parse a float that may be written as an exact rational like ``"1/1.5"``."""
    if isinstance(value, str) and "/" in value:
        num, den = value.split("/", 1)
        return float(num) / float(den)
    return float(value)


def _as_points(x, name: str) -> Array:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a vector or a 2-d array, got ndim={a.ndim}")
    return a


def _check_finite(block: Array, row_offset: int, col_offset: int) -> None:
    if np.isfinite(block).all():
        return
    bad = np.argwhere(~np.isfinite(block))[0]
    i, j = int(bad[0]) + row_offset, int(bad[1]) + col_offset
    raise NonFiniteError(f"kernel value at pair ({i}, {j}) is not finite")


@dataclass(frozen=True)
class Kernel:
    """Base class; subclasses are immutable value objects."""

    name: ClassVar[str] = ""

    def _cross_block(self, X: Array, Y: Array) -> Array:
        raise NotImplementedError

    def _check_dim(self, n_features: int) -> None:
        pass

    def __call__(self, x, y) -> float:
        """Evaluate k(x, y) for two single points."""
        xa = _as_points(x, "x")
        ya = _as_points(y, "y")
        if xa.shape != ya.shape or xa.shape[0] != 1:
            raise DimensionMismatchError(
                f"x and y must be single points of equal dimension, got {xa.shape} and {ya.shape}"
            )
        self._check_dim(xa.shape[1])
        value = self._cross_block(xa, ya)
        _check_finite(value, 0, 0)
        return float(value[0, 0])

    def cross(self, X, Y) -> Array:
        """Q x M matrix of k(X[q], Y[m]) values, filled in row blocks."""
        Xa = _as_points(X, "X")
        Ya = _as_points(Y, "Y")
        if Xa.shape[1] != Ya.shape[1]:
            raise DimensionMismatchError(
                f"point dimensions differ: {Xa.shape[1]} vs {Ya.shape[1]}"
            )
        self._check_dim(Xa.shape[1])
        out = np.empty((Xa.shape[0], Ya.shape[0]))
        for start in range(0, Xa.shape[0], _BLOCK_ROWS):
            stop = min(start + _BLOCK_ROWS, Xa.shape[0])
            block = self._cross_block(Xa[start:stop], Ya)
            _check_finite(block, start, 0)
            out[start:stop] = block
        return out

    def gram(self, data) -> "KernelMatrix":
        """Uncentered Gram matrix over the rows of ``data``.

        Each unordered pair is evaluated once (upper triangle) and mirrored,
        so the result is symmetric bit-for-bit.
        """
        X = _as_points(data, "data")
        m = X.shape[0]
        if m < 2:
            raise DimensionMismatchError(f"Gram matrix needs at least 2 points, got {m}")
        self._check_dim(X.shape[1])
        K = np.zeros((m, m))
        for start in range(0, m, _BLOCK_ROWS):
            stop = min(start + _BLOCK_ROWS, m)
            block = self._cross_block(X[start:stop], X[start:])
            _check_finite(block, start, start)
            K[start:stop, start:] = np.triu(block)
        K = K + np.triu(K, 1).T
        return KernelMatrix(values=K, centered=False, spec=self)

    def describe(self) -> str:
        """Human-readable hyperparameter summary, e.g. ``"rbf(sigma=1.01)"``."""
        params = ", ".join(f"{f.name}={getattr(self, f.name)!r}" for f in fields(self))
        return f"{self.name}({params})"

    def to_dict(self) -> dict:
        d = {"kernel": self.name}
        for f in fields(self):
            v = getattr(self, f.name)
            d[f.name] = list(v) if isinstance(v, tuple) else v
        return d


@dataclass(frozen=True)
class PowerExponentialKernel(Kernel):
    """exp(-sum_i |(x_i - y_i)/scales_i| ** p), positive definite for 0 < p <= 2."""

    p: float
    scales: tuple[float, ...]

    name: ClassVar[str] = "proposed"

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        if not 0.0 < self.p <= 2.0:
            raise ValueError(f"p must lie in (0, 2] to keep the kernel positive definite, got {self.p}")
        if len(self.scales) == 0:
            raise ValueError("scales must be non-empty")
        if any(s <= 0.0 or not np.isfinite(s) for s in self.scales):
            raise ValueError(f"all scales must be positive and finite, got {self.scales}")

    def _check_dim(self, n_features: int) -> None:
        if n_features != len(self.scales):
            raise DimensionMismatchError(
                f"kernel has {len(self.scales)} scales but points have {n_features} coordinates"
            )

    def _cross_block(self, X: Array, Y: Array) -> Array:
        s = np.asarray(self.scales)
        # |0|**p is 0 for every p > 0, so coordinate ties are safe.
        terms = np.abs(X[:, None, :] - Y[None, :, :]) / s
        return np.exp(-np.power(terms, self.p).sum(axis=2))


@dataclass(frozen=True)
class PolynomialKernel(Kernel):
    """(<x, y> + c) ** d with c >= 0 and integer degree d >= 1."""

    c: float
    d: int

    name: ClassVar[str] = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "d", int(self.d))
        if self.c < 0.0:
            raise ValueError(f"c must be >= 0, got {self.c}")
        if self.d < 1:
            raise ValueError(f"degree must be a positive integer, got {self.d}")

    def _cross_block(self, X: Array, Y: Array) -> Array:
        # overflow to inf is an anticipated input condition; the caller's
        # finiteness check turns it into a typed error with the pair index
        with np.errstate(over="ignore"):
            return (X @ Y.T + self.c) ** self.d


@dataclass(frozen=True)
class RbfKernel(Kernel):
    """Gaussian radial basis function exp(-||x - y||^2 / (2 sigma^2))."""

    sigma: float

    name: ClassVar[str] = "rbf"

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(self.sigma))
        if self.sigma <= 0.0 or not np.isfinite(self.sigma):
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def _cross_block(self, X: Array, Y: Array) -> Array:
        sq = ((X[:, None, :] - Y[None, :, :]) ** 2).sum(axis=2)
        return np.exp(-sq / (2.0 * self.sigma**2))


@dataclass(frozen=True)
class LaplacianKernel(Kernel):
    """exp(-||x - y||_1 / sigma).

    Uses the L1 norm, the convention under which the power-exponential kernel
    with p = 1 and all scales equal to sigma coincides with this kernel
    coordinate-by-coordinate.
    """

    sigma: float

    name: ClassVar[str] = "laplacian"

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(self.sigma))
        if self.sigma <= 0.0 or not np.isfinite(self.sigma):
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def _cross_block(self, X: Array, Y: Array) -> Array:
        l1 = np.abs(X[:, None, :] - Y[None, :, :]).sum(axis=2)
        return np.exp(-l1 / self.sigma)


@dataclass(frozen=True)
class SigmoidKernel(Kernel):
    """tanh(a <x, y> + b) with a, b >= 0. Not positive definite in general."""

    a: float
    b: float

    name: ClassVar[str] = "sigmoid"

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if self.a < 0.0 or self.b < 0.0:
            raise ValueError(f"a and b must be >= 0, got a={self.a}, b={self.b}")

    def _cross_block(self, X: Array, Y: Array) -> Array:
        return np.tanh(self.a * (X @ Y.T) + self.b)


_KERNEL_CLASSES = {
    cls.name: cls
    for cls in (PowerExponentialKernel, PolynomialKernel, RbfKernel, LaplacianKernel, SigmoidKernel)
}


def kernel_from_dict(record: dict) -> Kernel:
    """Build a kernel from a config record like ``{"kernel": "proposed", "p": "1/2", ...}``.

    Numeric fields accept exact rationals written as strings (``"1/1.5"``).
    """
    rec = dict(record)
    try:
        name = rec.pop("kernel")
    except KeyError:
        raise ValueError("kernel record is missing the 'kernel' field") from None
    try:
        cls = _KERNEL_CLASSES[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; expected one of {sorted(_KERNEL_CLASSES)}"
        ) from None
    kwargs = {}
    for f in fields(cls):
        if f.name not in rec:
            raise ValueError(f"kernel {name!r} record is missing field {f.name!r}")
        v = rec.pop(f.name)
        if f.name == "scales":
            kwargs[f.name] = tuple(parse_number(s) for s in v)
        elif f.name == "d":
            kwargs[f.name] = int(v)
        else:
            kwargs[f.name] = parse_number(v)
    if rec:
        raise ValueError(f"unexpected fields in kernel record: {sorted(rec)}")
    return cls(**kwargs)


@dataclass(frozen=True)
class KernelMatrix:
    """M x M symmetric matrix of pairwise kernel values.

    ``values`` is made read-only on construction; a KernelMatrix can be shared
    freely across threads.
    """

    values: Array
    centered: bool
    spec: Kernel

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatchError(f"kernel matrix must be square, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise NonFiniteError("kernel matrix contains non-finite entries")
        if not np.array_equal(v, v.T):
            raise ValueError("kernel matrix must be exactly symmetric")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def eval_kernel(spec: Kernel, x, y) -> float:
    """Evaluate a kernel at a single pair of points."""
    return spec(x, y)


def kernel_matrix(spec: Kernel, data) -> KernelMatrix:
    """Uncentered Gram matrix of ``spec`` over the rows of ``data``."""
    return spec.gram(data)
