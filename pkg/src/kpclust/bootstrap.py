"""Nonparametric BCa bootstrap for the pooled scale statistic.

The pipeline standardizes the catalog once, treats every matrix entry as one
sample, and brackets the sample standard deviation of that pooled sample
with a bias-corrected accelerated (BCa) bootstrap interval. The interval
endpoints and their midpoint become the kernel scale candidates.

Resampling draws whole rows with replacement, preserving any dependence
between the measurements of one observation. All randomness comes from a
single stream derived from the seed, so intervals are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DegenerateBootstrapError, TooFewValuesError
from .rng import derive_rng

Array = np.ndarray


def pooled_scale(standardized) -> float:
    """Sample standard deviation of all matrix entries pooled together.

    Expects column-standardized input; the pooled spread of an M x N
    standardized matrix sits near 1 and its bootstrap interval is what the
    kernel scale grid is built from.
    """
    values = np.asarray(standardized, dtype=np.float64).ravel()
    if values.shape[0] < 2:
        raise TooFewValuesError(
            f"pooled scale needs at least 2 values, got {values.shape[0]}"
        )
    return float(values.std(ddof=1))


@dataclass(frozen=True)
class BcaInterval:
    """BCa confidence interval for a statistic.

    ``z0`` is the bias correction, ``accel`` the jackknife acceleration.
    Extreme skew can push the interval off the point estimate; that is
    reported by ``contains_point_estimate``, not raised.
    """

    lower: float
    upper: float
    point_estimate: float
    B: int
    alpha: float
    z0: float
    accel: float

    @property
    def contains_point_estimate(self) -> bool:
        return self.lower <= self.point_estimate <= self.upper

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2.0


def _jackknife_acceleration(sample: Array, statistic: Callable) -> float:
    n = sample.shape[0]
    mask = np.ones(n, dtype=bool)
    theta = np.empty(n)
    for i in range(n):
        mask[i] = False
        theta[i] = statistic(sample[mask])
        mask[i] = True
    dev = theta.mean() - theta
    denom = (dev**2).sum() ** 1.5
    if denom == 0.0:
        return 0.0
    return float((dev**3).sum() / (6.0 * denom))


def bca_interval(
    sample, statistic: Callable, B: int = 2000, alpha: float = 0.05, seed: int = 0
) -> BcaInterval:
    """Bias-corrected accelerated bootstrap interval for ``statistic``.

    Rows of ``sample`` are resampled with replacement B times; the interval
    endpoints are the bootstrap-distribution quantiles at the BCa-adjusted
    levels. Raises DegenerateBootstrapError when the bootstrap distribution
    carries no usable information (all replicates equal, or the point
    estimate falls outside it entirely).
    """
    data = np.asarray(sample, dtype=np.float64)
    n = data.shape[0]
    if n < 2:
        raise TooFewValuesError(f"need at least 2 rows to resample, got {n}")
    if B < 100:
        raise ValueError(f"B must be >= 100, got {B}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")

    point = float(statistic(data))
    idx = derive_rng(seed, 0).integers(0, n, size=(B, n))
    replicates = np.array([statistic(data[idx[b]]) for b in range(B)])

    if replicates.max() == replicates.min():
        raise DegenerateBootstrapError("all bootstrap replicates are identical")
    p0 = ((replicates < point).sum() + 0.5 * (replicates == point).sum()) / B
    if p0 <= 0.0 or p0 >= 1.0:
        raise DegenerateBootstrapError(
            "point estimate lies outside the whole bootstrap distribution"
        )
    z0 = float(ndtri(p0))
    accel = _jackknife_acceleration(data, statistic)

    z_lo = ndtri(alpha / 2.0)
    z_hi = ndtri(1.0 - alpha / 2.0)
    a_lo = float(ndtr(z0 + (z0 + z_lo) / (1.0 - accel * (z0 + z_lo))))
    a_hi = float(ndtr(z0 + (z0 + z_hi) / (1.0 - accel * (z0 + z_hi))))
    lower, upper = np.quantile(replicates, [a_lo, a_hi])
    return BcaInterval(
        lower=float(lower),
        upper=float(upper),
        point_estimate=point,
        B=int(B),
        alpha=float(alpha),
        z0=z0,
        accel=accel,
    )


def hyperparameter_candidates(interval: BcaInterval) -> tuple[float, float, float]:
    """Kernel scale candidates: interval endpoints and their midpoint."""
    return interval.lower, interval.upper, interval.midpoint
