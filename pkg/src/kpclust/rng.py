"""Deterministic random-stream derivation.

All randomness in the library flows from a single integer seed. A consumer
never shares a generator with another consumer; instead it derives its own
stream from the root seed plus a path of small non-negative integers, e.g.
``derive_rng(seed, 1, b)`` for the b-th reference dataset. Streams are
independent PCG64 generators keyed through ``numpy.random.SeedSequence``, so
results are reproducible bit-for-bit and do not depend on execution order or
thread count.

Path tags used across the library (roots; consumers may derive further):

========================  =====================================
``(seed, r)``             k-means restart ``r``
``(seed, 0, k)``          gap statistic, data clustering at k
``(seed, 1, b)``          gap statistic, reference draw b
``(seed, 2, b, k)``       gap statistic, reference clustering
``(seed, 0)``             bootstrap resample index matrix
``(seed, 100)``           pipeline: bootstrap interval
``(seed, 200, i)``        pipeline: grid entry i
========================  =====================================
"""

from __future__ import annotations

import numpy as np


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Return an independent generator for ``(seed, *path)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(p) for p in path)]))


def derive_seed(seed: int, *path: int) -> int:
    """Collapse ``(seed, *path)`` to one integer, for APIs that take a seed."""
    ss = np.random.SeedSequence([int(seed), *(int(p) for p in path)])
    return int(ss.generate_state(1, np.uint64)[0])
