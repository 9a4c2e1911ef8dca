"""Exception types raised by the library.

Every error derives from :class:`KpclustError` so callers can catch the whole
family; most also derive from the closest builtin so generic handlers keep
working.
"""


class KpclustError(Exception):
    """Base class for all kpclust errors."""


class DimensionMismatchError(KpclustError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class NonFiniteError(KpclustError, ArithmeticError):
    """A computation produced NaN or infinity."""


class AlreadyCenteredError(KpclustError, ValueError):
    """Attempt to double-center a kernel matrix twice."""


class NoConvergenceError(KpclustError, RuntimeError):
    """The eigensolver failed to converge."""


class NoPositiveEigenvaluesError(KpclustError, ValueError):
    """A centered kernel matrix has no usable (positive) spectrum."""


class EmptyInputError(KpclustError, ValueError):
    """An operation received no data points."""


class KTooLargeError(KpclustError, ValueError):
    """Requested cluster count exceeds what the data supports."""


class SingleClusterError(KpclustError, ValueError):
    """A validation index needs at least two clusters."""


class ZeroDiameterError(KpclustError, ValueError):
    """Every cluster has zero diameter, so a diameter ratio is undefined."""


class TooFewPointsError(KpclustError, ValueError):
    """Not enough points for the requested neighborhood size."""


class LengthMismatchError(KpclustError, ValueError):
    """Two aligned sequences have different lengths."""


class DegenerateBootstrapError(KpclustError, ValueError):
    """Bootstrap replicates are degenerate; the BCa correction is undefined."""


class TooFewValuesError(KpclustError, ValueError):
    """A statistic needs more values than were supplied."""


class ConstantColumnError(KpclustError, ValueError):
    """A column has zero variance and cannot be standardized."""


class NoBestCellError(KpclustError, RuntimeError):
    """No grid cell produced a clustering, so there is no best cell."""


class MissingColumnError(KpclustError, ValueError):
    """A required catalog column is absent from the input file."""


class EmptyCatalogError(KpclustError, ValueError):
    """No catalog rows survived parsing and validation."""


class OddSampleSizeError(KpclustError, ValueError):
    """A generator needs an even sample size."""


class NonPositiveValueError(KpclustError, ValueError):
    """A strictly positive quantity was zero or negative."""
