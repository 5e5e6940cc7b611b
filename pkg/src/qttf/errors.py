"""Exception and warning types shared across the package."""


class QttfError(Exception):
    """Base class for all library-specific errors."""


class InvalidDimensionError(QttfError, ValueError):
    """Hilbert-space dimension is not an integer >= 2."""


class DimensionMismatchError(QttfError, ValueError):
    """Objects built for different Hilbert-space dimensions were combined."""


class UnsupportedDimensionError(QttfError, ValueError):
    """A builtin constructor does not cover the requested dimension."""


class UnsupportedOrderError(QttfError, ValueError):
    """Requested moment or series order is outside the implemented range."""


class PomValidationError(QttfError, ValueError):
    """Outcome set violates a measurement invariant (hermiticity, positivity, completeness)."""


class PomSchemaError(QttfError, ValueError):
    """A serialized measurement file does not match the JSON schema."""


class DegenerateDrawError(QttfError, RuntimeError):
    """Random measurement generation kept producing a singular outcome sum."""


class NotInformationallyCompleteError(QttfError, ValueError):
    """The measurement matrix is rank deficient, so no Fisher inverse exists."""


class ZeroProbabilityError(QttfError, ValueError):
    """An outcome probability fell at or below the probability floor."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotMinimallyCompleteError(QttfError, ValueError):
    """Closed form requires exactly dim**2 outcomes with full-rank measurement matrix."""


class NotMinimalBasesError(QttfError, ValueError):
    """Closed form requires dim+1 rank-one bases of dim outcomes each."""


class BudgetExceededError(QttfError, RuntimeError):
    """A tensor contraction would exceed the configured memory budget."""


class PathologicalPomError(QttfError, RuntimeError):
    """Monte-Carlo sampling rejected more than half of the drawn states."""


class SearchTimeoutError(QttfError, RuntimeError):
    """Random search exhausted its attempt budget without finding a pair."""


class ConvergenceWarning(RuntimeWarning):
    """Series scale factor is at or beyond the guaranteed convergence radius."""


class HeavyTailWarning(RuntimeWarning):
    """Monte-Carlo sample distribution is heavy tailed; more samples advised."""
