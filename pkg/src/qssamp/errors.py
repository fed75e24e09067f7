"""Exception hierarchy shared by every module of the package."""


class QSSampError(Exception):
    """Base class for all package errors."""


class ValidationError(QSSampError, ValueError):
    """An input violates a structural invariant."""


class RowSumError(ValidationError):
    pass


class NegativeEntryError(ValidationError):
    pass


class NotErgodicError(ValidationError):
    """Raised for chains that are reducible and/or periodic.

    ``irreducible`` and ``aperiodic`` record which check failed.
    """

    def __init__(self, message, *, irreducible=True, aperiodic=True):
        super().__init__(message)
        self.irreducible = irreducible
        self.aperiodic = aperiodic


class NotReversibleError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class RangeError(ValidationError):
    pass


class BadParamsError(ValidationError):
    pass


class BadSizeError(ValidationError):
    pass


class NotNormalizedError(ValidationError):
    pass


class ZeroStationaryEntryError(ValidationError):
    pass


class NoValidJError(ValidationError):
    """No state has stationary mass below 1/2, so s* is not in (0, 1)."""


class NonPositiveGapError(ValidationError):
    pass


class DivergenceError(QSSampError, ArithmeticError):
    pass


class ConvergenceError(QSSampError, RuntimeError):
    pass


class IterationCapError(ConvergenceError):
    pass


class EigensolverError(QSSampError, RuntimeError):
    pass


class SingularSystemError(QSSampError, RuntimeError):
    pass


class DegenerateTopEigenvalueError(QSSampError, RuntimeError):
    pass


class ZeroProbabilityError(QSSampError, RuntimeError):
    """Post-selection has (numerically) zero chance of success."""
