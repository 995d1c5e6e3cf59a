"""Exception types shared across the package."""


class AnnulusMetricsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AnnulusMetricsError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConvergenceError(AnnulusMetricsError, RuntimeError):
    """A series or iteration could not reach the requested tolerance."""


class RangeError(AnnulusMetricsError, OverflowError):
    """A value left the representable floating-point range."""


class PoleError(AnnulusMetricsError, ZeroDivisionError):
    """Evaluation was requested inside the exclusion radius of a pole.

    The offending lattice point is carried so callers can see which pole
    was hit.
    """

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class ShapeError(AnnulusMetricsError, ValueError):
    """Jet orders or table shapes are incompatible with the operation."""


class SingularJetError(AnnulusMetricsError, ZeroDivisionError):
    """A jet operation required a nonzero leading coefficient."""


class InternalConsistencyError(AnnulusMetricsError, RuntimeError):
    """A mathematically guaranteed invariant failed.

    This signals a bug in the computation (for example a broken series
    summation), never bad user input.
    """
