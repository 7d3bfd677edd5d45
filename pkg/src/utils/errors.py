"""Custom exception hierarchy for sphcov.

Every sphcov-specific error derives from `SphCovError`. Keeping the models in
their own module (separate from `error_handling.py`'s context managers) lets
numerical code raise them without pulling in the handling machinery.
"""

from src.utils.types import ErrorContext, MutableErrorContext


class SphCovError(Exception):
    """Base exception for all sphcov errors."""

    def __init__(self, message: str, context: ErrorContext | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.context: MutableErrorContext = dict(context or {})

    def __str__(self) -> str:
        if not self.context:
            return self.message
        context_str = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} (context: {context_str})"


class DimensionMismatchError(SphCovError):
    """Raised when array shapes disagree."""
    pass


class NotPositiveDefiniteError(SphCovError):
    """Raised when a Cholesky factorization fails."""
    pass


class NotUnitDiagonalError(SphCovError):
    """Raised when a correlation matrix has a diagonal entry away from 1."""
    pass


class ZeroDiagonalError(SphCovError):
    """Raised when a triangular factor has a zero diagonal entry."""
    pass


class LogOfZeroError(SphCovError):
    """Raised when a log-density needs log|x| at x = 0."""
    pass


class DivByZeroError(SphCovError):
    """Raised when a gradient divides by a zero coordinate."""
    pass


class NonPositiveAlphaError(SphCovError):
    """Raised when a squared-Dirichlet concentration is not positive."""
    pass


class RowNotUnitNormError(SphCovError):
    """Raised when a row expected on the unit sphere is off it."""
    pass


class NonPositiveGammaError(SphCovError):
    """Raised when a GP scale is not positive."""
    pass


class NonFiniteGradientError(SphCovError):
    """Raised when a target returns a non-finite value or gradient."""
    pass


class MaxStepoutExceededError(SphCovError):
    """Raised when slice stepping-out never leaves the slice."""
    pass


class TooFewSamplesError(SphCovError):
    """Raised when a summary is requested from too few retained samples."""
    pass


class RaggedDataError(SphCovError):
    """Raised when trial data does not fill a complete M x N x D tensor."""
    pass


class InvalidConfigError(SphCovError):
    """Raised when an experiment configuration fails validation."""
    pass


class ChainDivergedError(SphCovError):
    """Raised when a chain's acceptance collapses."""
    pass


class DirectoryCreationError(SphCovError):
    """Raised when directory creation fails."""
    pass


class FileOperationError(SphCovError):
    """Raised when reading or writing a file fails."""
    pass
