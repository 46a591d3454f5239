"""
Exceptions raised by the correlated_sensitivity package.

Runtime failures derive from SensitivityError (the CLI exits with status 1),
configuration problems raise ConfigError (the CLI exits with status 2).
"""


class SensitivityError(Exception):
    """Base class for runtime failures of an analysis."""


class ConfigError(Exception):
    """Invalid campaign configuration; the message starts with the field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class DimensionMismatch(SensitivityError):
    """Array or vector sizes do not agree."""


class DomainError(SensitivityError, ValueError):
    """Argument outside the domain of a function."""


class NotPositiveDefinite(SensitivityError):
    """Cholesky factorisation failed at a pivot (1-based)."""

    def __init__(self, pivot: int):
        super().__init__(
            f"correlation matrix is not positive definite (pivot {pivot})"
        )
        self.pivot = pivot


class DimensionTooLarge(SensitivityError):
    """Requested dimension exceeds the prime table."""


class WrongSpace(SensitivityError):
    """Sample matrix is in the wrong space for the operation."""


class InvalidPermutation(SensitivityError):
    """Permutation is not a reordering of 0..D-1."""


class IndexOutOfRange(SensitivityError):
    """Parameter index outside 0..D-1."""


class Underdetermined(SensitivityError):
    """Fewer collocation nodes than basis terms without regularisation."""


class NonFiniteOutput(SensitivityError):
    """The model produced NaN or Inf."""


class ZeroVariance(SensitivityError):
    """Sobol index requested where the output variance vanishes."""


class ModelError(SensitivityError):
    """Model evaluation failed."""


class ProcessFailed(ModelError):
    """External model exited with a non-zero status."""

    def __init__(self, returncode: int, stderr: str):
        super().__init__(
            f"model process exited with status {returncode}: {stderr.strip()}"
        )
        self.returncode = returncode
        self.stderr = stderr


class MalformedOutput(ModelError):
    """External model response could not be parsed."""


class ModelTimeout(ModelError):
    """External model exceeded its wall-clock limit."""
