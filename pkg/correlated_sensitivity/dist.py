"""
Gaussian marginals, correlation matrices and the joint input distribution.

All analysis happens in standard-normal space; physical units only enter
through to_physical when a model is evaluated.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack
from scipy.special import ndtr, ndtri

from correlated_sensitivity.errors import (
    DimensionMismatch,
    DomainError,
    NotPositiveDefinite,
)

SYMMETRY_TOLERANCE = 1e-12


def _frozen(array) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Marginal:
    """Normal marginal N(mean, std) of one parameter, in model units."""

    mean: float
    std: float
    name: str = ""

    def __post_init__(self):
        if not self.std > 0:
            raise DomainError(f"standard deviation must be > 0, got {self.std}")


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Correlation matrix C together with its lower Cholesky factor L."""

    entries: np.ndarray
    chol: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.entries, np.eye(self.dim)))


@dataclass(frozen=True, eq=False)
class JointGaussian:
    """Joint normal input model: marginals plus their correlation."""

    marginals: tuple[Marginal, ...]
    correlation: CorrelationMatrix

    @property
    def dim(self) -> int:
        return len(self.marginals)

    @property
    def means(self) -> np.ndarray:
        return np.array([m.mean for m in self.marginals])

    @property
    def stds(self) -> np.ndarray:
        return np.array([m.std for m in self.marginals])

    @property
    def names(self) -> list[str]:
        return [m.name or f"q{i + 1}" for i, m in enumerate(self.marginals)]

    def covariance(self) -> np.ndarray:
        """Covariance diag(std)·C·diag(std); derived, never an input."""
        scale = np.diag(self.stds)
        return scale @ self.correlation.entries @ scale


def std_normal_cdf(x):
    """
    Standard normal cumulative distribution function.

    Args:
        x: Scalar or array of finite reals.

    Returns:
        Values of Φ(x) in (0, 1), same shape as x.
    """
    return ndtr(x)


def std_normal_quantile(p):
    """
    Inverse of std_normal_cdf.

    Args:
        p: Scalar or array of probabilities strictly inside (0, 1).

    Returns:
        Φ⁻¹(p), same shape as p.

    Raises:
        DomainError: If any p is outside the open unit interval.
    """
    values = np.asarray(p, dtype=float)
    if np.any(~(values > 0.0)) or np.any(~(values < 1.0)):
        raise DomainError("quantile argument must lie strictly in (0, 1)")
    return ndtri(p)


def make_correlation(entries) -> CorrelationMatrix:
    """
    Validate a correlation matrix and compute its Cholesky factor.

    Args:
        entries: D×D nested sequence or array.

    Returns:
        CorrelationMatrix with L·Lᵀ = C.

    Raises:
        DimensionMismatch: If the matrix is not square.
        DomainError: If it is not symmetric with unit diagonal and
            off-diagonal entries in [-1, 1].
        NotPositiveDefinite: If the factorisation fails, with the pivot.
    """
    matrix = np.array(entries, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(
            f"correlation matrix must be square, got shape {matrix.shape}"
        )
    if matrix.shape[0] < 1:
        raise DimensionMismatch("correlation matrix must be at least 1×1")
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
        raise DomainError("correlation matrix must be symmetric")
    if not np.allclose(np.diag(matrix), 1.0, rtol=0.0, atol=SYMMETRY_TOLERANCE):
        raise DomainError("correlation matrix must have a unit diagonal")
    if np.any(np.abs(matrix) > 1.0):
        raise DomainError("correlations must lie in [-1, 1]")

    chol, info = lapack.dpotrf(matrix, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefinite(int(info))
    return CorrelationMatrix(entries=_frozen(matrix), chol=_frozen(chol))


def make_joint(marginals, correlation_entries) -> JointGaussian:
    """
    Build the joint Gaussian input model.

    Args:
        marginals: Sequence of Marginal, one per parameter.
        correlation_entries: D×D correlation matrix.

    Returns:
        JointGaussian with the Cholesky factor of the correlation computed.

    Raises:
        DimensionMismatch: If the marginal count differs from the matrix size.
        NotPositiveDefinite: See make_correlation.
    """
    correlation = make_correlation(correlation_entries)
    marginals = tuple(marginals)
    if len(marginals) != correlation.dim:
        raise DimensionMismatch(
            f"{len(marginals)} marginals for a "
            f"{correlation.dim}×{correlation.dim} correlation matrix"
        )
    return JointGaussian(marginals=marginals, correlation=correlation)


def to_physical(joint: JointGaussian, z) -> np.ndarray:
    """
    Map standard-normal coordinates to model units, q = μ + σ·z.

    Accepts a single vector of length D or an n×D matrix.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != joint.dim:
        raise DimensionMismatch(
            f"expected {joint.dim} coordinates, got {z.shape[-1]}"
        )
    return joint.means + joint.stds * z


def to_standard(joint: JointGaussian, q) -> np.ndarray:
    """Inverse of to_physical, z = (q - μ)/σ."""
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != joint.dim:
        raise DimensionMismatch(
            f"expected {joint.dim} coordinates, got {q.shape[-1]}"
        )
    return (q - joint.means) / joint.stds
