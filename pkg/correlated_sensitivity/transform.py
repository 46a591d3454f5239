"""
Maps from independent to correlated standard-normal samples.

Both transforms work on sample matrices whose columns are in permuted order:
column j holds parameter perm.order[j]. The Cholesky map multiplies each row
by Lᵀ on the right, which is q* = L·q for column vectors. The Rosenblatt map
draws each component from its Gaussian conditional given the earlier ones.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from correlated_sensitivity.dist import (
    CorrelationMatrix,
    JointGaussian,
    make_correlation,
)
from correlated_sensitivity.errors import (
    DimensionMismatch,
    InvalidPermutation,
    NotPositiveDefinite,
    WrongSpace,
)
from correlated_sensitivity.sampling import SampleMatrix, Space

ACCEPTED_SPACES = (Space.STANDARD_NORMAL,)


@dataclass(frozen=True)
class Permutation:
    """Parameter ordering; position j holds original parameter order[j]."""

    order: tuple[int, ...]
    id: int = 1

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise InvalidPermutation(
                f"{self.order} is not a permutation of 0..{len(self.order) - 1}"
            )

    @property
    def dim(self) -> int:
        return len(self.order)

    def inverse(self) -> "Permutation":
        inverse = [0] * self.dim
        for position, parameter in enumerate(self.order):
            inverse[parameter] = position
        return Permutation(order=tuple(inverse), id=self.id)

    def restore_columns(self, values: np.ndarray) -> np.ndarray:
        """Put permuted columns back into original parameter order."""
        restored = np.empty_like(values)
        restored[:, list(self.order)] = values
        return restored


def identity_permutation(dim: int) -> Permutation:
    return Permutation(order=tuple(range(dim)), id=1)


def circular_family(dim: int) -> list[Permutation]:
    """
    The D circular shifts of the parameter vector.

    Permutation k (1-based) starts at parameter k: (k, ..., D, 1, ..., k-1).
    Running the analysis once per shift places every parameter first once
    (its Full index) and last once (its Independent index).
    """
    if dim < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {dim}")
    return [
        Permutation(
            order=tuple((shift + j) % dim for j in range(dim)), id=shift + 1
        )
        for shift in range(dim)
    ]


def apply_permutation(joint: JointGaussian, perm: Permutation) -> JointGaussian:
    """Reorder marginals and correlation rows/columns by the permutation."""
    if perm.dim != joint.dim:
        raise InvalidPermutation(
            f"permutation of length {perm.dim} for {joint.dim} parameters"
        )
    order = list(perm.order)
    entries = joint.correlation.entries[np.ix_(order, order)]
    return JointGaussian(
        marginals=tuple(joint.marginals[i] for i in order),
        correlation=make_correlation(entries),
    )


def _check(samples: SampleMatrix, dim: int) -> None:
    if samples.space not in ACCEPTED_SPACES:
        raise WrongSpace(
            f"expected independent standard-normal samples, "
            f"got {samples.space.value}"
        )
    if samples.d != dim:
        raise DimensionMismatch(
            f"sample matrix has {samples.d} columns, expected {dim}"
        )


def cholesky_transform(
    samples: SampleMatrix, corr: CorrelationMatrix
) -> SampleMatrix:
    """
    Impose the correlation corr on independent standard normals.

    Args:
        samples: n×D independent standard-normal samples.
        corr: Target correlation (already permuted, if a permutation is used).

    Returns:
        SampleMatrix: Rows q·Lᵀ, i.e. L·q for each sample.
    """
    _check(samples, corr.dim)
    return SampleMatrix(
        values=samples.values @ corr.chol.T, space=Space.CORRELATED_NORMAL
    )


def conditional_weights(
    entries: np.ndarray,
) -> tuple[list[np.ndarray], np.ndarray]:
    """
    Regression weights and conditional deviations of a Gaussian ordering.

    For component i given components 0..i-1 of a unit-variance normal vector
    with correlation `entries`, the conditional mean is w_i·x_{<i} and the
    conditional standard deviation is s_i (Schur complement).
    """
    dim = entries.shape[0]
    weights = [np.zeros(0)]
    deviations = np.ones(dim)
    for i in range(1, dim):
        leading = entries[:i, :i]
        cross = entries[:i, i]
        try:
            weight = linalg.solve(leading, cross, assume_a="pos")
        except linalg.LinAlgError as exc:
            raise NotPositiveDefinite(i) from exc
        variance = entries[i, i] - cross @ weight
        if not variance > 0.0:
            raise NotPositiveDefinite(i + 1)
        weights.append(weight)
        deviations[i] = np.sqrt(variance)
    return weights, deviations


def rosenblatt_forward(
    samples: SampleMatrix, joint: JointGaussian, perm: Permutation
) -> SampleMatrix:
    """
    Forward Rosenblatt map in the permuted parameter order.

    The first permuted component passes through unchanged; component i is
    drawn from its exact Gaussian conditional given components 0..i-1. For
    Gaussian inputs this coincides with cholesky_transform on the permuted
    correlation matrix.

    Args:
        samples: n×D independent standard normals, columns in permuted order.
        joint: Joint input model in original parameter order.
        perm: Ordering in which the conditionals are built.

    Returns:
        SampleMatrix: Correlated standard normals, columns in permuted order.
    """
    _check(samples, joint.dim)
    permuted = apply_permutation(joint, perm)
    weights, deviations = conditional_weights(permuted.correlation.entries)
    z = samples.values
    correlated = np.empty_like(z)
    correlated[:, 0] = z[:, 0]
    for i in range(1, joint.dim):
        mean = correlated[:, :i] @ weights[i]
        correlated[:, i] = mean + deviations[i] * z[:, i]
    return SampleMatrix(values=correlated, space=Space.CORRELATED_NORMAL)
