"""
Collocation nodes and Monte-Carlo sample matrices.

Hammersley points give the deterministic collocation nodes for the surrogate
fit; the Saltelli matrices drive the Monte-Carlo reference estimator.
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np

from correlated_sensitivity.dist import std_normal_quantile
from correlated_sensitivity.errors import (
    DimensionMismatch,
    DimensionTooLarge,
    WrongSpace,
)

PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
)
MAX_DIMENSION = len(PRIMES) + 1
UNIT_CLAMP = 1e-12


class Space(enum.Enum):
    UNIT_CUBE = "unit_cube"
    STANDARD_NORMAL = "standard_normal"
    CORRELATED_NORMAL = "correlated_normal"
    PHYSICAL = "physical"


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """n×d sample values tagged with the space they live in."""

    values: np.ndarray
    space: Space

    def __post_init__(self):
        if self.values.ndim != 2 or min(self.values.shape) < 1:
            raise DimensionMismatch(
                f"sample matrix must be n×d with n, d >= 1, "
                f"got shape {self.values.shape}"
            )
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of non-negative integers in a base."""
    remaining = np.array(indices, dtype=np.int64)
    result = np.zeros(remaining.shape, dtype=float)
    scale = 1.0 / base
    while np.any(remaining > 0):
        remaining, digit = np.divmod(remaining, base)
        result += digit * scale
        scale /= base
    return result


def hammersley(n: int, d: int) -> SampleMatrix:
    """
    Hammersley point set in the unit cube.

    Row i (1-based) is ((i - 0.5)/n, φ_2(i), φ_3(i), ...) with φ_b the
    radical inverse in base b over the first d-1 primes. Coordinates are
    clamped to [1e-12, 1 - 1e-12] so the normal quantile stays finite.

    Args:
        n (int): Number of points, at least 1.
        d (int): Dimension, 1..20.

    Returns:
        SampleMatrix: n×d points in the unit cube.

    Raises:
        DimensionTooLarge: If d exceeds the prime table.
    """
    if n < 1 or d < 1:
        raise DimensionMismatch(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if d > MAX_DIMENSION:
        raise DimensionTooLarge(
            f"Hammersley dimension {d} exceeds the maximum {MAX_DIMENSION}"
        )
    indices = np.arange(1, n + 1)
    columns = [(indices - 0.5) / n]
    columns += [radical_inverse(indices, base) for base in PRIMES[: d - 1]]
    values = np.clip(np.column_stack(columns), UNIT_CLAMP, 1.0 - UNIT_CLAMP)
    return SampleMatrix(values=values, space=Space.UNIT_CUBE)


def to_standard_normal(samples: SampleMatrix) -> SampleMatrix:
    """Map unit-cube samples to standard-normal space through Φ⁻¹."""
    if samples.space is not Space.UNIT_CUBE:
        raise WrongSpace(
            f"expected unit_cube samples, got {samples.space.value}"
        )
    return SampleMatrix(
        values=std_normal_quantile(samples.values),
        space=Space.STANDARD_NORMAL,
    )


def random_generator(seed: int) -> np.random.Generator:
    """Seeded generator over the counter-based Philox bit generator."""
    return np.random.Generator(np.random.Philox(seed))


def saltelli_matrices(
    n: int, d: int, seed: int
) -> tuple[SampleMatrix, SampleMatrix, list[SampleMatrix]]:
    """
    Paired sample matrices for the Saltelli first/total index estimators.

    A and B are independent n×d standard-normal matrices; AB_i is A with
    column i taken from B. First and total indices then need n·(d+2) model
    evaluations.

    Args:
        n (int): Base sample count (powers of two recommended), at least 2.
        d (int): Number of parameters.
        seed (int): Generator seed; equal seeds give identical matrices.

    Returns:
        tuple: (A, B, [AB_1, ..., AB_d]).
    """
    if n < 2 or d < 1:
        raise DimensionMismatch(f"need n >= 2 and d >= 1, got n={n}, d={d}")
    if n & (n - 1):
        logging.warning("Saltelli base count %d is not a power of two", n)
    draws = random_generator(seed).standard_normal((n, 2 * d))
    a_values, b_values = draws[:, :d], draws[:, d:]
    mixed = []
    for i in range(d):
        ab_values = a_values.copy()
        ab_values[:, i] = b_values[:, i]
        mixed.append(SampleMatrix(ab_values, Space.STANDARD_NORMAL))
    return (
        SampleMatrix(a_values.copy(), Space.STANDARD_NORMAL),
        SampleMatrix(b_values.copy(), Space.STANDARD_NORMAL),
        mixed,
    )
