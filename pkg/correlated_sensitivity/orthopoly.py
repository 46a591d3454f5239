"""
Orthonormal probabilists' Hermite polynomials and total-degree tensor bases.

ĤE_n(x) = He_n(x)/√(n!) is orthonormal under the standard normal density, so
the variance of an expansion is the sum of its squared non-constant
coefficients.
"""

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from correlated_sensitivity.errors import DimensionMismatch, IndexOutOfRange


def hermite_table(max_degree: int, x) -> np.ndarray:
    """
    Orthonormal Hermite values of degrees 0..max_degree.

    Uses He_{n+1} = x·He_n - n·He_{n-1}, normalised by √(n!).

    Returns:
        Array of shape x.shape + (max_degree + 1,).
    """
    x = np.asarray(x, dtype=float)
    table = np.empty(x.shape + (max_degree + 1,))
    table[..., 0] = 1.0
    if max_degree >= 1:
        table[..., 1] = x
    for n in range(1, max_degree):
        table[..., n + 1] = x * table[..., n] - n * table[..., n - 1]
    norms = np.sqrt([math.factorial(n) for n in range(max_degree + 1)])
    return table / norms


def hermite_derivative_table(max_degree: int, x) -> np.ndarray:
    """Derivatives ĤE'_n = √n·ĤE_{n-1} for degrees 0..max_degree."""
    values = hermite_table(max(max_degree - 1, 0), x)
    table = np.zeros(np.shape(x) + (max_degree + 1,))
    degrees = np.arange(1, max_degree + 1)
    table[..., 1:] = np.sqrt(degrees) * values[..., : max_degree]
    return table


def hermite_value(n: int, x):
    """Orthonormal probabilists' Hermite polynomial of degree n at x."""
    return hermite_table(n, x)[..., n]


def hermite_derivative(n: int, x):
    """Derivative of hermite_value(n, ·) at x."""
    return hermite_derivative_table(n, x)[..., n]


@dataclass(frozen=True)
class MultiIndex:
    degrees: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.degrees)


@dataclass(frozen=True)
class MultiIndexBasis:
    """Total-degree basis in graded lexicographic order, zero index first."""

    dim: int
    order: int
    terms: tuple[MultiIndex, ...]

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def degrees(self) -> np.ndarray:
        """N×D array of the per-term degree vectors."""
        return np.array([term.degrees for term in self.terms], dtype=int)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def build_basis(dim: int, order: int) -> MultiIndexBasis:
    """
    All multi-indices of total degree <= order, C(dim+order, order) of them.

    Within a degree, terms are sorted with the first coordinate descending,
    e.g. (2,0), (1,1), (0,2).
    """
    if dim < 1 or order < 0:
        raise DimensionMismatch(
            f"need dim >= 1 and order >= 0, got dim={dim}, order={order}"
        )
    terms = tuple(
        MultiIndex(degrees)
        for total in range(order + 1)
        for degrees in _compositions(total, dim)
    )
    return MultiIndexBasis(dim=dim, order=order, terms=terms)


def _points(basis: MultiIndexBasis, z) -> np.ndarray:
    points = np.atleast_2d(np.asarray(z, dtype=float))
    if points.shape[-1] != basis.dim:
        raise DimensionMismatch(
            f"expected {basis.dim} coordinates, got {points.shape[-1]}"
        )
    return points


def design_matrix(basis: MultiIndexBasis, z) -> np.ndarray:
    """
    n×N matrix of basis values; entry (k, j) = Π_i ĤE_{α_j,i}(z_k,i).

    Args:
        basis: The tensor basis.
        z: n×D points (or a single length-D point).
    """
    points = _points(basis, z)
    table = hermite_table(basis.order, points)
    degrees = basis.degrees
    columns = np.arange(basis.dim)
    return np.prod(table[:, columns, degrees], axis=-1)


def partial_design_matrix(basis: MultiIndexBasis, z, i: int) -> np.ndarray:
    """n×N matrix of ∂/∂z_i of the basis functions."""
    points = _points(basis, z)
    if not 0 <= i < basis.dim:
        raise IndexOutOfRange(f"parameter index {i} outside 0..{basis.dim - 1}")
    table = hermite_table(basis.order, points)
    table[:, i, :] = hermite_derivative_table(basis.order, points[:, i])
    degrees = basis.degrees
    columns = np.arange(basis.dim)
    return np.prod(table[:, columns, degrees], axis=-1)


def eval_basis_row(basis: MultiIndexBasis, z) -> np.ndarray:
    """Basis values at a single point z; the zero index always gives 1."""
    return design_matrix(basis, np.reshape(z, (1, -1)))[0]


def eval_basis_partial(basis: MultiIndexBasis, z, i: int) -> np.ndarray:
    """
    Partial derivatives of the basis with respect to z_i at a single point.

    Entry j is ĤE'_{α_j,i}(z_i)·Π_{k≠i} ĤE_{α_j,k}(z_k).
    """
    return partial_design_matrix(basis, np.reshape(z, (1, -1)), i)[0]
