"""Unit tests for correlated_sensitivity.orthopoly."""

import math

import numpy as np
import pytest
from numpy.polynomial import hermite_e

from correlated_sensitivity.errors import DimensionMismatch, IndexOutOfRange
from correlated_sensitivity.orthopoly import (
    build_basis,
    design_matrix,
    eval_basis_partial,
    eval_basis_row,
    hermite_derivative,
    hermite_table,
    hermite_value,
    partial_design_matrix,
)


def gauss_hermite(points: int):
    """Nodes and probability weights for the standard normal density."""
    nodes, weights = hermite_e.hermegauss(points)
    return nodes, weights / np.sqrt(2.0 * np.pi)


class TestHermite:
    """Tests for the univariate orthonormal Hermite polynomials."""

    def test_low_degrees(self):
        """Test the closed forms of degrees 0 to 3."""
        x = np.array([-1.5, 0.0, 0.7, 2.0])
        table = hermite_table(3, x)
        np.testing.assert_allclose(table[:, 0], 1.0)
        np.testing.assert_allclose(table[:, 1], x)
        np.testing.assert_allclose(table[:, 2], (x**2 - 1) / np.sqrt(2))
        np.testing.assert_allclose(table[:, 3], (x**3 - 3 * x) / np.sqrt(6))

    def test_orthonormal(self):
        """Test E[ĤE_m·ĤE_n] = δ_mn under the standard normal."""
        nodes, weights = gauss_hermite(20)
        table = hermite_table(8, nodes)
        gram = table.T @ (weights[:, np.newaxis] * table)
        np.testing.assert_allclose(gram, np.eye(9), atol=1e-10)

    def test_matches_numpy_hermite_e(self):
        """Test against numpy's probabilists' Hermite series."""
        x = np.linspace(-3.0, 3.0, 13)
        for n in range(7):
            coefficients = np.zeros(n + 1)
            coefficients[n] = 1.0
            expected = hermite_e.hermeval(x, coefficients)
            np.testing.assert_allclose(
                hermite_value(n, x), expected / np.sqrt(math.factorial(n))
            )

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
    def test_derivative(self, n):
        """Test ĤE'_n against a central difference."""
        x = np.linspace(-2.0, 2.0, 9)
        step = 1e-6
        numeric = (hermite_value(n, x + step) - hermite_value(n, x - step)) / (
            2 * step
        )
        np.testing.assert_allclose(hermite_derivative(n, x), numeric, atol=1e-6)


class TestBuildBasis:
    """Tests for the total-degree basis."""

    @pytest.mark.parametrize(
        "dim, order", [(1, 4), (2, 3), (2, 4), (3, 3), (4, 2)]
    )
    def test_size(self, dim, order):
        """Test N = C(D + P, P)."""
        assert len(build_basis(dim, order)) == math.comb(dim + order, order)

    def test_size_table(self):
        """Test the basis size for every D <= 6 and P <= 7."""
        for dim in range(1, 7):
            for order in range(8):
                expected = math.comb(dim + order, order)
                assert len(build_basis(dim, order)) == expected

    def test_graded_order(self):
        """Test degree-by-degree ordering, first coordinate descending."""
        basis = build_basis(2, 2)
        assert [term.degrees for term in basis.terms] == [
            (0, 0),
            (1, 0),
            (0, 1),
            (2, 0),
            (1, 1),
            (0, 2),
        ]

    def test_total_degree_bound(self):
        """Test that no term exceeds the order and all are distinct."""
        basis = build_basis(3, 4)
        assert max(term.total for term in basis.terms) == 4
        assert len(set(basis.terms)) == len(basis)

    def test_zero_order(self):
        """Test that order 0 is the constant alone."""
        basis = build_basis(3, 0)
        assert [term.degrees for term in basis.terms] == [(0, 0, 0)]

    def test_invalid(self):
        """Test that a zero dimension is rejected."""
        with pytest.raises(DimensionMismatch):
            build_basis(0, 2)


class TestDesignMatrix:
    """Tests for design_matrix and its derivative."""

    def test_product_of_univariate_values(self):
        """Test entry (k, j) = Π_i ĤE_{α_j,i}(z_k,i)."""
        basis = build_basis(2, 3)
        z = np.array([[0.3, -1.1], [1.7, 0.4]])
        phi = design_matrix(basis, z)
        assert phi.shape == (2, len(basis))
        for j, term in enumerate(basis.terms):
            expected = hermite_value(term.degrees[0], z[:, 0]) * hermite_value(
                term.degrees[1], z[:, 1]
            )
            np.testing.assert_allclose(phi[:, j], expected)

    def test_tensor_orthonormal(self):
        """Test that the tensor basis is orthonormal under N(0, I)."""
        nodes, weights = gauss_hermite(8)
        z1, z2 = np.meshgrid(nodes, nodes, indexing="ij")
        w = np.outer(weights, weights).ravel()
        phi = design_matrix(
            build_basis(2, 4), np.column_stack([z1.ravel(), z2.ravel()])
        )
        gram = phi.T @ (w[:, np.newaxis] * phi)
        np.testing.assert_allclose(gram, np.eye(phi.shape[1]), atol=1e-10)

    def test_single_point(self):
        """Test that the zero index evaluates to 1 at any point."""
        row = eval_basis_row(build_basis(3, 2), [0.5, -0.2, 2.0])
        assert row[0] == 1.0
        assert row.shape == (10,)

    def test_partial_matches_difference(self):
        """Test the partial derivative against a central difference."""
        basis = build_basis(3, 3)
        z = np.array([0.4, -0.8, 1.2])
        step = 1e-6
        for i in range(3):
            shift = np.zeros(3)
            shift[i] = step
            numeric = (
                eval_basis_row(basis, z + shift)
                - eval_basis_row(basis, z - shift)
            ) / (2 * step)
            np.testing.assert_allclose(
                eval_basis_partial(basis, z, i), numeric, atol=1e-6
            )

    def test_partial_index_out_of_range(self):
        """Test that the parameter index must exist."""
        with pytest.raises(IndexOutOfRange):
            partial_design_matrix(build_basis(2, 2), np.zeros((1, 2)), 2)

    def test_wrong_width(self):
        """Test that points must have D coordinates."""
        with pytest.raises(DimensionMismatch):
            design_matrix(build_basis(2, 2), np.zeros((3, 3)))
