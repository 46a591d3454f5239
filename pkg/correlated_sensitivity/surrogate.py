"""
Polynomial chaos surrogate fitted by Tikhonov-regularised least squares.

The regularised problem min ‖Φa - Y‖² + λ‖a‖² is solved as the stacked
ordinary least-squares problem [Φ; √λ·I]·a ≈ [Y; 0], which has the same
solution as the normal equations (ΦᵀΦ + λI)a = ΦᵀY. All output columns
(time steps) share one design matrix.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from correlated_sensitivity.errors import (
    DimensionMismatch,
    DomainError,
    NonFiniteOutput,
    Underdetermined,
)
from correlated_sensitivity.orthopoly import (
    MultiIndex,
    MultiIndexBasis,
    build_basis,
    design_matrix,
    partial_design_matrix,
)
from correlated_sensitivity.sampling import SampleMatrix

DEFAULT_LAMBDA = 1e-8


@dataclass(frozen=True, eq=False)
class Surrogate:
    """PCE surrogate; coeffs has one row per output, one column per term."""

    basis: MultiIndexBasis
    coeffs: np.ndarray
    lam: float
    node_count: int
    residual_rms: np.ndarray

    @property
    def output_count(self) -> int:
        return self.coeffs.shape[0]

    def to_dict(self) -> dict:
        """JSON-ready document {dim, order, term_list, lambda, coeffs}."""
        return {
            "dim": self.basis.dim,
            "order": self.basis.order,
            "term_list": [list(term.degrees) for term in self.basis.terms],
            "lambda": self.lam,
            "node_count": self.node_count,
            "residual_rms": self.residual_rms.tolist(),
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, document: dict) -> "Surrogate":
        """
        Rebuild a surrogate written by to_dict.

        Raises:
            DimensionMismatch: If the stored term list is not the basis of
                the stored dimension and order.
        """
        basis = build_basis(document["dim"], document["order"])
        stored = tuple(MultiIndex(tuple(t)) for t in document["term_list"])
        if stored != basis.terms:
            raise DimensionMismatch("stored term list does not match basis")
        coeffs = np.array(document["coeffs"], dtype=float)
        residual_rms = np.array(
            document.get("residual_rms", np.zeros(coeffs.shape[0])),
            dtype=float,
        )
        return cls(
            basis=basis,
            coeffs=coeffs,
            lam=float(document["lambda"]),
            node_count=int(document.get("node_count", 0)),
            residual_rms=residual_rms,
        )


def fit(
    basis: MultiIndexBasis,
    nodes: SampleMatrix,
    outputs,
    lam: float = DEFAULT_LAMBDA,
) -> Surrogate:
    """
    Fit the expansion coefficients at the collocation nodes.

    In the correlated workflow the nodes are the independent samples while the
    outputs come from the model evaluated at the transformed samples.

    Args:
        basis: Tensor basis of the expansion.
        nodes: n×D independent standard-normal collocation nodes.
        outputs: n×T model outputs (or a length-n vector, T = 1).
        lam: Tikhonov parameter λ >= 0.

    Returns:
        Surrogate: Fitted surrogate with per-output residual RMS.

    Raises:
        Underdetermined: If n < N and λ = 0.
        NonFiniteOutput: If any output is NaN or Inf.
        DimensionMismatch: If the row counts disagree.
        DomainError: If lam is negative.
    """
    values = np.asarray(outputs, dtype=float)
    if values.ndim == 1:
        values = values[:, np.newaxis]
    if values.shape[0] != nodes.n:
        raise DimensionMismatch(
            f"{values.shape[0]} output rows for {nodes.n} nodes"
        )
    if not np.all(np.isfinite(values)):
        raise NonFiniteOutput("model produced non-finite outputs")
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    if nodes.n < len(basis) and lam == 0:
        raise Underdetermined(
            f"{nodes.n} nodes for {len(basis)} basis terms without "
            "regularisation"
        )

    phi = design_matrix(basis, nodes.values)
    if lam > 0:
        stacked = np.vstack([phi, np.sqrt(lam) * np.eye(len(basis))])
        rhs = np.vstack([values, np.zeros((len(basis), values.shape[1]))])
    else:
        stacked, rhs = phi, values
    solution, _, rank, _ = linalg.lstsq(stacked, rhs)
    if rank < len(basis):
        logging.warning(
            "Design matrix rank %d below basis size %d", rank, len(basis)
        )
    residual = phi @ solution - values
    residual_rms = np.sqrt(np.mean(residual**2, axis=0))
    logging.info(
        "Fitted order %d surrogate on %d nodes, %d outputs",
        basis.order,
        nodes.n,
        values.shape[1],
    )
    return Surrogate(
        basis=basis,
        coeffs=solution.T.copy(),
        lam=lam,
        node_count=nodes.n,
        residual_rms=residual_rms,
    )


def evaluate(surrogate: Surrogate, z) -> np.ndarray:
    """
    Surrogate outputs at standard-normal point(s).

    Returns a length-T vector for a single point, or n×T for n points.
    """
    z = np.asarray(z, dtype=float)
    values = design_matrix(surrogate.basis, z) @ surrogate.coeffs.T
    return values[0] if z.ndim == 1 else values


def partial(surrogate: Surrogate, i: int, z, scale: float = 1.0) -> np.ndarray:
    """
    Partial derivative of the surrogate with respect to z_i.

    The derivative is in standard-normal coordinates; pass scale = 1/σ_i to
    convert it to physical units through q_i = μ_i + σ_i·z_i.
    """
    z = np.asarray(z, dtype=float)
    values = partial_design_matrix(surrogate.basis, z, i) @ surrogate.coeffs.T
    values = values * scale
    return values[0] if z.ndim == 1 else values
