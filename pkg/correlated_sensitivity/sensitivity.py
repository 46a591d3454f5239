"""
Variance-based and derivative-based sensitivity indices.

Indices are read off the surrogate coefficients (orthonormal basis). With
correlated inputs the analysis is repeated once per circular permutation: the
parameter in first position gets its Full index, the one in last position its
Independent index and the ones in between Marginal indices. Every record is
keyed by the original parameter id, so the sweeps merge into one report.

The Monte-Carlo reference (qmc_sobol) uses the Saltelli first-order and
Jansen total-order estimators on the same permuted transforms, so both routes
estimate the same quantities.
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from correlated_sensitivity.dist import JointGaussian, to_physical
from correlated_sensitivity.errors import DomainError, ZeroVariance
from correlated_sensitivity.models import ModelSpec, evaluate_model
from correlated_sensitivity.orthopoly import build_basis
from correlated_sensitivity.sampling import (
    SampleMatrix,
    Space,
    hammersley,
    saltelli_matrices,
    to_standard_normal,
)
from correlated_sensitivity.surrogate import (
    DEFAULT_LAMBDA,
    Surrogate,
    fit,
    partial,
)
from correlated_sensitivity.surrogate_cache import cache_key, cached_surrogate
from correlated_sensitivity.transform import (
    Permutation,
    apply_permutation,
    cholesky_transform,
    circular_family,
    identity_permutation,
    rosenblatt_forward,
)

VARIANCE_FLOOR = 1e-12
MIN_QMC_SAMPLES = 64


class Kind(enum.Enum):
    SOBOL_FIRST = "sobol_first"
    SOBOL_TOTAL = "sobol_total"
    DERIVATIVE = "derivative"


class Provenance(enum.Enum):
    UNCORRELATED = "uncorrelated"
    FULL = "full"
    MARGINAL = "marginal"
    INDEPENDENT = "independent"


class Transform(enum.Enum):
    ROSENBLATT = "rosenblatt"
    CHOLESKY = "cholesky"


class DerivativeSpace(enum.Enum):
    PHYSICAL = "physical"
    STANDARD = "standard"


@dataclass(frozen=True)
class IndexRecord:
    time_index: int
    parameter: int
    kind: Kind
    provenance: Provenance
    permutation_id: int
    value: float


@dataclass
class SensitivityReport:
    """
    Index records of one analysis plus its metadata.

    Total-order indices under correlation are reported as computed; they may
    fall below the first-order index of the same parameter.
    """

    records: list[IndexRecord]
    meta: dict
    time_grid: np.ndarray
    parameter_names: list[str]
    mean: np.ndarray | None = None
    variance: np.ndarray | None = None

    def series(
        self, kind: Kind, provenance: Provenance, parameter: int
    ) -> dict[int, float]:
        """Values by time index for one (kind, provenance, parameter)."""
        return {
            r.time_index: r.value
            for r in self.records
            if r.kind is kind
            and r.provenance is provenance
            and r.parameter == parameter
        }


@dataclass(frozen=True)
class AnalysisSettings:
    """
    Fit and reporting options of an analysis.

    Attributes:
        node_multiplier: Collocation nodes per basis term.
        lam: Tikhonov parameter.
        transform: Map used to impose the correlation.
        derivative_space: Units of the derivative-based indices.
        cache_dir: Directory for cached surrogates; None disables caching.
    """

    node_multiplier: float = 2.0
    lam: float = DEFAULT_LAMBDA
    transform: Transform = Transform.ROSENBLATT
    derivative_space: DerivativeSpace = DerivativeSpace.PHYSICAL
    cache_dir: str | None = None
    extra_meta: dict = field(default_factory=dict)


def pce_mean(surrogate: Surrogate, t: int) -> float:
    return float(surrogate.coeffs[t, 0])


def pce_variance(surrogate: Surrogate, t: int) -> float:
    """Output variance Σ_{α≠0} a_α² at output t."""
    return float(np.sum(surrogate.coeffs[t, 1:] ** 2))


def has_variance(variance, mean) -> np.ndarray:
    """True where the variance is distinguishable from round-off."""
    return np.asarray(variance) > VARIANCE_FLOOR * (1.0 + np.asarray(mean) ** 2)


def _check_variance(surrogate: Surrogate, t: int) -> float:
    variance = pce_variance(surrogate, t)
    if not has_variance(variance, pce_mean(surrogate, t)):
        raise ZeroVariance(f"output {t} has zero variance; indices undefined")
    return variance


def _first_mask(surrogate: Surrogate, i: int) -> np.ndarray:
    degrees = surrogate.basis.degrees
    others = np.delete(degrees, i, axis=1)
    return (degrees[:, i] > 0) & np.all(others == 0, axis=1)


def _total_mask(surrogate: Surrogate, i: int) -> np.ndarray:
    return surrogate.basis.degrees[:, i] > 0


def sobol_first(surrogate: Surrogate, i: int, t: int) -> float:
    """Share of the variance from terms in z_i alone."""
    variance = _check_variance(surrogate, t)
    coeffs = surrogate.coeffs[t, _first_mask(surrogate, i)]
    return float(np.sum(coeffs**2) / variance)


def sobol_total(surrogate: Surrogate, i: int, t: int) -> float:
    """Share of the variance from every term involving z_i."""
    variance = _check_variance(surrogate, t)
    coeffs = surrogate.coeffs[t, _total_mask(surrogate, i)]
    return float(np.sum(coeffs**2) / variance)


def derivative_index(
    surrogate: Surrogate, i: int, z0=None, scale: float = 1.0
) -> np.ndarray:
    """
    ∂Û/∂z_i at z0 (default: the parameter means), for every output.

    scale = 1/σ_i reports the derivative in physical units.
    """
    if z0 is None:
        z0 = np.zeros(surrogate.basis.dim)
    return partial(surrogate, i, z0, scale=scale)


def node_count(basis_size: int, multiplier: float) -> int:
    return math.ceil(multiplier * basis_size)


def position_provenance(position: int, dim: int) -> Provenance:
    if position == 0:
        return Provenance.FULL
    if position == dim - 1:
        return Provenance.INDEPENDENT
    return Provenance.MARGINAL


def _correlate(
    samples: SampleMatrix,
    joint: JointGaussian,
    perm: Permutation,
    settings: AnalysisSettings,
) -> SampleMatrix:
    if settings.transform is Transform.CHOLESKY:
        permuted = apply_permutation(joint, perm)
        return cholesky_transform(samples, permuted.correlation)
    return rosenblatt_forward(samples, joint, perm)


def model_outputs(
    model: ModelSpec,
    joint: JointGaussian,
    samples: SampleMatrix,
    perm: Permutation,
    settings: AnalysisSettings,
    correlated: bool,
) -> np.ndarray:
    """
    Evaluate the model at independent samples given in permuted order.

    With correlation the samples are first pushed through the transform;
    columns are then restored to the original parameter order and mapped to
    physical units.
    """
    if correlated:
        samples = _correlate(samples, joint, perm, settings)
    z = perm.restore_columns(samples.values)
    return evaluate_model(model, to_physical(joint, z), joint.names)


def _fit_inputs(model, joint, perm, order, count, settings, correlated):
    return {
        "model": model.to_dict(),
        "means": joint.means.tolist(),
        "stds": joint.stds.tolist(),
        "correlation": (
            joint.correlation.entries.tolist() if correlated else None
        ),
        "permutation": list(perm.order),
        "order": order,
        "nodes": count,
        "lambda": settings.lam,
        "transform": settings.transform.value if correlated else None,
    }


def fit_permutation(
    model: ModelSpec,
    joint: JointGaussian,
    perm: Permutation,
    order: int,
    settings: AnalysisSettings,
    correlated: bool = True,
) -> Surrogate:
    """
    Fit the surrogate of one permutation.

    The nodes are Hammersley points mapped to independent standard normals;
    the model sees them after the permuted transform, the fit sees them
    untransformed. Without correlation the transform is skipped.
    """
    basis = build_basis(joint.dim, order)
    count = node_count(len(basis), settings.node_multiplier)

    def fit_surrogate() -> Surrogate:
        nodes = to_standard_normal(hammersley(count, joint.dim))
        outputs = model_outputs(
            model, joint, nodes, perm, settings, correlated
        )
        logging.info(
            "Permutation %s: %d model evaluations", perm.order, nodes.n
        )
        return fit(basis, nodes, outputs, settings.lam)

    if settings.cache_dir is None:
        return fit_surrogate()
    key = cache_key(
        _fit_inputs(model, joint, perm, order, count, settings, correlated)
    )
    return cached_surrogate(settings.cache_dir, key, fit_surrogate)


def surrogate_records(
    surrogate: Surrogate,
    joint: JointGaussian,
    perm: Permutation,
    settings: AnalysisSettings,
    correlated: bool,
) -> list[IndexRecord]:
    """
    Records of every position of one permutation.

    Sobol records are skipped at zero-variance outputs; derivative records
    are always emitted.
    """
    records = []
    undefined = {
        t
        for t in range(surrogate.output_count)
        if not has_variance(pce_variance(surrogate, t), pce_mean(surrogate, t))
    }
    if undefined:
        logging.warning(
            "Sobol indices undefined at %d zero-variance outputs",
            len(undefined),
        )
    for position, parameter in enumerate(perm.order):
        provenance = (
            position_provenance(position, joint.dim)
            if correlated
            else Provenance.UNCORRELATED
        )
        scale = (
            1.0 / joint.marginals[parameter].std
            if settings.derivative_space is DerivativeSpace.PHYSICAL
            else 1.0
        )
        derivatives = derivative_index(surrogate, position, scale=scale)
        for t in range(surrogate.output_count):
            if t not in undefined:
                for kind, index in (
                    (Kind.SOBOL_FIRST, sobol_first),
                    (Kind.SOBOL_TOTAL, sobol_total),
                ):
                    records.append(
                        IndexRecord(
                            time_index=t,
                            parameter=parameter,
                            kind=kind,
                            provenance=provenance,
                            permutation_id=perm.id,
                            value=index(surrogate, position, t),
                        )
                    )
            records.append(
                IndexRecord(
                    time_index=t,
                    parameter=parameter,
                    kind=Kind.DERIVATIVE,
                    provenance=provenance,
                    permutation_id=perm.id,
                    value=float(derivatives[t]),
                )
            )
    return records


def _meta(model, joint, order, settings) -> dict:
    basis_size = math.comb(joint.dim + order, order)
    return {
        "model": model.name,
        "order": order,
        "node_count": node_count(basis_size, settings.node_multiplier),
        "lambda": settings.lam,
        "correlation": joint.correlation.entries.tolist(),
        "transform": settings.transform.value,
        "derivative_space": settings.derivative_space.value,
        "seed": None,
        **settings.extra_meta,
    }


def _new_report(model, joint, meta, surrogate) -> SensitivityReport:
    return SensitivityReport(
        records=[],
        meta=meta,
        time_grid=model.time_grid,
        parameter_names=joint.names,
        mean=surrogate.coeffs[:, 0].copy(),
        variance=np.sum(surrogate.coeffs[:, 1:] ** 2, axis=1),
    )


def uncorrelated_analysis(
    model: ModelSpec,
    joint: JointGaussian,
    order: int,
    settings: AnalysisSettings = AnalysisSettings(),
) -> SensitivityReport:
    """Indices with the correlation ignored (independent inputs)."""
    perm = identity_permutation(joint.dim)
    surrogate = fit_permutation(
        model, joint, perm, order, settings, correlated=False
    )
    report = _new_report(
        model, joint, _meta(model, joint, order, settings), surrogate
    )
    report.records = surrogate_records(
        surrogate, joint, perm, settings, correlated=False
    )
    return report


def correlated_sweep(
    model: ModelSpec,
    joint: JointGaussian,
    order: int,
    settings: AnalysisSettings = AnalysisSettings(),
) -> SensitivityReport:
    """
    Full, Marginal and Independent indices from the D circular permutations.

    Any failed model evaluation aborts the whole sweep.
    """
    report = None
    for perm in circular_family(joint.dim):
        surrogate = fit_permutation(model, joint, perm, order, settings)
        if report is None:
            report = _new_report(
                model, joint, _meta(model, joint, order, settings), surrogate
            )
        report.records.extend(
            surrogate_records(surrogate, joint, perm, settings, True)
        )
    return report


def analyse(
    model: ModelSpec,
    joint: JointGaussian,
    order: int,
    settings: AnalysisSettings = AnalysisSettings(),
    baseline: bool = True,
) -> SensitivityReport:
    """
    Run the analysis a campaign asks for.

    Identity correlation gives the uncorrelated analysis only; otherwise the
    permutation sweep, followed by the uncorrelated baseline when requested.
    """
    if joint.correlation.is_identity():
        return uncorrelated_analysis(model, joint, order, settings)
    report = correlated_sweep(model, joint, order, settings)
    if baseline:
        report.records.extend(
            uncorrelated_analysis(model, joint, order, settings).records
        )
    return report


def saltelli_indices(
    y_a: np.ndarray, y_b: np.ndarray, y_mixed: list[np.ndarray]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    First and total indices from Saltelli sample outputs.

    Outputs are centred on the pooled A/B mean. First order:
    mean(Y_B·(Y_ABi - Y_A)); total: mean((Y_A - Y_ABi)²)/2; both over the
    pooled A/B variance.

    Returns:
        (first, total, defined): first and total are D×T, defined is a
        length-T mask of outputs with non-zero variance.
    """
    pooled = np.vstack([y_a, y_b])
    centre = pooled.mean(axis=0)
    variance = pooled.var(axis=0)
    defined = has_variance(variance, centre)
    safe = np.where(defined, variance, 1.0)
    y_a, y_b = y_a - centre, y_b - centre
    first, total = [], []
    for y_ab in y_mixed:
        y_ab = y_ab - centre
        first.append(np.mean(y_b * (y_ab - y_a), axis=0) / safe)
        total.append(0.5 * np.mean((y_a - y_ab) ** 2, axis=0) / safe)
    return np.array(first), np.array(total), defined


def qmc_sobol(
    model: ModelSpec,
    joint: JointGaussian,
    n: int,
    seed: int,
    settings: AnalysisSettings = AnalysisSettings(),
) -> SensitivityReport:
    """
    Monte-Carlo reference for the first and total Sobol indices.

    Uses n·(D+2) model evaluations per permutation. With correlation every
    matrix goes through the same permuted transform as correlated_sweep.

    Raises:
        DomainError: If n is below 64.
    """
    if n < MIN_QMC_SAMPLES:
        raise DomainError(
            f"Monte-Carlo base count must be >= {MIN_QMC_SAMPLES}, got {n}"
        )
    correlated = not joint.correlation.is_identity()
    perms = (
        circular_family(joint.dim)
        if correlated
        else [identity_permutation(joint.dim)]
    )
    records = []
    for perm in perms:
        a, b, mixed = saltelli_matrices(n, joint.dim, seed)
        stacked = SampleMatrix(
            np.vstack([a.values, b.values] + [m.values for m in mixed]),
            Space.STANDARD_NORMAL,
        )
        logging.info(
            "Permutation %s: %d Monte-Carlo evaluations", perm.order, stacked.n
        )
        outputs = model_outputs(
            model, joint, stacked, perm, settings, correlated
        )
        blocks = np.split(outputs, joint.dim + 2)
        first, total, defined = saltelli_indices(
            blocks[0], blocks[1], blocks[2:]
        )
        for position, parameter in enumerate(perm.order):
            provenance = (
                position_provenance(position, joint.dim)
                if correlated
                else Provenance.UNCORRELATED
            )
            for kind, values in (
                (Kind.SOBOL_FIRST, first[position]),
                (Kind.SOBOL_TOTAL, total[position]),
            ):
                records.extend(
                    IndexRecord(
                        time_index=int(t),
                        parameter=parameter,
                        kind=kind,
                        provenance=provenance,
                        permutation_id=perm.id,
                        value=float(values[t]),
                    )
                    for t in np.flatnonzero(defined)
                )
    meta = {
        "model": model.name,
        "method": "saltelli",
        "samples": n,
        "evaluations": n * (joint.dim + 2) * len(perms),
        "correlation": joint.correlation.entries.tolist(),
        "transform": settings.transform.value,
        "seed": seed,
    }
    return SensitivityReport(
        records=records,
        meta=meta,
        time_grid=model.time_grid,
        parameter_names=joint.names,
    )
