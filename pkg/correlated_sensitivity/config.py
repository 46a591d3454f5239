"""
This module loads and validates the JSON campaign configuration.

Every problem is reported as a ConfigError whose message starts with the path
of the offending field, e.g. "marginals[1].std: must be > 0".
"""

import dataclasses
import json
import shlex
from dataclasses import dataclass

import numpy as np

from correlated_sensitivity.dist import JointGaussian, Marginal, make_joint
from correlated_sensitivity.errors import ConfigError, SensitivityError
from correlated_sensitivity.models import (
    DEFAULT_TIMEOUT_S,
    ModelKind,
    ModelSpec,
    coffee_cup_grid,
)
from correlated_sensitivity.sensitivity import (
    AnalysisSettings,
    DerivativeSpace,
    Transform,
)

DEFAULT_ORDER = 3
DEFAULT_QMC_SAMPLES = 2**14
DEFAULT_QMC_SEED = 2021
DEFAULT_FORMATS = ("csv", "json")
SURFACE_POINTS = 41
SURFACE_SPAN = 3.0


@dataclass(frozen=True, eq=False)
class CampaignConfig:
    """A validated campaign: model, inputs, fit options and outputs."""

    model: ModelSpec
    joint: JointGaussian
    polynomial_order: int = DEFAULT_ORDER
    node_multiplier: float = 2.0
    lam: float = 1e-8
    transform: Transform = Transform.ROSENBLATT
    derivative_space: DerivativeSpace = DerivativeSpace.PHYSICAL
    qmc_n: int = DEFAULT_QMC_SAMPLES
    qmc_seed: int = DEFAULT_QMC_SEED
    output_dir: str | None = None
    formats: tuple[str, ...] = DEFAULT_FORMATS
    baseline: bool = True
    cache_dir: str | None = None
    surface_parameters: tuple[int, int] = (0, 1)
    surface_points: int = SURFACE_POINTS
    surface_span: float = SURFACE_SPAN

    def settings(self) -> AnalysisSettings:
        return AnalysisSettings(
            node_multiplier=self.node_multiplier,
            lam=self.lam,
            transform=self.transform,
            derivative_space=self.derivative_space,
            cache_dir=self.cache_dir,
        )

    def with_correlation(self, entries) -> "CampaignConfig":
        joint = make_joint(self.joint.marginals, entries)
        return dataclasses.replace(self, joint=joint)

    def with_order(self, order: int) -> "CampaignConfig":
        return dataclasses.replace(self, polynomial_order=order)


def equicorrelation(dim: int, rho: float) -> np.ndarray:
    """D×D matrix with unit diagonal and every off-diagonal entry rho."""
    return np.full((dim, dim), rho) + (1.0 - rho) * np.eye(dim)


def _number(value, path: str, minimum=None, integer=False, strict=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"must be a number, got {value!r}")
    if integer and not float(value).is_integer():
        raise ConfigError(path, f"must be an integer, got {value!r}")
    if minimum is not None:
        if strict and not value > minimum:
            raise ConfigError(path, f"must be > {minimum}")
        if not strict and not value >= minimum:
            raise ConfigError(path, f"must be >= {minimum}")
    return int(value) if integer else float(value)


def _section(document: dict, key: str, path: str = "") -> dict:
    section = document.get(key, {})
    if not isinstance(section, dict):
        raise ConfigError(f"{path}{key}", "must be an object")
    return section


def _enum(enum_type, value, path: str):
    try:
        return enum_type(value)
    except ValueError as exc:
        choices = ", ".join(member.value for member in enum_type)
        raise ConfigError(path, f"must be one of {choices}") from exc


def _time_grid(model: dict, kind: ModelKind) -> np.ndarray:
    grid = model.get("time_grid")
    if grid is None:
        if kind is ModelKind.COFFEE_CUP:
            return coffee_cup_grid()
        if kind is ModelKind.EXTERNAL:
            raise ConfigError("model.time_grid", "field is required")
        return np.zeros(1)
    if isinstance(grid, dict):
        start = _number(grid.get("start", 0.0), "model.time_grid.start")
        stop = _number(grid.get("stop"), "model.time_grid.stop")
        steps = _number(
            grid.get("steps"), "model.time_grid.steps", 1, integer=True
        )
        if not stop > start:
            raise ConfigError("model.time_grid", "stop must exceed start")
        return np.linspace(start, stop, steps + 1)
    if not isinstance(grid, list) or not grid:
        raise ConfigError("model.time_grid", "must be a non-empty list")
    values = np.array(
        [_number(v, f"model.time_grid[{i}]") for i, v in enumerate(grid)]
    )
    if np.any(np.diff(values) <= 0):
        raise ConfigError("model.time_grid", "must be strictly increasing")
    return values


def parse_model(document: dict) -> ModelSpec:
    """Build the ModelSpec from the `model` section."""
    if "model" not in document:
        raise ConfigError("model", "field is required")
    model = _section(document, "model")
    kind = _enum(ModelKind, model.get("kind"), "model.kind")
    coefficients = model.get("coefficients")
    if coefficients is not None:
        if not isinstance(coefficients, list):
            raise ConfigError("model.coefficients", "must be a list")
        coefficients = tuple(
            _number(c, f"model.coefficients[{i}]")
            for i, c in enumerate(coefficients)
        )
    command = model.get("command", ())
    if isinstance(command, str):
        command = shlex.split(command)
    if kind is ModelKind.EXTERNAL and not command:
        raise ConfigError("model.command", "field is required")
    return ModelSpec(
        kind=kind,
        time_grid=_time_grid(model, kind),
        name=str(model.get("name", "")),
        t0=_number(model.get("t0", 95.0), "model.t0"),
        coefficients=coefficients,
        command=tuple(str(part) for part in command),
        timeout=_number(
            model.get("timeout", DEFAULT_TIMEOUT_S),
            "model.timeout",
            0,
            strict=True,
        ),
        workers=_number(model.get("workers", 1), "model.workers", 1, True),
    )


def parse_marginals(document: dict) -> list[Marginal]:
    marginals = document.get("marginals")
    if marginals is None:
        raise ConfigError("marginals", "field is required")
    if not isinstance(marginals, list) or not marginals:
        raise ConfigError("marginals", "must be a non-empty list")
    parsed = []
    for i, entry in enumerate(marginals):
        path = f"marginals[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(path, "must be an object")
        for key in ("mean", "std"):
            if key not in entry:
                raise ConfigError(f"{path}.{key}", "field is required")
        parsed.append(
            Marginal(
                mean=_number(entry["mean"], f"{path}.mean"),
                std=_number(entry["std"], f"{path}.std", 0, strict=True),
                name=str(entry.get("name", f"q{i + 1}")),
            )
        )
    return parsed


def check_model_inputs(model: ModelSpec, dim: int) -> None:
    """Check that the model accepts the configured number of parameters."""
    if model.kind is ModelKind.COFFEE_CUP and dim != 2:
        raise ConfigError(
            "marginals", f"coffee_cup takes exactly 2 parameters, got {dim}"
        )
    if model.coefficients is None:
        return
    count = len(model.coefficients)
    if model.kind is ModelKind.LINEAR and count != dim:
        raise ConfigError(
            "model.coefficients", f"needs {dim} entries, one per parameter"
        )
    if model.kind is ModelKind.PRODUCT and count != 1:
        raise ConfigError(
            "model.coefficients", "needs exactly 1 entry, the scale"
        )


def parse_correlation(document: dict, dim: int) -> np.ndarray:
    correlation = document.get("correlation", 0.0)
    if isinstance(correlation, (int, float)) and not isinstance(
        correlation, bool
    ):
        if dim == 1 and correlation != 0:
            raise ConfigError("correlation", "a single parameter has no rho")
        return equicorrelation(dim, float(correlation))
    if not isinstance(correlation, list) or len(correlation) != dim:
        raise ConfigError(
            "correlation", f"must be a number or a {dim}×{dim} matrix"
        )
    rows = []
    for i, row in enumerate(correlation):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigError(f"correlation[{i}]", f"must have {dim} entries")
        rows.append(
            [_number(v, f"correlation[{i}][{j}]") for j, v in enumerate(row)]
        )
    return np.array(rows)


def parse_config(document: dict) -> CampaignConfig:
    """
    Validate a configuration document.

    Args:
        document (dict): Parsed JSON configuration.

    Returns:
        CampaignConfig: The validated campaign.

    Raises:
        ConfigError: On the first invalid field, naming its path.
    """
    if not isinstance(document, dict):
        raise ConfigError("<root>", "must be a JSON object")
    model = parse_model(document)
    marginals = parse_marginals(document)
    check_model_inputs(model, len(marginals))
    entries = parse_correlation(document, len(marginals))
    try:
        joint = make_joint(marginals, entries)
    except SensitivityError as exc:
        raise ConfigError("correlation", str(exc)) from exc

    qmc = _section(document, "qmc")
    output = _section(document, "output")
    surface = _section(document, "surface")
    formats = tuple(output.get("formats", DEFAULT_FORMATS))
    for i, fmt in enumerate(formats):
        if fmt not in DEFAULT_FORMATS:
            raise ConfigError(f"output.formats[{i}]", "must be csv or json")
    names = joint.names
    surface_names = surface.get("parameters", names[:2])
    if len(names) < 2:
        surface_parameters = (0, 0)
    else:
        unknown = any(n not in names for n in surface_names)
        if len(surface_names) != 2 or unknown:
            raise ConfigError(
                "surface.parameters", "must name two configured parameters"
            )
        surface_parameters = (
            names.index(surface_names[0]),
            names.index(surface_names[1]),
        )
    baseline = document.get("baseline", True)
    if not isinstance(baseline, bool):
        raise ConfigError(
            "baseline", f"must be true or false, got {baseline!r}"
        )
    cache_dir = document.get("cache_dir")
    return CampaignConfig(
        model=model,
        joint=joint,
        polynomial_order=_number(
            document.get("polynomial_order", DEFAULT_ORDER),
            "polynomial_order",
            1,
            integer=True,
        ),
        node_multiplier=_number(
            document.get("node_multiplier", 2.0), "node_multiplier", 1
        ),
        lam=_number(document.get("lambda", 1e-8), "lambda", 0),
        transform=_enum(
            Transform, document.get("transform", "rosenblatt"), "transform"
        ),
        derivative_space=_enum(
            DerivativeSpace,
            document.get("derivative_space", "physical"),
            "derivative_space",
        ),
        qmc_n=_number(qmc.get("n", DEFAULT_QMC_SAMPLES), "qmc.n", 64, True),
        qmc_seed=_number(
            qmc.get("seed", DEFAULT_QMC_SEED), "qmc.seed", 0, True
        ),
        output_dir=output.get("dir"),
        formats=formats,
        baseline=baseline,
        cache_dir=str(cache_dir) if cache_dir else None,
        surface_parameters=surface_parameters,
        surface_points=_number(
            surface.get("points", SURFACE_POINTS), "surface.points", 3, True
        ),
        surface_span=_number(
            surface.get("span", SURFACE_SPAN), "surface.span", 0, strict=True
        ),
    )


def load_config(config_file: str) -> CampaignConfig:
    """
    Read and validate a JSON configuration file.

    Raises:
        ConfigError: If the file is not valid JSON or a field is invalid.
        FileNotFoundError: If the file does not exist.
    """
    with open(config_file, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
    return parse_config(document)
