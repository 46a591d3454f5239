"""
Models under analysis: the coffee-cup cooling model, synthetic analytic
models and external black-box commands.

Every model takes an n×D batch of physical parameter values and returns an
n×T array of outputs, one column per entry of the model's time grid.
"""

import enum
import json
import logging
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from correlated_sensitivity.errors import (
    DimensionMismatch,
    MalformedOutput,
    ModelTimeout,
    ProcessFailed,
)

COFFEE_T0 = 95.0
COFFEE_HORIZON_MIN = 200.0
COFFEE_STEPS = 150
DEFAULT_TIMEOUT_S = 60.0


class ModelKind(enum.Enum):
    COFFEE_CUP = "coffee_cup"
    LINEAR = "linear"
    PRODUCT = "product"
    EXTERNAL = "external"


def coffee_cup_grid(
    horizon: float = COFFEE_HORIZON_MIN, steps: int = COFFEE_STEPS
) -> np.ndarray:
    """Time grid in minutes, steps + 1 points from 0 to horizon."""
    return np.linspace(0.0, horizon, steps + 1)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """
    Declaration of the model under analysis.

    Attributes:
        kind: Which model to run.
        time_grid: Output labels; minutes for the coffee cup.
        name: Name used in reports.
        t0: Initial coffee temperature, °C.
        coefficients: Linear model weights (default all ones), or the scale
            of the product model (first entry).
        command: External model argv.
        timeout: Wall-clock limit per external evaluation, seconds.
        workers: Concurrent external processes.
    """

    kind: ModelKind
    time_grid: np.ndarray = field(default_factory=lambda: np.zeros(1))
    name: str = ""
    t0: float = COFFEE_T0
    coefficients: tuple[float, ...] | None = None
    command: tuple[str, ...] = ()
    timeout: float = DEFAULT_TIMEOUT_S
    workers: int = 1

    def __post_init__(self):
        grid = np.asarray(self.time_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 1:
            raise DimensionMismatch("time grid must be a non-empty vector")
        if np.any(np.diff(grid) <= 0):
            raise DimensionMismatch("time grid must be strictly increasing")
        object.__setattr__(self, "time_grid", grid)
        if not self.name:
            object.__setattr__(self, "name", self.kind.value)

    @property
    def output_count(self) -> int:
        return self.time_grid.size

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "name": self.name,
            "time_grid": self.time_grid.tolist(),
            "t0": self.t0,
            "coefficients": (
                list(self.coefficients) if self.coefficients else None
            ),
            "command": list(self.command),
        }


def coffee_cup(t_grid, kappa, t_env, t0: float = COFFEE_T0) -> np.ndarray:
    """
    Newton's law of cooling, dT/dt = -κ(T - T_env), in closed form.

    T(t) = T_env + (T0 - T_env)·exp(-κ·t). Negative κ draws are evaluated
    as-is.

    Args:
        t_grid: Times in minutes.
        kappa: Heat transfer rate in 1/min; scalar or length-n array.
        t_env: Ambient temperature in °C; scalar or length-n array.
        t0 (float): Initial temperature in °C.

    Returns:
        Temperatures in °C, shape (T,) for scalar inputs else (n, T).
    """
    t = np.asarray(t_grid, dtype=float)
    kappa = np.asarray(kappa, dtype=float)[..., np.newaxis]
    t_env = np.asarray(t_env, dtype=float)[..., np.newaxis]
    return t_env + (t0 - t_env) * np.exp(-kappa * t)


def linear_model(x, coefficients=None) -> np.ndarray:
    """Y = Σ c_i·x_i for a vector or each row of an n×D batch."""
    x = np.asarray(x, dtype=float)
    weights = (
        np.ones(x.shape[-1])
        if coefficients is None
        else np.asarray(coefficients, dtype=float)
    )
    if weights.size != x.shape[-1]:
        raise DimensionMismatch(
            f"{weights.size} coefficients for {x.shape[-1]} parameters"
        )
    return x @ weights


def product_model(x, scale: float = 1.0) -> np.ndarray:
    """Y = c·Π x_i; a pure interaction with zero first-order indices."""
    return scale * np.prod(np.asarray(x, dtype=float), axis=-1)


def _parse_response(stdout: str, expected: int) -> list[float]:
    lines = [line for line in stdout.splitlines() if line.strip()]
    if not lines:
        raise MalformedOutput("model produced no output")
    try:
        response = json.loads(lines[0])
        outputs = [float(v) for v in response["outputs"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedOutput(f"cannot parse model response: {exc}") from exc
    if len(outputs) != expected:
        raise MalformedOutput(
            f"model returned {len(outputs)} outputs, expected {expected}"
        )
    return outputs


def _run_external(spec: ModelSpec, params: dict) -> list[float]:
    request = json.dumps({"params": params}) + "\n"
    try:
        completed = subprocess.run(
            list(spec.command),
            input=request,
            capture_output=True,
            text=True,
            encoding="utf-8",
            timeout=spec.timeout,
            check=False,
        )
    except subprocess.TimeoutExpired as exc:
        raise ModelTimeout(
            f"model exceeded {spec.timeout} s: {shlex.join(spec.command)}"
        ) from exc
    if completed.returncode != 0:
        raise ProcessFailed(completed.returncode, completed.stderr)
    return _parse_response(completed.stdout, spec.output_count)


def external_eval(spec: ModelSpec, batch, names: list[str]) -> np.ndarray:
    """
    Evaluate an external command once per sample.

    Each process receives {"params": {name: value, ...}} as one JSON line on
    standard input and must answer {"outputs": [...]} on standard output.
    Up to spec.workers processes run at once; rows keep batch order.

    Args:
        spec: External model declaration.
        batch: n×D physical samples.
        names: Parameter names, one per column.

    Returns:
        n×T outputs.

    Raises:
        ProcessFailed: Non-zero exit status, with the captured stderr.
        MalformedOutput: Unparseable response or wrong output length.
        ModelTimeout: Evaluation exceeded spec.timeout.
    """
    batch = np.atleast_2d(np.asarray(batch, dtype=float))
    if batch.shape[1] != len(names):
        raise DimensionMismatch(
            f"{len(names)} names for {batch.shape[1]} parameters"
        )
    requests = [
        {name: float(value) for name, value in zip(names, row)}
        for row in batch
    ]
    with ThreadPoolExecutor(max_workers=max(spec.workers, 1)) as executor:
        futures = [
            executor.submit(_run_external, spec, params) for params in requests
        ]
        try:
            rows = [future.result() for future in futures]
        except Exception:
            for future in futures:
                future.cancel()
            raise
    return np.array(rows, dtype=float).reshape(len(requests), -1)


def evaluate_model(spec: ModelSpec, batch, names: list[str]) -> np.ndarray:
    """
    Evaluate any model kind on an n×D batch of physical samples.

    Returns:
        n×T outputs; analytic models are replicated over the time grid.
    """
    batch = np.atleast_2d(np.asarray(batch, dtype=float))
    match spec.kind:
        case ModelKind.COFFEE_CUP:
            if batch.shape[1] != 2:
                raise DimensionMismatch(
                    "coffee cup takes two parameters (kappa, t_env), "
                    f"got {batch.shape[1]}"
                )
            negative = int(np.sum(batch[:, 0] < 0))
            if negative:
                logging.warning(
                    "%d negative kappa draws evaluated as-is", negative
                )
            return coffee_cup(spec.time_grid, batch[:, 0], batch[:, 1], spec.t0)
        case ModelKind.LINEAR:
            values = linear_model(batch, spec.coefficients)
        case ModelKind.PRODUCT:
            scale = spec.coefficients[0] if spec.coefficients else 1.0
            values = product_model(batch, scale)
        case ModelKind.EXTERNAL:
            return external_eval(spec, batch, names)
    return np.repeat(values[:, np.newaxis], spec.output_count, axis=1)
