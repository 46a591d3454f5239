"""Unit tests for correlated_sensitivity.models."""

import logging
import sys
from unittest.mock import patch

import numpy as np
import pytest

from correlated_sensitivity.errors import (
    DimensionMismatch,
    MalformedOutput,
    ModelTimeout,
    ProcessFailed,
)
from correlated_sensitivity.models import (
    ModelKind,
    ModelSpec,
    coffee_cup,
    coffee_cup_grid,
    evaluate_model,
    external_eval,
    linear_model,
    product_model,
)

ECHO_SUM = (
    "import json, sys\n"
    "params = json.loads(sys.stdin.readline())['params']\n"
    "total = params['a'] + 10 * params['b']\n"
    "print(json.dumps({'outputs': [total, 2 * total]}))\n"
)


def external(script: str, grid=(0.0, 1.0), **kwargs) -> ModelSpec:
    return ModelSpec(
        kind=ModelKind.EXTERNAL,
        time_grid=np.array(grid),
        command=(sys.executable, "-c", script),
        **kwargs,
    )


def rk4_cooling(kappa, t_env, t0, times, substeps=200):
    """Integrate dT/dt = -κ(T - T_env) with classical Runge-Kutta."""
    values = [t0]
    temperature = t0
    for start, stop in zip(times[:-1], times[1:]):
        h = (stop - start) / substeps
        for _ in range(substeps):
            k1 = -kappa * (temperature - t_env)
            k2 = -kappa * (temperature + 0.5 * h * k1 - t_env)
            k3 = -kappa * (temperature + 0.5 * h * k2 - t_env)
            k4 = -kappa * (temperature + h * k3 - t_env)
            temperature += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        values.append(temperature)
    return np.array(values)


class TestCoffeeCup:
    """Tests for the coffee-cup cooling model."""

    def test_grid(self):
        """Test 151 points from 0 to 200 minutes."""
        grid = coffee_cup_grid()
        assert grid.size == 151
        assert grid[0] == 0.0
        assert grid[-1] == 200.0

    def test_matches_ode_integration(self):
        """Test the closed form against an RK4 integration of the ODE."""
        grid = coffee_cup_grid()
        expected = rk4_cooling(0.05, 20.0, 95.0, grid)
        np.testing.assert_allclose(
            coffee_cup(grid, 0.05, 20.0), expected, rtol=1e-8
        )

    def test_boundary_values(self):
        """Test T(0) = T0 and the approach to the ambient temperature."""
        values = coffee_cup(np.array([0.0, 1e4]), 0.05, 20.0, t0=95.0)
        np.testing.assert_allclose(values, [95.0, 20.0])

    def test_vectorised(self):
        """Test one row per parameter sample."""
        grid = coffee_cup_grid()
        kappa = np.array([0.04, 0.06])
        values = coffee_cup(grid, kappa, np.array([19.0, 21.0]))
        assert values.shape == (2, 151)
        np.testing.assert_allclose(values[1], coffee_cup(grid, 0.06, 21.0))

    def test_negative_kappa_warns(self, caplog):
        """Test that negative κ draws are evaluated and reported."""
        spec = ModelSpec(kind=ModelKind.COFFEE_CUP, time_grid=coffee_cup_grid())
        with caplog.at_level(logging.WARNING):
            values = evaluate_model(
                spec, np.array([[-0.01, 20.0]]), ["kappa", "t_env"]
            )
        assert "negative kappa" in caplog.text
        assert values[0, -1] > 95.0

    def test_needs_two_parameters(self):
        """Test that the coffee cup takes exactly (κ, T_env)."""
        spec = ModelSpec(kind=ModelKind.COFFEE_CUP, time_grid=coffee_cup_grid())
        with pytest.raises(DimensionMismatch):
            evaluate_model(spec, np.zeros((2, 3)), ["a", "b", "c"])


class TestSyntheticModels:
    """Tests for the linear and product models."""

    def test_linear(self):
        """Test Σ c_i·x_i on a batch."""
        x = np.array([[1.0, 2.0], [3.0, -1.0]])
        np.testing.assert_allclose(linear_model(x), [3.0, 2.0])
        np.testing.assert_allclose(linear_model(x, [2.0, 0.5]), [3.0, 5.5])

    def test_linear_coefficient_count(self):
        """Test that one coefficient per parameter is required."""
        with pytest.raises(DimensionMismatch):
            linear_model(np.ones((2, 3)), [1.0, 2.0])

    def test_product(self):
        """Test c·Π x_i."""
        x = np.array([[2.0, 3.0], [-1.0, 4.0]])
        np.testing.assert_allclose(product_model(x, 0.5), [3.0, -2.0])

    def test_replicated_over_grid(self):
        """Test that analytic models give one column per grid entry."""
        spec = ModelSpec(
            kind=ModelKind.PRODUCT,
            time_grid=np.array([0.0, 1.0, 2.0]),
            coefficients=(2.0,),
        )
        values = evaluate_model(spec, np.array([[1.0, 3.0]]), ["a", "b"])
        np.testing.assert_allclose(values, [[6.0, 6.0, 6.0]])

    def test_default_name(self):
        """Test that the name defaults to the kind."""
        assert ModelSpec(kind=ModelKind.LINEAR).name == "linear"

    def test_grid_must_increase(self):
        """Test that a decreasing time grid is rejected."""
        with pytest.raises(DimensionMismatch):
            ModelSpec(kind=ModelKind.LINEAR, time_grid=np.array([1.0, 0.0]))


class TestExternalModel:
    """Tests for external process models."""

    def test_round_trip(self):
        """Test the JSON line protocol and output ordering."""
        spec = external(ECHO_SUM, workers=3)
        batch = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0], [0.5, 0.0]])
        values = external_eval(spec, batch, ["a", "b"])
        np.testing.assert_allclose(
            values, [[21.0, 42.0], [43.0, 86.0], [65.0, 130.0], [0.5, 1.0]]
        )

    def test_via_evaluate_model(self):
        """Test dispatch to the external runner."""
        values = evaluate_model(
            external(ECHO_SUM), np.array([[1.0, 1.0]]), ["a", "b"]
        )
        np.testing.assert_allclose(values, [[11.0, 22.0]])

    def test_process_failed(self):
        """Test that a non-zero exit status carries stderr."""
        script = "import sys\nsys.stderr.write('boom')\nsys.exit(3)\n"
        with pytest.raises(ProcessFailed) as exception_info:
            external_eval(external(script), np.zeros((2, 2)), ["a", "b"])
        assert exception_info.value.returncode == 3
        assert "boom" in exception_info.value.stderr

    def test_wrong_output_count(self):
        """Test that the output length must match the time grid."""
        with pytest.raises(MalformedOutput):
            external_eval(
                external(ECHO_SUM, grid=(0.0, 1.0, 2.0)),
                np.zeros((1, 2)),
                ["a", "b"],
            )

    def test_not_json(self):
        """Test that an unparseable response is reported."""
        with pytest.raises(MalformedOutput):
            external_eval(
                external("print('hello')"), np.zeros((1, 2)), ["a", "b"]
            )

    def test_timeout(self):
        """Test that a slow process raises ModelTimeout."""
        script = "import time\ntime.sleep(10)\n"
        with pytest.raises(ModelTimeout):
            external_eval(
                external(script, timeout=0.5), np.zeros((1, 2)), ["a", "b"]
            )

    @patch("correlated_sensitivity.models.subprocess.run")
    def test_request_document(self, mock_run):
        """Test the request line sent to the process."""
        mock_run.return_value.returncode = 0
        mock_run.return_value.stdout = '{"outputs": [1.0, 2.0]}\n'
        external_eval(
            external(ECHO_SUM), np.array([[0.25, 4.0]]), ["kappa", "t_env"]
        )
        _, kwargs = mock_run.call_args
        assert kwargs["input"] == '{"params": {"kappa": 0.25, "t_env": 4.0}}\n'
        assert kwargs["timeout"] == 60.0


class TestCoffeeCupReference:
    """Reference values of the default coffee cup."""

    def test_value_at_twenty_minutes(self):
        """Test T(20 min) = 20 + 75·e⁻¹ on the default grid."""
        grid = coffee_cup_grid()
        values = coffee_cup(grid, 0.05, 20.0)
        assert values[15] == pytest.approx(47.591, abs=1e-3)

    def test_ode_tolerance(self):
        """Test the closed form within 1e-6 °C of RK4 on the grid."""
        grid = coffee_cup_grid()
        for kappa, t_env in ((0.034, 17.0), (0.066, 23.0)):
            difference = coffee_cup(grid, kappa, t_env) - rk4_cooling(
                kappa, t_env, 95.0, grid
            )
            assert np.max(np.abs(difference)) <= 1e-6
