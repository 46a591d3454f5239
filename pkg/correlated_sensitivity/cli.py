"""
Campaign runner for the sensitivity experiments.

Commands:
    run          indices for the configured input model (report, moments)
    convergence  surrogate indices per polynomial order against Monte Carlo
    sweep-rho    one run per correlation value plus a stacked table
    surface      surrogate values on a grid, with and without correlation

Usage:
    correlated-sa run --config campaign.json --out results

Exit status is 0 on success, 2 for an invalid configuration and 1 when the
run itself fails.
"""

import argparse
import logging
import os
import sys

import numpy as np

from correlated_sensitivity import parse_common_arguments
from correlated_sensitivity.config import (
    CampaignConfig,
    equicorrelation,
    load_config,
)
from correlated_sensitivity.dist import to_physical
from correlated_sensitivity.errors import ConfigError, SensitivityError
from correlated_sensitivity.output_dir import resolve_output_dir
from correlated_sensitivity.report import (
    REPORT_FIELDS,
    format_number,
    report_rows,
    write_moments,
    write_report,
    write_rows,
)
from correlated_sensitivity.sensitivity import (
    SensitivityReport,
    analyse,
    fit_permutation,
    qmc_sobol,
)
from correlated_sensitivity.surrogate import evaluate
from correlated_sensitivity.transform import identity_permutation

DEFAULT_ORDERS = [2, 3, 4, 5, 6, 7]
DEFAULT_RHOS = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
DEFAULT_TIMES = [5.0, 50.0, 150.0]
NEAR_ONE_RHO = 1.0 - 1e-10
CONVERGENCE_FIELDS = [
    "order",
    "parameter",
    "kind",
    "provenance",
    "max_abs_diff",
]
CONVERGENCE_SERIES_FIELDS = [
    "order",
    "t_min",
    "parameter",
    "kind",
    "provenance",
    "pce",
    "qmc",
]


def _analyse(config: CampaignConfig, order: int | None = None, baseline=None):
    return analyse(
        config.model,
        config.joint,
        config.polynomial_order if order is None else order,
        config.settings(),
        baseline=config.baseline if baseline is None else baseline,
    )


def _write_run(
    config: CampaignConfig, report: SensitivityReport, output_dir: str
) -> list[str]:
    written = write_report(report, output_dir, config.formats)
    written.append(write_moments(report, output_dir))
    return written


def cmd_run(config: CampaignConfig, output_dir: str) -> list[str]:
    """
    Run the configured analysis and write report and moments files.

    Args:
        config (CampaignConfig): Validated campaign.
        output_dir (str): Directory for report.csv, report.json, moments.csv.

    Returns:
        list[str]: Files written.
    """
    return _write_run(config, _analyse(config), output_dir)


def cmd_convergence(
    config: CampaignConfig,
    output_dir: str,
    orders: list[int],
    qmc_n: int | None = None,
) -> list[str]:
    """
    Compare surrogate Sobol indices per order with one Monte-Carlo reference.

    Writes convergence.csv with the largest absolute difference over the
    defined time steps per (order, parameter, kind, provenance), and
    convergence_series.csv with both series.
    """
    if not orders:
        raise ConfigError("orders", "must not be empty")
    if any(order < 1 for order in orders):
        raise ConfigError("orders", "must be >= 1")
    reference = qmc_sobol(
        config.model,
        config.joint,
        qmc_n or config.qmc_n,
        config.qmc_seed,
        config.settings(),
    )
    keys = list(
        dict.fromkeys(
            (r.parameter, r.kind, r.provenance) for r in reference.records
        )
    )
    rows, series_rows = [], []
    for order in orders:
        logging.info("Convergence: polynomial order %d", order)
        report = _analyse(config, order, baseline=False)
        for parameter, kind, provenance in keys:
            qmc = reference.series(kind, provenance, parameter)
            pce = report.series(kind, provenance, parameter)
            common = sorted(set(qmc) & set(pce))
            if not common:
                continue
            labels = {
                "order": order,
                "parameter": config.joint.names[parameter],
                "kind": kind.value,
                "provenance": provenance.value,
            }
            rows.append(
                {
                    **labels,
                    "max_abs_diff": max(abs(pce[t] - qmc[t]) for t in common),
                }
            )
            series_rows.extend(
                {
                    **labels,
                    "t_min": float(config.model.time_grid[t]),
                    "pce": pce[t],
                    "qmc": qmc[t],
                }
                for t in common
            )
    return [
        write_rows(
            os.path.join(output_dir, "convergence.csv"),
            CONVERGENCE_FIELDS,
            rows,
        ),
        write_rows(
            os.path.join(output_dir, "convergence_series.csv"),
            CONVERGENCE_SERIES_FIELDS,
            series_rows,
        ),
    ]


def sweep_values(rhos: list[float]) -> list[float]:
    """Validate sweep correlations; 1.0 becomes 1 - 1e-10."""
    if not rhos:
        raise ConfigError("rhos", "must not be empty")
    values = []
    for rho in rhos:
        if not 0.0 <= rho <= 1.0:
            raise ConfigError("rhos", f"{rho} outside [0, 1]")
        if rho > NEAR_ONE_RHO:
            logging.info("Correlation %s replaced by %s", rho, NEAR_ONE_RHO)
            rho = NEAR_ONE_RHO
        values.append(rho)
    return values


def cmd_sweep_rho(
    config: CampaignConfig, output_dir: str, rhos: list[float]
) -> list[str]:
    """
    One run per correlation value, every off-diagonal entry set to rho.

    Each run writes into rho_<rho>/; rho_sweep.csv stacks all reports.
    """
    if config.joint.dim < 2:
        raise ConfigError("marginals", "a correlation sweep needs >= 2")
    written, stacked = [], []
    for rho in sweep_values(rhos):
        run_config = config.with_correlation(
            equicorrelation(config.joint.dim, rho)
        )
        report = _analyse(run_config)
        run_dir = os.path.join(output_dir, f"rho_{format_number(rho)}")
        written += _write_run(run_config, report, run_dir)
        stacked += [{"rho": rho, **row} for row in report_rows(report)]
    written.append(
        write_rows(
            os.path.join(output_dir, "rho_sweep.csv"),
            ["rho"] + REPORT_FIELDS,
            stacked,
        )
    )
    return written


def surface_time_indices(
    time_grid: np.ndarray, t_list: list[float]
) -> list[int]:
    """Nearest grid index of every requested time."""
    indices = []
    for t in t_list:
        if not time_grid[0] <= t <= time_grid[-1]:
            raise ConfigError(
                "times",
                f"{t} outside [{time_grid[0]:g}, {time_grid[-1]:g}]",
            )
        indices.append(int(np.argmin(np.abs(time_grid - t))))
    return indices


def surface_points(config: CampaignConfig) -> np.ndarray:
    """
    Grid of standard coordinates over the two surface parameters.

    The remaining coordinates stay at 0 (their means). Rows run over the
    first parameter's axis, then the second's.
    """
    axis = config.surface_span * np.linspace(-1.0, 1.0, config.surface_points)
    first, second = np.meshgrid(axis, axis, indexing="ij")
    z = np.zeros((first.size, config.joint.dim))
    a, b = config.surface_parameters
    z[:, a] = first.ravel()
    z[:, b] = second.ravel()
    return z


def cmd_surface(
    config: CampaignConfig, output_dir: str, t_list: list[float]
) -> list[str]:
    """
    Evaluate the uncorrelated and the correlated surrogate on a grid.

    The correlated surrogate is the one of the identity permutation; with no
    correlation configured both columns come from the same fit.
    """
    a, b = config.surface_parameters
    if a == b:
        raise ConfigError("surface.parameters", "needs two parameters")
    time_indices = surface_time_indices(config.model.time_grid, t_list)
    perm = identity_permutation(config.joint.dim)
    settings = config.settings()
    order = config.polynomial_order
    uncorrelated = fit_permutation(
        config.model, config.joint, perm, order, settings, correlated=False
    )
    correlated = (
        uncorrelated
        if config.joint.correlation.is_identity()
        else fit_permutation(config.model, config.joint, perm, order, settings)
    )
    z = surface_points(config)
    q = to_physical(config.joint, z)
    values_uncorrelated = evaluate(uncorrelated, z)
    values_correlated = evaluate(correlated, z)
    names = config.joint.names
    rows = [
        {
            "t_min": float(config.model.time_grid[t]),
            names[a]: float(q[k, a]),
            names[b]: float(q[k, b]),
            "uncorrelated": float(values_uncorrelated[k, t]),
            "correlated": float(values_correlated[k, t]),
            "difference": float(
                values_correlated[k, t] - values_uncorrelated[k, t]
            ),
        }
        for t in time_indices
        for k in range(z.shape[0])
    ]
    fields = ["t_min", names[a], names[b]]
    fields += ["uncorrelated", "correlated", "difference"]
    return [
        write_rows(os.path.join(output_dir, "surface.csv"), fields, rows)
    ]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", required=True, help="Campaign configuration (JSON)"
    )
    parser.add_argument(
        "--out",
        default=None,
        help="Output directory (default: CORRELATED_SA_OUTPUT_DIR, the "
        "config output.dir, or results)",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS,
        help="increase verbosity",
    )


def build_parser(argv: list[str] | None = None) -> argparse.ArgumentParser:
    arg_parser = parse_common_arguments.parse_common_arguments(
        program_name="correlated-sa",
        description="Global sensitivity analysis with correlated inputs.",
        argv=argv,
    )
    subparsers = arg_parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Compute the indices")
    _add_common(run_parser)
    run_parser.set_defaults(handler=lambda c, out, args: cmd_run(c, out))

    convergence = subparsers.add_parser(
        "convergence", help="Compare polynomial orders with Monte Carlo"
    )
    _add_common(convergence)
    convergence.add_argument(
        "--orders", type=int, nargs="+", default=DEFAULT_ORDERS
    )
    convergence.add_argument(
        "--qmc-n", type=int, default=None, help="Monte-Carlo base samples"
    )
    convergence.set_defaults(
        handler=lambda c, out, args: cmd_convergence(
            c, out, args.orders, args.qmc_n
        )
    )

    sweep = subparsers.add_parser(
        "sweep-rho", help="Repeat the analysis for increasing correlation"
    )
    _add_common(sweep)
    sweep.add_argument("--rhos", type=float, nargs="+", default=DEFAULT_RHOS)
    sweep.set_defaults(
        handler=lambda c, out, args: cmd_sweep_rho(c, out, args.rhos)
    )

    surface = subparsers.add_parser(
        "surface", help="Tabulate the surrogates on a parameter grid"
    )
    _add_common(surface)
    surface.add_argument(
        "--times", type=float, nargs="+", default=DEFAULT_TIMES
    )
    surface.set_defaults(
        handler=lambda c, out, args: cmd_surface(c, out, args.times)
    )
    return arg_parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser(argv).parse_args(argv)
    try:
        config = load_config(args.config)
        output_dir = resolve_output_dir(args.out, config.output_dir)
        written = args.handler(config, output_dir, args)
    except FileNotFoundError as exc:
        logging.error("Cannot read %s: %s", args.config, exc)
        return 2 if exc.filename == args.config else 1
    except ConfigError as exc:
        logging.error("Invalid configuration: %s", exc)
        return 2
    except (SensitivityError, OSError) as exc:
        logging.error("%s failed: %s", args.command, exc)
        return 1
    logging.info("%s: %d files written", args.command, len(written))
    return 0


if __name__ == "__main__":
    sys.exit(main())
