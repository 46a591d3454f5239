"""
Writers for the campaign outputs: index reports, statistical moments,
convergence tables, correlation sweeps and surrogate surfaces.

Numbers are written with 12 significant digits and a `.` decimal separator,
so identical runs give byte-identical files.
"""

import csv
import json
import logging
import os

from correlated_sensitivity.sensitivity import SensitivityReport

REPORT_FIELDS = [
    "t_min",
    "parameter",
    "kind",
    "provenance",
    "permutation",
    "value",
]
MOMENT_FIELDS = ["t_min", "mean", "variance"]


def format_number(value: float) -> str:
    return f"{value:.12g}"


def write_rows(
    output_file: str, fieldnames: list[str], rows: list[dict]
) -> str:
    """
    Write dictionaries as a CSV file with a header row.

    Args:
        output_file (str): Path of the file to create.
        fieldnames (list[str]): Column order.
        rows (list[dict]): One dictionary per row; floats are formatted.

    Returns:
        str: The path written.
    """
    directory = os.path.dirname(output_file)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(output_file, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(
            {
                key: format_number(value) if isinstance(value, float) else value
                for key, value in row.items()
            }
            for row in rows
        )
    logging.info("Data written to %s", output_file)
    return output_file


def report_rows(report: SensitivityReport) -> list[dict]:
    """One CSV row per index record, in record order."""
    return [
        {
            "t_min": float(report.time_grid[record.time_index]),
            "parameter": report.parameter_names[record.parameter],
            "kind": record.kind.value,
            "provenance": record.provenance.value,
            "permutation": record.permutation_id,
            "value": record.value,
        }
        for record in report.records
    ]


def report_document(report: SensitivityReport) -> dict:
    return {
        "meta": report.meta,
        "parameters": report.parameter_names,
        "time_grid": report.time_grid.tolist(),
        "records": [
            {
                "time_index": record.time_index,
                "t_min": float(report.time_grid[record.time_index]),
                "parameter": record.parameter,
                "parameter_name": report.parameter_names[record.parameter],
                "kind": record.kind.value,
                "provenance": record.provenance.value,
                "permutation": record.permutation_id,
                "value": record.value,
            }
            for record in report.records
        ],
    }


def write_report(
    report: SensitivityReport,
    output_dir: str,
    formats=("csv", "json"),
    stem: str = "report",
) -> list[str]:
    """
    Write report.csv and/or report.json into output_dir.

    Returns:
        list[str]: The files written.
    """
    written = []
    if "csv" in formats:
        written.append(
            write_rows(
                os.path.join(output_dir, f"{stem}.csv"),
                REPORT_FIELDS,
                report_rows(report),
            )
        )
    if "json" in formats:
        output_file = os.path.join(output_dir, f"{stem}.json")
        if not os.path.exists(output_dir):
            os.makedirs(output_dir)
        with open(output_file, "w", encoding="utf-8") as f:
            json.dump(report_document(report), indent=4, fp=f)
        logging.info("Report written to %s", output_file)
        written.append(output_file)
    return written


def write_moments(report: SensitivityReport, output_dir: str) -> str:
    """Write moments.csv: mean and variance of the output per time step."""
    rows = [
        {"t_min": float(t), "mean": float(mean), "variance": float(variance)}
        for t, mean, variance in zip(
            report.time_grid, report.mean, report.variance
        )
    ]
    return write_rows(
        os.path.join(output_dir, "moments.csv"), MOMENT_FIELDS, rows
    )
