"""Unit tests for correlated_sensitivity.report."""

import csv
import json

import numpy as np

from correlated_sensitivity.report import (
    REPORT_FIELDS,
    format_number,
    report_rows,
    write_moments,
    write_report,
    write_rows,
)
from correlated_sensitivity.sensitivity import (
    IndexRecord,
    Kind,
    Provenance,
    SensitivityReport,
)


def small_report() -> SensitivityReport:
    records = [
        IndexRecord(1, 0, Kind.SOBOL_FIRST, Provenance.FULL, 1, 0.7),
        IndexRecord(1, 1, Kind.SOBOL_FIRST, Provenance.INDEPENDENT, 1, 0.3),
        IndexRecord(0, 0, Kind.DERIVATIVE, Provenance.FULL, 1, 0.0),
        IndexRecord(1, 0, Kind.DERIVATIVE, Provenance.FULL, 1, -12.5),
    ]
    return SensitivityReport(
        records=records,
        meta={"model": "linear", "seed": None},
        time_grid=np.array([0.0, 1.5]),
        parameter_names=["a", "b"],
        mean=np.array([95.0, 60.25]),
        variance=np.array([0.0, 2.0]),
    )


def read_csv(path):
    with open(path, "r", encoding="utf-8") as f:
        return list(csv.DictReader(f))


class TestFormatNumber:
    """Tests for format_number."""

    def test_significant_digits(self):
        """Test 12 significant digits and short integers."""
        assert format_number(1.0 / 3.0) == "0.333333333333"
        assert format_number(20.0) == "20"
        assert format_number(1.0 - 1e-10) == "0.9999999999"


class TestWriteRows:
    """Tests for write_rows."""

    def test_creates_directory(self, tmp_path):
        """Test that missing parent directories are created."""
        output_file = tmp_path / "nested" / "table.csv"
        write_rows(str(output_file), ["x", "y"], [{"x": 0.5, "y": "b"}])
        assert read_csv(output_file) == [{"x": "0.5", "y": "b"}]

    def test_logs(self, tmp_path, caplog):
        """Test the info message naming the file."""
        output_file = tmp_path / "table.csv"
        with caplog.at_level("INFO"):
            write_rows(str(output_file), ["x"], [])
        assert str(output_file) in caplog.text


class TestWriteReport:
    """Tests for write_report and write_moments."""

    def test_csv(self, tmp_path):
        """Test header, row order and values of report.csv."""
        write_report(small_report(), str(tmp_path), formats=("csv",))
        with open(tmp_path / "report.csv", "r", encoding="utf-8") as f:
            assert f.readline().strip() == ",".join(REPORT_FIELDS)
        rows = read_csv(tmp_path / "report.csv")
        assert len(rows) == 4
        assert rows[0] == {
            "t_min": "1.5",
            "parameter": "a",
            "kind": "sobol_first",
            "provenance": "full",
            "permutation": "1",
            "value": "0.7",
        }
        assert rows[3]["value"] == "-12.5"
        assert not (tmp_path / "report.json").exists()

    def test_json(self, tmp_path):
        """Test the JSON document with meta and records."""
        written = write_report(small_report(), str(tmp_path))
        assert len(written) == 2
        with open(tmp_path / "report.json", "r", encoding="utf-8") as f:
            document = json.load(f)
        assert document["meta"]["model"] == "linear"
        assert document["parameters"] == ["a", "b"]
        assert document["records"][1]["parameter_name"] == "b"
        assert document["records"][1]["provenance"] == "independent"

    def test_row_count_matches_records(self, tmp_path):
        """Test one CSV row per record."""
        report = small_report()
        assert len(report_rows(report)) == len(report.records)

    def test_moments(self, tmp_path):
        """Test moments.csv."""
        output_file = write_moments(small_report(), str(tmp_path))
        assert read_csv(output_file) == [
            {"t_min": "0", "mean": "95", "variance": "0"},
            {"t_min": "1.5", "mean": "60.25", "variance": "2"},
        ]
