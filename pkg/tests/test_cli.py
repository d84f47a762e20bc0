"""End-to-end tests of the command line surface through ``run``."""

import io
import json
from pathlib import Path

import pandas as pd
import pytest

from mimo_prelog import __version__
from mimo_prelog.cli import click_error_kind, run
from mimo_prelog.exceptions import ConstructionError

SCHEMA = json.loads((Path(__file__).parent / "golden" / "report_schema.json").read_text())

SISO = ["--T", "1", "--R", "1", "--L", "2", "--Q", "1"]
WORKED = ["--T", "3", "--R", "3", "--L", "6", "--Q", "1"]


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def assert_schema(data):
    entry = SCHEMA["commands"][data["subcommand"]]
    allowed = set(SCHEMA["common"]) | set(entry["required"]) | set(entry["optional"])
    assert set(SCHEMA["common"]) | set(entry["required"]) <= set(data)
    assert set(data) <= allowed


class TestReports:
    def test_bounds(self, capsys):
        data = report(capsys, "bounds", "--T", "5", "--R", "25", "--L", "6", "--Q", "1")
        assert data["chi_star"] == "25/6"
        assert data["chi_star_float"] == pytest.approx(25 / 6)
        assert data["best_T"] == 5
        assert data["seed"] is None
        assert data["dims"] == {"T": 5, "R": 25, "L": 6, "Q": 1}
        assert data["tool_version"] == __version__
        assert_schema(data)

    def test_bounds_csv(self, capsys):
        code, out, _ = invoke(capsys, "bounds", *WORKED, "--format", "csv")
        assert code == 0
        table = pd.read_csv(io.StringIO(out))
        assert list(table["T_prime"]) == [1, 2, 3]
        assert list(table["chi_low"]) == ["5/6", "5/3", "3/2"]

    def test_index_sets(self, capsys):
        data = report(capsys, "index-sets", *WORKED)
        assert data["theta"] == 9
        assert data["P"] == [[1, 4, 3], [2, 5, 1], [3, 6, 2]]
        assert data["P_sorted"] == [[1, 3, 4], [1, 2, 5], [2, 3, 6]]
        assert all(data["checks"].values())
        assert "step_sets" not in data
        assert_schema(data)

    def test_index_sets_with_inductive_step(self, capsys):
        data = report(capsys, "index-sets", "--T", "1", "--R", "2", "--L", "2", "--Q", "1")
        assert data["step_sets"] == {"L": [[]], "G": [[1]], "anchors": [1]}

    def test_jacobian_check(self, capsys):
        data = report(capsys, "jacobian-check", *SISO, "--seed", "1", "--trials", "50")
        assert data["fraction"] == 1.0
        assert (data["N"], data["fading_columns"], data["data_columns"]) == (2, 1, 1)
        assert_schema(data)

    def test_jacobian_check_zero_input(self, capsys):
        data = report(
            capsys, "jacobian-check", *SISO, "--seed", "1", "--trials", "20", "--zero-input"
        )
        assert data["nonsingular"] == 0

    def test_witness_to_file(self, capsys, tmp_path):
        target = tmp_path / "witness.json"
        code, out, _ = invoke(capsys, "witness", *SISO, "--seed", "3", "--out", str(target))
        assert code == 0
        assert out == ""
        data = json.loads(target.read_text())
        assert data["x"] == [[[1.0, 0.0], [1.0, 0.0]]]
        assert data["certificate"]["singular"] is False
        assert len(data["Z"]) == 2
        assert data["layout"]["columns"] == ["s[1,1,1]", "x[1,2]"]
        assert len(data["layout"]["rows"]) == data["N"] == 2
        assert_schema(data)

    def test_witness_with_inductive_step(self, capsys, tmp_path):
        target = tmp_path / "w.json"
        argv = ["--T", "1", "--R", "2", "--L", "2", "--Q", "1", "--seed", "7"]
        code, _, _ = invoke(capsys, "witness", *argv, "--out", str(target))
        assert code == 0
        data = json.loads(target.read_text())
        assert {"Z", "s", "certificate"} <= set(data)
        assert data["certificate"]["singular_value_ratio"] > 1e-6

    def test_bezout(self, capsys):
        data = report(capsys, "bezout", *WORKED)
        assert data["exponent"] == 18
        assert data["bound"] == "2^18"
        assert_schema(data)

    def test_mc_logdet_csv_matches_json(self, capsys):
        args = ["mc-logdet", *SISO, "--seed", "4", "--samples", "500"]
        data = report(capsys, *args)
        code, out, _ = invoke(capsys, *args, "--format", "csv")
        assert code == 0
        row = pd.read_csv(io.StringIO(out)).iloc[0]
        assert row["mean"] == pytest.approx(data["mean"], rel=1e-12)
        assert row["samples"] == data["samples"] == 500
        assert_schema(data)

    def test_mc_logdet_reproducible(self, capsys):
        args = ["mc-logdet", *WORKED, "--seed", "7", "--samples", "300"]
        first = invoke(capsys, *args)
        second = invoke(capsys, *args, "--workers", "2")
        assert first[0] == second[0] == 0
        assert first[1] == second[1]

    def test_hyx_growth(self, capsys):
        data = report(
            capsys, "hyx-growth", *SISO, "--seed", "2", "--samples", "2000",
            "--snr-start-db", "30", "--snr-stop-db", "50",
        )
        assert data["expected_slope"] == 1
        assert data["slope"] == pytest.approx(1.0, abs=0.1)
        assert len(data["per_point"]) == 5
        assert_schema(data)

    def test_mc_mi(self, capsys):
        data = report(
            capsys, "mc-mi", *SISO, "--seed", "5", "--samples", "2000", "--snr-points", "3"
        )
        assert data["chi_low_reference"] == "1/2"
        assert len(data["per_point"]) == 3
        assert_schema(data)


class TestRelativeOutput:
    def test_output_dir_from_environment(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("PRELOG_OUTPUT_DIR", str(tmp_path))
        code, _, _ = invoke(capsys, "bezout", *SISO, "--out", "reports/bezout.json")
        assert code == 0
        assert json.loads((tmp_path / "reports" / "bezout.json").read_text())["exponent"] == 2


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["bezout", "--T", "2", "--R", "2", "--L", "2", "--Q", "1"],
            ["bounds", "--T", "1", "--R", "1", "--L", "1", "--Q", "2"],
            ["bounds", *SISO, "--bogus"],
            ["witness", *SISO],
            ["mc-mi", "--T", "1", "--R", "1", "--L", "5", "--Q", "1", "--seed", "1"],
            ["mc-logdet", *SISO, "--seed", "1", "--samples", "1"],
            ["hyx-growth", *SISO, "--seed", "1", "--snr-start-db", "40", "--snr-stop-db", "20"],
            ["mc-mi", *SISO, "--seed", "1", "--snr-stop-db", "10"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, out, err = invoke(capsys, *argv)
        assert code == 2
        assert out == ""
        assert "error" in err.lower()

    def test_usage_errors_from_any_click_build(self):
        class ClickException(Exception):
            exit_code = 1

        class UsageError(ClickException):
            exit_code = 2

        class NoSuchOption(UsageError):
            pass

        class Abort(RuntimeError):
            pass

        assert click_error_kind(NoSuchOption()) == "ClickException"
        assert click_error_kind(Abort()) == "Abort"
        assert click_error_kind(ValueError("x")) is None

    def test_construction_failure(self, capsys, monkeypatch):
        def failing_witness(*args, **kwargs):
            raise ConstructionError("no certified witness", attempts=16)

        monkeypatch.setattr("mimo_prelog.cli.witness", failing_witness)
        code, out, err = invoke(capsys, "witness", *SISO, "--seed", "1")
        assert code == 1
        assert out == ""
        assert "no certified witness" in err

    def test_version(self, capsys):
        code, out, _ = invoke(capsys, "--version")
        assert code == 0
        assert out.strip() == f"mimo-prelog {__version__}"
