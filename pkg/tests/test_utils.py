"""Tests for random streams, report serialization and logging setup."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from loguru import logger

from mimo_prelog.exceptions import FileOperationError
from mimo_prelog.utils.logger import LoggerMixin, log_performance, setup_logger
from mimo_prelog.utils.serialization import (
    OutputFormat,
    encode,
    rational_fields,
    to_csv,
    to_json,
    write_report,
)
from mimo_prelog.utils.streams import (
    chunk_plan,
    compensated_mean_and_stderr,
    run_chunks,
    spawn_generators,
)


class TestStreams:
    def test_streams_depend_only_on_seed_and_index(self):
        first = [g.standard_normal() for g in spawn_generators(3, 4)]
        again = [g.standard_normal() for g in spawn_generators(3, 6)[:4]]
        assert first == again
        assert len(set(first)) == 4

    @given(samples=st.integers(1, 10_000), chunk=st.integers(1, 5000))
    def test_chunk_plan(self, samples, chunk):
        plan = chunk_plan(samples, chunk)
        assert sum(plan) == samples
        assert all(size == chunk for size in plan[:-1])
        assert 0 < plan[-1] <= chunk

    def test_run_chunks_keeps_order(self):
        def task(rng, size):
            return size, rng.integers(1 << 30)

        serial = run_chunks(11, [5, 3, 2, 7], task)
        threaded = run_chunks(11, [5, 3, 2, 7], task, max_workers=4)
        assert serial == threaded
        assert [size for size, _ in serial] == [5, 3, 2, 7]

    def test_mean_and_stderr(self):
        mean, err = compensated_mean_and_stderr(np.array([1.0, 2.0, 3.0, 4.0]))
        assert mean == 2.5
        assert err == pytest.approx(math.sqrt(5 / 3 / 4))

    def test_mean_is_exactly_rounded(self):
        values = np.array([1e16, 1.0, -1e16, 1.0])
        assert compensated_mean_and_stderr(values)[0] == 0.5

    def test_degenerate_inputs(self):
        assert compensated_mean_and_stderr(np.array([2.0])) == (2.0, 0.0)
        assert all(math.isnan(v) for v in compensated_mean_and_stderr(np.array([])))


class TestSerialization:
    def test_encode(self):
        payload = {
            "ratio": Fraction(25, 6),
            "z": 1 - 2j,
            "matrix": np.array([[1 + 0j, 2j]]),
            "flag": np.bool_(True),
            "count": np.int64(3),
            "lo": float("-inf"),
            "fmt": OutputFormat.csv,
        }
        assert encode(payload) == {
            "ratio": "25/6",
            "z": [1.0, -2.0],
            "matrix": [[[1.0, 0.0], [0.0, 2.0]]],
            "flag": True,
            "count": 3,
            "lo": "-inf",
            "fmt": "csv",
        }

    def test_rational_fields(self):
        assert rational_fields("eta", Fraction(5, 3)) == {"eta": "5/3", "eta_float": 5 / 3}
        assert rational_fields("zero", Fraction(0)) == {"zero": "0/1", "zero_float": 0.0}

    def test_json_is_sorted_and_terminated(self):
        text = to_json({"b": 1, "a": float("nan")})
        assert text.endswith("}\n")
        assert list(json.loads(text)) == ["a", "b"]
        assert json.loads(text)["a"] == "nan"

    def test_csv(self):
        text = to_csv([{"T_prime": 1, "chi_low": Fraction(1, 2)}])
        assert text == "T_prime,chi_low\n1,1/2\n"

    def test_write_to_stdout(self, capsys):
        assert write_report("hello\n") is None
        assert capsys.readouterr().out == "hello\n"

    def test_write_creates_directories(self, tmp_path):
        target = tmp_path / "a" / "b" / "report.json"
        assert write_report("{}\n", target) == target
        assert target.read_text() == "{}\n"

    def test_unwritable_target(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(FileOperationError):
            write_report("{}\n", blocker / "report.json")


class TestLogging:
    def test_file_sink(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        setup_logger(log_level="INFO", log_file=str(log_file))
        logger.info("written to file")
        logger.complete()
        assert "written to file" in log_file.read_text()
        setup_logger()

    def test_mixin_binds_class_name(self):
        class Probe(LoggerMixin):
            pass

        records = []
        handler = logger.add(lambda m: records.append(m.record["extra"]["name"]), level="INFO")
        Probe().logger.info("probe")
        logger.remove(handler)
        assert records == [f"{__name__}.Probe"]

    def test_rich_console(self, capsys):
        setup_logger(log_level="INFO", use_rich=True)
        logger.warning("rendered by rich")
        err = capsys.readouterr().err
        with capsys.disabled():
            setup_logger()
        assert "rendered by rich" in err

    def test_performance_record(self):
        records = []
        handler = logger.add(
            lambda m: records.append((m.record["extra"]["name"], m.record["message"])),
            level="INFO",
        )
        log_performance("mc_logdet", 1.23456, samples=500, mean=-1.154321)
        logger.remove(handler)
        assert records == [("performance", "mc_logdet took 1.235s (samples=500, mean=-1.15432)")]
