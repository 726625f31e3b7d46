"""
Tests for LoggingManager.

This module checks the JSON record layout, the stderr console handler, the
rotating file handler, error logging with stack traces and log_timing.
"""

import json

import numpy as np
import pytest

from src.config import LoggingConfig
from src.log_manager import LoggingManager


def read_records(log_dir):
    lines = (log_dir / "saturated_nls.log").read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines]


@pytest.fixture
def file_logger(tmp_path):
    """LoggingManager writing JSON records to tmp_path only."""
    config = LoggingConfig(
        level="DEBUG",
        format="json",
        console_output=False,
        file_output=True,
        log_dir=str(tmp_path),
    )
    return LoggingManager(config, run_id="run-123")


@pytest.mark.unit
def test_records_are_structured_json(file_logger, tmp_path):
    """Every level produces one JSON line with component, operation and run_id."""
    file_logger.debug("GroundStateSolver", "solve", "debug message", metadata={"n": 1})
    file_logger.info("SpectrumSolver", "spectrum_at", "info message")
    file_logger.warning("BifurcationAnalyzer", "search", "warning message")
    file_logger.error("BranchContinuer", "newton", "error message")
    file_logger.critical("CLI", "run", "critical message")

    records = read_records(tmp_path)
    assert [r["level"] for r in records] == ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    assert records[0]["component"] == "GroundStateSolver"
    assert records[0]["operation"] == "solve"
    assert records[0]["metadata"] == {"n": 1}
    assert all(r["run_id"] == "run-123" for r in records)
    assert "metadata" not in records[1]


@pytest.mark.unit
def test_numpy_metadata_is_serialized(file_logger, tmp_path):
    file_logger.info(
        "SpectrumSolver",
        "spectrum_at",
        "eigenvalues",
        metadata={"mu": np.array([2.5, 0.5]), "count": np.int64(2), "s": np.float64(0.3)},
    )
    record = read_records(tmp_path)[0]
    assert record["metadata"] == {"mu": [2.5, 0.5], "count": 2, "s": 0.3}


@pytest.mark.unit
def test_log_error_includes_stack_trace(file_logger, tmp_path):
    """log_error keeps the context and the formatted traceback."""
    try:
        raise RuntimeError("Newton iteration did not converge")
    except RuntimeError as e:
        file_logger.log_error("BranchContinuer", "newton", e, {"s": 0.4})

    record = read_records(tmp_path)[0]
    assert record["level"] == "ERROR"
    assert record["message"] == "Error: Newton iteration did not converge"
    assert record["metadata"] == {"s": 0.4}
    assert "RuntimeError" in record["stack_trace"]


@pytest.mark.unit
def test_log_timing_records_duration(file_logger, tmp_path):
    """Values attached inside the block are merged into the record."""
    with file_logger.log_timing("SpectrumSolver", "eigenvalue_curves", {"k_max": 3}) as details:
        details["samples"] = 10

    record = read_records(tmp_path)[0]
    assert record["level"] == "DEBUG"
    assert record["operation"] == "eigenvalue_curves"
    assert record["metadata"]["k_max"] == 3
    assert record["metadata"]["samples"] == 10
    assert record["metadata"]["duration_ms"] >= 0.0


@pytest.mark.unit
def test_log_timing_logs_even_when_block_raises(file_logger, tmp_path):
    with pytest.raises(ValueError):
        with file_logger.log_timing("CLI", "execute"):
            raise ValueError("boom")
    assert read_records(tmp_path)[0]["operation"] == "execute"


@pytest.mark.unit
def test_level_filters_lower_records(tmp_path):
    config = LoggingConfig(
        level="WARNING", console_output=False, file_output=True, log_dir=str(tmp_path)
    )
    logger = LoggingManager(config)
    logger.info("CLI", "run", "hidden")
    logger.warning("CLI", "run", "shown")

    records = read_records(tmp_path)
    assert [r["message"] for r in records] == ["shown"]
    assert "run_id" not in records[0]


@pytest.mark.unit
def test_console_output_goes_to_stderr(capsys):
    """stdout stays free for CSV/JSON results."""
    logger = LoggingManager(LoggingConfig(level="INFO", format="text", console_output=True))
    logger.info("CLI", "run", "visible on stderr")

    captured = capsys.readouterr()
    assert captured.out == ""
    assert "CLI.run - visible on stderr" in captured.err


@pytest.mark.unit
def test_handlers_are_replaced_on_reinitialization(tmp_path):
    """Creating a second manager does not duplicate handlers."""
    config = LoggingConfig(console_output=True, file_output=True, log_dir=str(tmp_path))
    LoggingManager(config)
    second = LoggingManager(config)
    assert len(second.logger.handlers) == 2
