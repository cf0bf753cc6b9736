from __future__ import annotations

import asyncio
import io
import json
import logging
from typing import Any

from project.models import SuiteConfig
from project.services.verify_suite import Outcome, SuiteCase, SuiteRunner
from project.utils.logging import CaseTimings, JsonFormatter, log_case, log_suite_summary


def _capturing_logger(name: str) -> tuple[logging.Logger, io.StringIO]:
    stream = io.StringIO()
    handler = logging.StreamHandler(stream)
    handler.setFormatter(JsonFormatter())
    logger = logging.getLogger(f"emf_lab.test.{name}")
    logger.handlers = [handler]
    logger.setLevel(logging.DEBUG)
    logger.propagate = False
    return logger, stream


def _records(stream: io.StringIO) -> list[dict[str, Any]]:
    return [json.loads(line) for line in stream.getvalue().splitlines()]


def test_case_record_carries_residual_and_tolerance() -> None:
    logger, stream = _capturing_logger("case")
    log_case(
        logger, case="numeric.theta", status="fail", duration_ms=12, residual=2e-6, tolerance=1e-8
    )
    (record,) = _records(stream)
    assert record["subject"] == "numeric.theta"
    assert record["action"] == "case"
    assert record["result"] == "fail"
    assert record["level"] == "WARNING"
    assert record["residual"] == 2e-6
    assert record["tolerance"] == 1e-8
    assert "error" not in record


def test_errored_case_logs_the_exception_type() -> None:
    logger, stream = _capturing_logger("error")
    log_case(
        logger,
        case="numeric.flow",
        status="error",
        duration_ms=3,
        message="blow-up",
        error="IntegrationError",
    )
    (record,) = _records(stream)
    assert record["level"] == "ERROR"
    assert record["error"] == "IntegrationError"
    assert record["message"] == "blow-up"


def test_non_finite_residual_stays_valid_json() -> None:
    logger, stream = _capturing_logger("nan")
    log_case(logger, case="numeric.flow", status="fail", duration_ms=0, residual=float("inf"))
    (record,) = _records(stream)
    assert record["residual"] == "inf"


def test_case_timings_pick_the_slowest_case() -> None:
    timings = CaseTimings()
    assert timings.summary() == {"case_ms_total": 0, "slowest_case": None, "slowest_case_ms": 0}
    timings.record("symbolic.b", 40)
    timings.record("symbolic.a", 40)
    timings.record("numeric.c", 5)
    assert timings.total_ms() == 85
    assert timings.slowest() == ("symbolic.a", 40)


def test_suite_summary_lists_counts_and_timings() -> None:
    logger, stream = _capturing_logger("summary")
    timings = CaseTimings({"numeric.a": 7})
    log_suite_summary(
        logger,
        suite="numeric",
        status="pass",
        counts={"pass": 1, "fail": 0, "error": 0},
        timings=timings,
        duration_ms=9,
        wall_time_s=0.009,
    )
    (record,) = _records(stream)
    assert record["subject"] == "suite"
    assert record["action"] == "summary"
    assert record["level"] == "INFO"
    assert record["pass"] == 1
    assert record["slowest_case"] == "numeric.a"
    assert record["case_ms_total"] == 7


def test_runner_logs_each_case_then_the_summary() -> None:
    logger, stream = _capturing_logger("runner")
    cases = [
        SuiteCase("symbolic.one", "identity", 0.0, lambda _: Outcome(passed=True, residual=None)),
        SuiteCase("numeric.two", "draw", 1.0, lambda _: Outcome(passed=False, residual=3.0)),
    ]
    runner = SuiteRunner(config=SuiteConfig(seed=1), logger=logger, parallelism=1, cases=cases)
    asyncio.run(runner.run(suite="all"))

    records = _records(stream)
    by_case = {r["subject"]: r for r in records if r["action"] == "case"}
    assert by_case["symbolic.one"]["residual"] == "exact-zero"
    assert by_case["numeric.two"]["result"] == "fail"
    summary = records[-1]
    assert summary["action"] == "summary"
    assert summary["result"] == "fail"
    assert summary["fail"] == 1
    assert summary["slowest_case"] in {"symbolic.one", "numeric.two"}
