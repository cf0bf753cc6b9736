from __future__ import annotations

import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any

LOGGER_NAME = "emf_lab"

# Levels keyed by case/suite status; anything unknown logs at ERROR.
STATUS_LEVELS: dict[str, int] = {
    "pass": logging.INFO,
    "ok": logging.INFO,
    "fail": logging.WARNING,
}


def _jsonable(value: Any) -> Any:
    # Residuals can be inf/nan after a blow-up; strict JSON has no spelling for those.
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, complex):
        return [_jsonable(value.real), _jsonable(value.imag)]
    return value


class JsonFormatter(logging.Formatter):
    """One JSON object per record: subject is a case name, a command, or "global"."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "ts": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(record.created)),
            "level": record.levelname,
            "message": record.getMessage(),
            "subject": getattr(record, "subject", "global"),
            "action": getattr(record, "action", "log"),
            "result": getattr(record, "result", "info"),
            "duration_ms": getattr(record, "duration_ms", 0),
        }
        extra_fields = getattr(record, "extra_fields", None)
        if isinstance(extra_fields, dict):
            for k, v in extra_fields.items():
                if k not in payload:
                    payload[k] = _jsonable(v)
        return json.dumps(
            payload, separators=(",", ":"), ensure_ascii=False, allow_nan=False, default=str
        )


def configure_logging(*, level: str) -> logging.Logger:
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    logger.propagate = False

    # stdout carries the JSON/CSV documents, so records go to stderr.
    if not any(isinstance(h, logging.StreamHandler) for h in logger.handlers):
        handler = logging.StreamHandler(stream=sys.stderr)
        handler.setFormatter(JsonFormatter())
        logger.addHandler(handler)
    return logger


@dataclass(frozen=True, slots=True)
class Timer:
    start: float

    @staticmethod
    def start_now() -> Timer:
        return Timer(start=time.monotonic())

    def elapsed_ms(self) -> int:
        return int((time.monotonic() - self.start) * 1000)

    def elapsed_s(self) -> float:
        return time.monotonic() - self.start


@dataclass(slots=True)
class CaseTimings:
    """Per-case wall times of one suite run, in milliseconds."""

    durations: dict[str, int] = field(default_factory=dict)

    def record(self, name: str, duration_ms: int) -> None:
        self.durations[name] = duration_ms

    def total_ms(self) -> int:
        return sum(self.durations.values())

    def slowest(self) -> tuple[str, int] | None:
        if not self.durations:
            return None
        name = max(sorted(self.durations), key=self.durations.__getitem__)
        return name, self.durations[name]

    def summary(self) -> dict[str, Any]:
        slowest = self.slowest()
        return {
            "case_ms_total": self.total_ms(),
            "slowest_case": slowest[0] if slowest else None,
            "slowest_case_ms": slowest[1] if slowest else 0,
        }


def log_event(
    logger: logging.Logger,
    *,
    subject: str,
    action: str,
    result: str,
    duration_ms: int,
    level: int = logging.INFO,
    message: str = "",
    extra_fields: dict[str, Any] | None = None,
) -> None:
    logger.log(
        level,
        message,
        extra={
            "subject": subject,
            "action": action,
            "result": result,
            "duration_ms": duration_ms,
            "extra_fields": extra_fields or {},
        },
    )


def log_case(
    logger: logging.Logger,
    *,
    case: str,
    status: str,
    duration_ms: int,
    residual: float | str | None = None,
    tolerance: float | None = None,
    message: str = "",
    error: str | None = None,
) -> None:
    fields: dict[str, Any] = {}
    if residual is not None:
        fields["residual"] = residual
    if tolerance is not None:
        fields["tolerance"] = tolerance
    if error is not None:
        fields["error"] = error
    log_event(
        logger,
        subject=case,
        action="case",
        result=status,
        duration_ms=duration_ms,
        level=STATUS_LEVELS.get(status, logging.ERROR),
        message=message,
        extra_fields=fields,
    )


def log_suite_summary(
    logger: logging.Logger,
    *,
    suite: str,
    status: str,
    counts: dict[str, int],
    timings: CaseTimings,
    duration_ms: int,
    wall_time_s: float = 0.0,
) -> None:
    log_event(
        logger,
        subject="suite",
        action="summary",
        result=status,
        duration_ms=duration_ms,
        level=STATUS_LEVELS.get(status, logging.ERROR),
        extra_fields={**counts, "suite": suite, "wall_time_s": wall_time_s, **timings.summary()},
    )
