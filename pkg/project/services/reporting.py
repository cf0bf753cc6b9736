from __future__ import annotations

import sys
from typing import TextIO

from pydantic import BaseModel

from project.exceptions import ReportWriteError
from project.flows import FlowTrajectory, write_trajectory_csv


def render(document: BaseModel) -> str:
    """One JSON document; keys follow model field order."""

    return document.model_dump_json(indent=2) + "\n"


def emit_report(
    document: BaseModel, *, path: str | None = None, stream: TextIO | None = None
) -> None:
    text = render(document)
    if path is None:
        (stream or sys.stdout).write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise ReportWriteError(f"Cannot write report to {path}: {e.strerror}") from e


def emit_trajectory(
    trajectory: FlowTrajectory, *, path: str | None = None, stream: TextIO | None = None
) -> None:
    if path is None:
        write_trajectory_csv(trajectory, stream or sys.stdout)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            write_trajectory_csv(trajectory, f)
    except OSError as e:
        raise ReportWriteError(f"Cannot write trajectory to {path}: {e.strerror}") from e
