from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path
from typing import Any

import pytest

from project.gauss_manin.foliation import reference_field
from project.main import main

REPO_ROOT = Path(__file__).resolve().parents[1]


def _json(capsys: pytest.CaptureFixture[str]) -> dict[str, Any]:
    return json.loads(capsys.readouterr().out)


def test_periods_command(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["periods", "--t", "0,4,1"]) == 0
    doc = _json(capsys)
    assert doc["determinant"]["re"] == pytest.approx(1.0, abs=1e-8)
    assert doc["determinant"]["im"] == pytest.approx(0.0, abs=1e-8)
    assert len(doc["matrix"]) == 4
    assert doc["raw"] is False


def test_raw_periods_keep_legendre_constant(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["periods", "--t", "0,4,1", "--raw"]) == 0
    doc = _json(capsys)
    assert doc["determinant"]["im"] == pytest.approx(-6.283185307179586, rel=1e-8)


def test_singular_fibre_is_a_numeric_error() -> None:
    assert main(["periods", "--t", "0,3,1"]) == 3


def test_eisenstein_command(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["eisenstein", "--z", "0.1+1.2i"]) == 0
    doc = _json(capsys)
    assert len(doc["g"]) == 3
    assert len(doc["theta"]) == 3
    assert doc["error_bound"] < 1e-12


def test_eisenstein_outside_upper_half_plane() -> None:
    assert main(["eisenstein", "--z=-1i"]) == 3


def test_foliation_command(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["foliation", "--p1", "0", "--p2", "1"]) == 0
    doc = _json(capsys)
    assert doc["p1"] == "0"
    assert doc["components"] == reference_field("ramanujan").normalized().formatted()


@pytest.mark.parametrize(
    "argv",
    [
        ["foliation", "--p1", "0", "--p2", "0"],
        ["foliation", "--p1", "y", "--p2", "1"],
        ["foliation", "--p1", "t1 +", "--p2", "1"],
        ["flow", "--field", "ra", "--start", "0,1"],
        ["flow", "--field", "custom", "--start", "0,4,1"],
        ["flow", "--field", "ra", "--start", "0,4,1", "--monitor", "delta0_first_integral"],
        ["flow", "--field", "restricted_delta0", "--start", "0.5,0.1", "--monitor", "B_xdxy"],
        ["verify", "--config", "/nonexistent/suite.yaml"],
        ["bogus"],
        ["periods", "--t", "1,2"],
    ],
)
def test_usage_errors(argv: list[str]) -> None:
    assert main(argv) == 2


def test_help_exits_cleanly() -> None:
    assert main(["--help"]) == 0


def test_flow_prints_csv(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["flow", "--field", "dh", "--start", "0.5,0.5,0.5", "--length", "0.5"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "s,re_t1,im_t1,re_t2,im_t2,re_t3,im_t3"
    assert len(lines) > 2


def test_flow_with_csv_file_prints_summary(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    path = tmp_path / "flow.csv"
    argv = [
        "flow",
        "--field",
        "restricted_delta0",
        "--start",
        "0.5,0.1",
        "--monitor",
        "delta0_first_integral",
        "--csv",
        str(path),
    ]
    assert main(argv) == 0
    summary = _json(capsys)
    assert summary["field"] == "restricted_delta0"
    assert summary["max_drift"]["delta0_first_integral"] < 1e-8
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header.endswith("conserved_delta0_first_integral_im")


def test_flow_blowup_is_a_numeric_error() -> None:
    argv = ["flow", "--field", "dh", "--start", "1,1,1", "--length", "2"]
    assert main(argv) == 3


def test_leaf_command(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["leaf", "--t", "0,4,1"]) == 0
    doc = _json(capsys)
    assert doc["classification"] in {"disk", "punctured_disk", "boundary_M0"}


def test_verify_symbolic_writes_report(tmp_path: Path) -> None:
    path = tmp_path / "report.json"
    assert main(["verify", "--suite", "symbolic", "--json", str(path)]) == 0
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["status"] == "pass"
    assert doc["suite"] == "symbolic"
    assert all(case["residual"] == "exact-zero" for case in doc["cases"])


def test_module_entry_point_exit_code() -> None:
    result = subprocess.run(
        [sys.executable, "-m", "project.main", "periods", "--t", "0,3,1"],
        cwd=REPO_ROOT,
        capture_output=True,
        text=True,
        check=False,
    )
    assert result.returncode == 3
    assert result.stdout == ""
    record = json.loads(result.stderr.strip().splitlines()[-1])
    assert record["result"] == "failed"
    assert record["exit_code"] == 3


def test_environment_does_not_change_the_report(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    texts = []
    for level, workers in (("INFO", "1"), ("DEBUG", "3")):
        monkeypatch.setenv("LOG_LEVEL", level)
        monkeypatch.setenv("VERIFY_PARALLELISM", workers)
        path = tmp_path / f"report_{workers}.json"
        assert main(["verify", "--suite", "symbolic", "--json", str(path)]) == 0
        texts.append(path.read_text(encoding="utf-8"))
    assert texts[0] == texts[1]
