from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

CaseStatus = Literal["pass", "fail", "error"]
EXACT_ZERO = "exact-zero"


class ComplexValue(BaseModel):
    re: float
    im: float

    @classmethod
    def of(cls, value: complex) -> ComplexValue:
        return cls(re=float(value.real), im=float(value.imag))


class SuiteConfig(BaseModel):
    seed: int = 42
    tolerance: float = Field(default=1e-6, gt=0)
    legendre_samples: int = Field(default=50, gt=0)
    round_trip_samples: int = Field(default=10, gt=0)
    conservation_starts: int = Field(default=10, gt=0)
    tangency_points: int = Field(default=20, gt=0)
    dh_grid_points: int = Field(default=10, gt=0)
    flow_length: float = Field(default=1.0, gt=0)
    jacobian_step: float = Field(default=1e-4, gt=0)
    quadrature_tolerance: float = Field(default=1e-13, gt=0)


class CaseResult(BaseModel):
    name: str
    status: CaseStatus
    residual: float | Literal["exact-zero"]
    tolerance: float
    paper_ref: str = Field(min_length=1)
    detail: str = ""


class SuiteReport(BaseModel):
    suite: str
    status: CaseStatus
    seed: int
    tolerance: float
    cases: list[CaseResult] = Field(default_factory=list)
    # Logged, not serialized: reports from equal seeds must be byte-identical.
    wall_time_s: float = Field(default=0.0, exclude=True)

    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "fail": 0, "error": 0}
        for case in self.cases:
            out[case.status] += 1
        return out


class PeriodReport(BaseModel):
    t: list[ComplexValue]
    t0: float
    raw: bool
    matrix: list[ComplexValue]
    determinant: ComplexValue
    b_dxy: float
    b_xdxy: float
    b_mixed: ComplexValue
    tau: ComplexValue
    classification: str


class LeafReport(BaseModel):
    t: list[ComplexValue]
    b_dxy: float
    b_xdxy: float
    b_mixed: ComplexValue
    c2: ComplexValue
    c4: ComplexValue
    classification: str
    near_k: bool


class EisensteinReport(BaseModel):
    z: ComplexValue
    g: list[ComplexValue]
    theta: list[ComplexValue]
    error_bound: float
    theta_path_steps: int


class FoliationReport(BaseModel):
    p1: str
    p2: str
    components: list[str]


class FlowSummary(BaseModel):
    field: str
    start: list[ComplexValue]
    end: list[ComplexValue]
    phase: ComplexValue
    length: float
    samples: int
    evaluations: int
    max_drift: dict[str, float] = Field(default_factory=dict)
