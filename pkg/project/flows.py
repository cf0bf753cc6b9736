"""
Complex-time integration of the modular vector fields and the numeric checks built on it:
conserved quantities along trajectories, tangency of analytic curves, the symmetric system
of the theta triple and the derivative law of the period map.
"""

from __future__ import annotations

import csv
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum
from typing import TextIO

import numpy as np
import numpy.typing as npt
from scipy.integrate import solve_ivp

from project.eisenstein import eisenstein_eval, theta_eval
from project.exceptions import (
    BoundingBoxExitError,
    ConfigError,
    DegenerateCurveError,
    StepSizeUnderflowError,
)
from project.gauss_manin.foliation import FoliationField, reference_field
from project.periods import (
    PeriodMatrix,
    b_invariants,
    period_derivatives,
    period_matrix,
)
from project.symbolic.rational import compile_polynomial

ComplexArray = npt.NDArray[np.complex128]
Curve = Callable[[complex], ComplexArray]

DEFAULT_BOUND = 1e6
DEGENERATE_FIELD = 1e-12
# Five-point stencil: truncation ~ h^4, roundoff ~ eps / h.
STENCIL_STEP = 1e-3


class BuiltinField(StrEnum):
    RA = "ra"
    DH = "dh"
    RESTRICTED_DELTA0 = "restricted_delta0"


@dataclass(frozen=True, slots=True)
class VectorFieldHandle:
    name: str
    coordinates: tuple[str, ...]
    rhs: Callable[[ComplexArray], ComplexArray] = field(compare=False, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def __call__(self, point: Sequence[complex] | ComplexArray) -> ComplexArray:
        return self.rhs(np.asarray(point, dtype=np.complex128))


def _polynomial_rhs(
    field_: FoliationField, *, s: complex = 0.0
) -> Callable[[ComplexArray], ComplexArray]:
    compiled = [compile_polynomial(p) for p in field_.components]

    def _rhs(t: ComplexArray) -> ComplexArray:
        values = (1.0, t[0], t[1], t[2], s, 0.0)
        return np.array([f(*values) for f in compiled], dtype=np.complex128)

    return _rhs


def _restricted_delta0(y: ComplexArray) -> ComplexArray:
    # (t, t1) with t2 = 3 t^2, t3 = t^3 inside the discriminant surface.
    t, t1 = y
    return np.array([2 * t1 * t - t * t, t1 * t1 - t * t / 4], dtype=np.complex128)


def builtin_field(kind: BuiltinField | str) -> VectorFieldHandle:
    kind = BuiltinField(kind)
    if kind is BuiltinField.RESTRICTED_DELTA0:
        return VectorFieldHandle(name=kind.value, coordinates=("t", "t1"), rhs=_restricted_delta0)
    fixture = "ramanujan" if kind is BuiltinField.RA else "darboux_halphen"
    return VectorFieldHandle(
        name=kind.value,
        coordinates=("t1", "t2", "t3"),
        rhs=_polynomial_rhs(reference_field(fixture)),
    )


def foliation_field(
    field_: FoliationField, *, name: str = "custom", s: complex = 0.0
) -> VectorFieldHandle:
    """Handle for a derived field; the parameter s, if present, is frozen at the given value."""

    return VectorFieldHandle(
        name=name, coordinates=("t1", "t2", "t3"), rhs=_polynomial_rhs(field_, s=s)
    )


@dataclass(frozen=True, slots=True)
class FlowTrajectory:
    field_name: str
    coordinates: tuple[str, ...]
    arcs: tuple[float, ...]
    points: ComplexArray = field(compare=False, repr=False)
    phase: complex
    evaluations: int
    conserved: Mapping[str, tuple[complex, ...]] = field(default_factory=dict)

    @property
    def start(self) -> ComplexArray:
        return self.points[0]

    @property
    def end(self) -> ComplexArray:
        return self.points[-1]

    def with_conserved(self, name: str, values: Sequence[complex]) -> FlowTrajectory:
        merged = dict(self.conserved)
        merged[name] = tuple(values)
        return replace(self, conserved=merged)


def integrate_field(
    vector_field: VectorFieldHandle,
    start: Sequence[complex],
    *,
    phase: complex = 1.0,
    length: float = 1.0,
    tol: float = 1e-10,
    bound: float = DEFAULT_BOUND,
) -> FlowTrajectory:
    """
    Solve dt/ds = phase * X(t) for s in [0, length] with RK45.

    Samples are the accepted steps. Leaving |t| <= bound raises BoundingBoxExitError.
    """

    y0 = np.asarray(start, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(y0))))
    direction = complex(phase) / abs(phase)

    def _rhs(_: float, y: ComplexArray) -> ComplexArray:
        return direction * vector_field(y)

    def _leaves_box(_: float, y: ComplexArray) -> float:
        return bound - float(np.max(np.abs(y)))

    _leaves_box.terminal = True  # type: ignore[attr-defined]

    solution = solve_ivp(
        _rhs,
        (0.0, length),
        y0,
        method="RK45",
        rtol=tol,
        atol=tol * scale,
        max_step=length / 20,
        events=_leaves_box,
    )
    if solution.status == -1:
        raise StepSizeUnderflowError(solution.message)
    if solution.status == 1:
        raise BoundingBoxExitError(arc=float(solution.t[-1]), bound=bound)

    return FlowTrajectory(
        field_name=vector_field.name,
        coordinates=vector_field.coordinates,
        arcs=tuple(float(s) for s in solution.t),
        points=np.asarray(solution.y.T, dtype=np.complex128),
        phase=direction,
        evaluations=int(solution.nfev),
    )


class ConservedQuantity(StrEnum):
    B_XDXY = "B_xdxy"
    B_MIXED_ABS = "B_mixed_abs"
    DELTA0_FIRST_INTEGRAL = "delta0_first_integral"
    HALPHEN_PLANE_FIRST_INTEGRAL = "halphen_plane_first_integral"

    @property
    def dimension(self) -> int:
        return 2 if self is ConservedQuantity.DELTA0_FIRST_INTEGRAL else 3


def check_monitor(quantity: ConservedQuantity | str, field_: VectorFieldHandle) -> None:
    """Raise ConfigError when the quantity is not defined on the field's coordinates."""

    q = ConservedQuantity(quantity)
    if q.dimension != field_.dimension:
        raise ConfigError(
            f"{q.value} needs {q.dimension} coordinates; {field_.name} has {field_.dimension}"
        )


def _quantity(quantity: ConservedQuantity, point: ComplexArray, tol: float) -> complex:
    if quantity is ConservedQuantity.B_XDXY:
        return b_invariants(point, tol=tol).b_xdxy
    if quantity is ConservedQuantity.B_MIXED_ABS:
        return abs(b_invariants(point, tol=tol).b_mixed)
    if quantity is ConservedQuantity.DELTA0_FIRST_INTEGRAL:
        t, t1 = point
        return complex(t1 * t1 / t - t1 + t / 4)
    # Only defined on the invariant plane t1 = t2.
    t1, _, t3 = point
    return complex((t3 - t1) / (t1 * t1))


def conserved_values(
    trajectory: FlowTrajectory, quantity: ConservedQuantity | str, *, tol: float = 1e-13
) -> list[complex]:
    q = ConservedQuantity(quantity)
    if trajectory.points.shape[1] != q.dimension:
        raise ConfigError(f"{q.value} needs {q.dimension} coordinates")
    return [_quantity(q, point, tol) for point in trajectory.points]


def conservation_monitor(
    trajectory: FlowTrajectory, quantity: ConservedQuantity | str, *, tol: float = 1e-13
) -> float:
    """max |value - value at the first sample| along the trajectory."""

    values = conserved_values(trajectory, quantity, tol=tol)
    return max(abs(v - values[0]) for v in values)


class TangencyMode(StrEnum):
    EXACT = "exact"
    PROJECTIVE = "projective"


def curve_derivative(curve: Curve, z: complex, *, step: float = STENCIL_STEP) -> ComplexArray:
    h = step
    return (-curve(z + 2 * h) + 8 * curve(z + h) - 8 * curve(z - h) + curve(z - 2 * h)) / (12 * h)


def tangency_check(
    curve: Curve,
    points: Sequence[complex],
    vector_field: VectorFieldHandle,
    *,
    mode: TangencyMode | str = TangencyMode.EXACT,
    step: float = STENCIL_STEP,
) -> float:
    """
    Exact mode: max |c'(z) - X(c(z))| / |X(c(z))|.
    Projective mode: max |c'(z) x X(c(z))| / (|c'(z)| |X(c(z))|).
    """

    mode = TangencyMode(mode)
    worst = 0.0
    for z in points:
        value = curve(z)
        x = vector_field(value)
        x_norm = float(np.linalg.norm(x))
        if x_norm <= DEGENERATE_FIELD * max(1.0, float(np.linalg.norm(value)) ** 2):
            raise DegenerateCurveError(f"vector field vanishes along the curve at z = {z}")
        d = curve_derivative(curve, z, step=step)
        if mode is TangencyMode.EXACT:
            residual = float(np.linalg.norm(d - x)) / x_norm
        else:
            d_norm = float(np.linalg.norm(d))
            if d_norm == 0:
                raise DegenerateCurveError(f"curve is stationary at z = {z}")
            residual = float(np.linalg.norm(np.cross(d, x))) / (d_norm * x_norm)
        worst = max(worst, residual)
    return worst


def eisenstein_curve(*, tol: float = 1e-14) -> Curve:
    def _curve(z: complex) -> ComplexArray:
        return np.array(eisenstein_eval(z, tol).values, dtype=np.complex128)

    return _curve


def uniformization_curve(c2: complex, c4: complex, *, tol: float = 1e-14) -> Curve:
    """
    z -> (g1 w^2 + c4 w, g2 w^4, g3 w^6) with w = c4 z - c2, the image of g(z) under
    k = 1/w, k' = c4. It lies in one leaf of Ra.
    """

    def _curve(z: complex) -> ComplexArray:
        g1, g2, g3 = eisenstein_eval(z, tol).values
        w = c4 * z - c2
        return np.array([g1 * w**2 + c4 * w, g2 * w**4, g3 * w**6], dtype=np.complex128)

    return _curve


def theta_curve(*, tol: float = 1e-14) -> Curve:
    def _curve(z: complex) -> ComplexArray:
        return np.array(theta_eval(z, tol).values, dtype=np.complex128)

    return _curve


def dh_flow_check(
    points: Sequence[complex], *, tol: float = 1e-14, permutation: Sequence[int] = (0, 1, 2)
) -> float:
    """Relative residual of the theta triple against the symmetric Darboux-Halphen system."""

    order = list(permutation)
    base = theta_curve(tol=tol)

    def _permuted(z: complex) -> ComplexArray:
        return base(z)[order]

    return tangency_check(_permuted, points, builtin_field(BuiltinField.DH))


def theta_sum_residual(points: Sequence[complex], *, tol: float = 1e-14) -> float:
    worst = 0.0
    for z in points:
        theta = theta_eval(z, tol).values
        worst = max(worst, abs(sum(theta) - 3 * eisenstein_eval(z, tol).g1))
    return worst


def _aligned(reference: PeriodMatrix, other: PeriodMatrix) -> ComplexArray:
    # Neighbouring points may pick the opposite orientation of both cycles.
    ref = reference.as_array()
    arr = other.as_array()
    return arr if np.linalg.norm(arr - ref) <= np.linalg.norm(arr + ref) else -arr


def period_jacobian_errors(
    t: Sequence[complex], *, h: float = 1e-4, tol: float = 1e-13
) -> tuple[float, float, float]:
    """Relative error of centered differences of per in t1, t2, t3 against per B_k^T."""

    point = np.asarray(t, dtype=np.complex128)
    center = period_matrix(point, tol=tol)
    exact = period_derivatives(point, tol=tol)
    errors = []
    for k in range(3):
        step = np.zeros(3, dtype=np.complex128)
        step[k] = h
        plus = _aligned(center, period_matrix(point + step, tol=tol))
        minus = _aligned(center, period_matrix(point - step, tol=tol))
        difference = (plus - minus) / (2 * h)
        target = exact[k + 1]
        errors.append(float(np.linalg.norm(difference - target) / np.linalg.norm(target)))
    return errors[0], errors[1], errors[2]


def period_jacobian_check(t: Sequence[complex], *, h: float = 1e-4, tol: float = 1e-13) -> float:
    return max(period_jacobian_errors(t, h=h, tol=tol))


def jacobian_order_ratio(t: Sequence[complex], *, h: float = 0.02, tol: float = 1e-13) -> float:
    """err(h) / err(h/2) over the t2 and t3 directions; about 4 for a second-order stencil."""

    # per(t + h e1) = per(t) exp(h B1^T) with B1 nilpotent: the t1 difference is exact.
    coarse = period_jacobian_errors(t, h=h, tol=tol)
    fine = period_jacobian_errors(t, h=h / 2, tol=tol)
    return max(coarse[1:]) / max(fine[1:])


def write_trajectory_csv(trajectory: FlowTrajectory, stream: TextIO) -> None:
    """s, then re/im of every coordinate, then re/im of each conserved series."""

    names = sorted(trajectory.conserved)
    header = ["s"]
    for c in trajectory.coordinates:
        header += [f"re_{c}", f"im_{c}"]
    for name in names:
        header += [f"conserved_{name}_re", f"conserved_{name}_im"]

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for i, (s, point) in enumerate(zip(trajectory.arcs, trajectory.points)):
        row = [repr(s)]
        for value in point:
            row += [repr(float(value.real)), repr(float(value.imag))]
        for name in names:
            v = complex(trajectory.conserved[name][i])
            row += [repr(v.real), repr(v.imag)]
        writer.writerow(row)
