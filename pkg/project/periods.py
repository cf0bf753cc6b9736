"""
Numerical periods of y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3 over straight-segment cycles,
the normalized period matrix, its inverse through the Eisenstein triple and leaf diagnostics.

Rows of a period matrix are cycles, columns are the forms dx/y and x dx/y.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from project.eisenstein import eisenstein_eval
from project.exceptions import (
    DiscriminantTooSmallError,
    IllConditionedCyclesError,
    PeriodDomainError,
    QuadratureError,
    ReductionLimitError,
    RootFindingError,
)
from project.gauss_manin.connection import reference_connection
from project.gauss_manin.monodromy import IntArray, as_sl2z
from project.symbolic.rational import compile_rational

ComplexArray = npt.NDArray[np.complex128]
Vector3 = tuple[complex, complex, complex]
IntMatrix = tuple[tuple[int, int], tuple[int, int]]

# Raw periods satisfy x1 x4 - x2 x3 = -2 pi i / t0 when Im(x1 conj(x3)) > 0.
LEGENDRE_RAW = -2j * math.pi
NORMALIZER = complex(np.sqrt(LEGENDRE_RAW))

DISCRIMINANT_THRESHOLD = 1e-8
ROOT_RESIDUAL = 1e-12
PATH_CLEARANCE = 1e-3
INITIAL_NODES = 32
MAX_NODES = 2**17
MAX_REDUCTION_STEPS = 10_000
DETERMINANT_TOLERANCE = 1e-6


def discriminant(t: Sequence[complex], *, t0: complex = 1.0) -> complex:
    _, t2, t3 = t
    return complex(t0 * (27 * t0 * t3**2 - t2**3))


def discriminant_scale(t: Sequence[complex], *, t0: complex = 1.0) -> float:
    _, t2, t3 = t
    return float(abs(t0) * (27 * abs(t0) * abs(t3) ** 2 + abs(t2) ** 3))


@dataclass(frozen=True, slots=True)
class CubicRoots:
    roots: Vector3
    double_root: bool


def cubic_roots(t: Sequence[complex], *, t0: complex = 1.0) -> CubicRoots:
    """Roots of 4 t0 (x - t1)^3 - t2 (x - t1) - t3, polished by Newton steps on u = x - t1."""

    t1, t2, t3 = (complex(v) for v in t)
    t0 = complex(t0)
    u = np.roots([4 * t0, 0.0, -t2, -t3]).astype(np.complex128)
    for _ in range(3):
        value = (4 * t0 * u * u - t2) * u - t3
        slope = 12 * t0 * u * u - t2
        safe = np.abs(slope) > 1e-14 * (abs(t2) + 1.0)
        u = np.where(safe, u - value / np.where(safe, slope, 1.0), u)

    scale = 4 * abs(t0) * np.abs(u) ** 3 + abs(t2) * np.abs(u) + abs(t3)
    residual = np.abs((4 * t0 * u * u - t2) * u - t3)
    if np.any(residual > ROOT_RESIDUAL * np.maximum(scale, 1e-300)):
        raise RootFindingError(f"cubic root residual {float(residual.max()):.3e} at t = {t}")

    x = u + t1
    double = abs(discriminant((t1, t2, t3), t0=t0)) <= DISCRIMINANT_THRESHOLD * discriminant_scale(
        (t1, t2, t3), t0=t0
    )
    return CubicRoots(roots=(complex(x[0]), complex(x[1]), complex(x[2])), double_root=bool(double))


@dataclass(frozen=True, slots=True)
class CycleSpec:
    """Double cover of the segment [start, end]; `other` is the remaining root."""

    start: complex
    end: complex
    other: complex


def _distance_to_segment(point: complex, a: complex, b: complex) -> float:
    ab = b - a
    s = ((point - a) * ab.conjugate()).real / abs(ab) ** 2
    s = min(1.0, max(0.0, s))
    return abs(point - (a + s * ab))


def _pairing(ordered: Sequence[complex]) -> tuple[CycleSpec, CycleSpec] | None:
    r1, r2, r3 = ordered
    span = max(abs(r1 - r2), abs(r2 - r3), abs(r1 - r3))
    first = CycleSpec(start=r1, end=r2, other=r3)
    second = CycleSpec(start=r2, end=r3, other=r1)
    for cycle in (first, second):
        if _distance_to_segment(cycle.other, cycle.start, cycle.end) <= PATH_CLEARANCE * span:
            return None
    return first, second


def cycle_basis(roots: Sequence[complex]) -> tuple[CycleSpec, CycleSpec]:
    """(r1, r2) and (r2, r3) after lexicographic sorting; (imag, real) order as fallback."""

    by_real = sorted(roots, key=lambda r: (r.real, r.imag))
    by_imag = sorted(roots, key=lambda r: (r.imag, r.real))
    for ordered in (by_real, by_imag):
        pairing = _pairing(ordered)
        if pairing is not None:
            return pairing
    raise IllConditionedCyclesError("a root lies too close to a cycle segment")


@lru_cache(maxsize=32)
def _chebyshev_nodes(n: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    nodes, weights = np.polynomial.chebyshev.chebgauss(n)
    return nodes, weights


def _segment_integrals(cycle: CycleSpec, t0: complex, nodes: int, moments: int) -> ComplexArray:
    # x = m + h xi turns (x - a)(x - b) into -h^2 (1 - xi^2); the Chebyshev weight absorbs
    # 1/sqrt(1 - xi^2) and the rest is analytic on [-1, 1].
    xi, w = _chebyshev_nodes(nodes)
    m = complex(cycle.start + cycle.end) / 2
    h = complex(cycle.end - cycle.start) / 2
    offset = m - complex(cycle.other)
    x = m + h * xi
    root_mid = np.sqrt(-4 * t0 * h * h * offset)
    root_rest = np.sqrt(1 + h * xi / offset)
    base = w * h / (root_mid * root_rest)
    return np.array([np.sum(base * x**k) for k in range(moments)], dtype=np.complex128)


def cycle_integrals(
    cycle: CycleSpec, *, t0: complex = 1.0, tol: float = 1e-13, moments: int = 2
) -> ComplexArray:
    """Integrals of x^k dx/y, k < moments, over the cycle, doubling nodes until stable."""

    n = INITIAL_NODES
    previous = _segment_integrals(cycle, t0, n, moments)
    while n < MAX_NODES:
        n *= 2
        current = _segment_integrals(cycle, t0, n, moments)
        magnitude = max(1.0, float(np.max(np.abs(current))))
        if float(np.max(np.abs(current - previous))) < tol / 4 * magnitude:
            return 2 * current
        previous = current
    raise QuadratureError(f"no convergence with {MAX_NODES} nodes")


@dataclass(frozen=True, slots=True)
class PeriodMatrix:
    x1: complex
    x2: complex
    x3: complex
    x4: complex
    normalized: bool = True
    t0: complex = 1.0

    @classmethod
    def from_array(
        cls, array: ComplexArray, *, normalized: bool = True, t0: complex = 1.0
    ) -> PeriodMatrix:
        return cls(
            x1=complex(array[0, 0]),
            x2=complex(array[0, 1]),
            x3=complex(array[1, 0]),
            x4=complex(array[1, 1]),
            normalized=normalized,
            t0=t0,
        )

    @classmethod
    def normal_form(cls, z: complex) -> PeriodMatrix:
        """[[z, -1], [1, 0]], the period matrix of g(z)."""

        return cls(x1=complex(z), x2=-1.0, x3=1.0, x4=0.0)

    def as_array(self) -> ComplexArray:
        return np.array([[self.x1, self.x2], [self.x3, self.x4]], dtype=np.complex128)

    @property
    def determinant(self) -> complex:
        return self.x1 * self.x4 - self.x2 * self.x3

    @property
    def tau(self) -> complex:
        return self.x1 / self.x3

    def normalize(self) -> PeriodMatrix:
        if self.normalized:
            return self
        return PeriodMatrix.from_array(self.as_array() / NORMALIZER, normalized=True, t0=self.t0)

    def times(self, g: ComplexArray) -> PeriodMatrix:
        """Right multiplication, the action of the parameter group."""

        return PeriodMatrix.from_array(
            self.as_array() @ g, normalized=self.normalized, t0=self.t0
        )


def period_matrix(
    t: Sequence[complex], *, tol: float = 1e-13, t0: complex = 1.0, raw: bool = False
) -> PeriodMatrix:
    """Periods of (dx/y, x dx/y), oriented so Im(x1 conj(x3)) > 0; normalized unless raw."""

    point = tuple(complex(v) for v in t)
    delta = discriminant(point, t0=t0)
    scale = discriminant_scale(point, t0=t0)
    if abs(delta) <= DISCRIMINANT_THRESHOLD * scale:
        raise DiscriminantTooSmallError(delta, scale)

    first, second = cycle_basis(cubic_roots(point, t0=t0).roots)
    row1 = cycle_integrals(first, t0=t0, tol=tol)
    row2 = cycle_integrals(second, t0=t0, tol=tol)
    orientation = (row1[0] * np.conj(row2[0])).imag
    if orientation == 0:
        raise PeriodDomainError("cycles do not span the lattice")
    if orientation < 0:
        row2 = -row2
    matrix = PeriodMatrix.from_array(np.vstack([row1, row2]), normalized=False, t0=t0)
    return matrix if raw else matrix.normalize()


@dataclass(frozen=True, slots=True)
class BInvariants:
    b_dxy: float
    b_xdxy: float
    b_mixed: complex


def b_invariants_of(matrix: PeriodMatrix) -> BInvariants:
    """
    Im(x1 conj(x3)), Im(x2 conj(x4)) and x1 conj(x4) - x3 conj(x2), all unchanged by
    left multiplication with SL(2, Z).
    """

    p = matrix.normalize()
    return BInvariants(
        b_dxy=float((p.x1 * p.x3.conjugate()).imag),
        b_xdxy=float((p.x2 * p.x4.conjugate()).imag),
        b_mixed=p.x1 * p.x4.conjugate() - p.x3 * p.x2.conjugate(),
    )


def b_invariants(t: Sequence[complex], *, tol: float = 1e-13) -> BInvariants:
    return b_invariants_of(period_matrix(t, tol=tol))


def monodromy_apply(matrix: PeriodMatrix, a: IntMatrix | IntArray) -> PeriodMatrix:
    m = as_sl2z(a)
    return PeriodMatrix.from_array(
        m.astype(np.complex128) @ matrix.as_array(), normalized=matrix.normalized, t0=matrix.t0
    )


@dataclass(frozen=True, slots=True)
class Reduction:
    transform: IntMatrix
    reduced: PeriodMatrix


def sl2z_reduce(matrix: PeriodMatrix) -> Reduction:
    """A in SL(2, Z) with A P in the standard fundamental domain (|tau| >= 1, |Re tau| <= 1/2)."""

    arr = matrix.as_array()
    acc = np.eye(2, dtype=np.int64)
    invert = np.array([[0, -1], [1, 0]], dtype=np.int64)
    for _ in range(MAX_REDUCTION_STEPS):
        tau = arr[0, 0] / arr[1, 0]
        shift = round(tau.real)
        if shift:
            translate = np.array([[1, -shift], [0, 1]], dtype=np.int64)
            arr = translate @ arr
            acc = translate @ acc
            tau = arr[0, 0] / arr[1, 0]
        if abs(tau) < 1 - 1e-12:
            arr = invert @ arr
            acc = invert @ acc
            continue
        reduced = PeriodMatrix.from_array(arr, normalized=matrix.normalized, t0=matrix.t0)
        transform = ((int(acc[0, 0]), int(acc[0, 1])), (int(acc[1, 0]), int(acc[1, 1])))
        return Reduction(transform=transform, reduced=reduced)
    raise ReductionLimitError(f"no reduction within {MAX_REDUCTION_STEPS} steps")


def act(t: Sequence[complex], k: complex, k_prime: complex) -> Vector3:
    """t . g for g = [[k, k'], [0, 1/k]] on the slice t0 = 1."""

    t1, t2, t3 = t
    return t1 / k**2 + k_prime / k, t2 / k**4, t3 / k**6


def act_full(
    t: Sequence[complex], k1: complex, k2: complex, k3: complex
) -> tuple[complex, complex, complex, complex]:
    """t . g for g = [[k1, k3], [0, k2]] on (t0, t1, t2, t3)."""

    t0, t1, t2, t3 = t
    return (
        t0 / (k1 * k2),
        t1 * k2 / k1 + k3 / k1,
        t2 * k2 / k1**3,
        t3 * k2**2 / k1**4,
    )


def inverse_period(matrix: PeriodMatrix, *, tol: float = 1e-13) -> Vector3:
    """
    t with period_matrix(t) equal to matrix up to SL(2, Z): reduce to
    [[tau, -1], [1, 0]] [[x3, x4], [0, 1/x3]] and act on g(tau).
    """

    p = matrix.normalize()
    if abs(p.determinant - 1) > DETERMINANT_TOLERANCE:
        raise PeriodDomainError(f"determinant must be 1 (got {p.determinant})")
    if (p.x1 * p.x3.conjugate()).imag <= 0:
        raise PeriodDomainError("Im(x1 conj(x3)) must be positive")
    reduced = sl2z_reduce(p).reduced
    g = eisenstein_eval(reduced.tau, tol)
    return act(g.values, reduced.x3, reduced.x4)


def same_orbit_residual(a: PeriodMatrix, b: PeriodMatrix) -> float:
    """Relative distance between the reduced forms of a and b, up to -I."""

    ra = sl2z_reduce(a).reduced.as_array()
    rb = sl2z_reduce(b).reduced.as_array()
    scale = float(np.linalg.norm(rb))
    return float(min(np.linalg.norm(ra - rb), np.linalg.norm(ra + rb)) / scale)


def functional_equation_residual(
    t: Sequence[complex], k: complex, k_prime: complex, *, tol: float = 1e-13
) -> float:
    """per(t . g) against per(t) g modulo SL(2, Z)."""

    g = np.array([[k, k_prime], [0, 1 / k]], dtype=np.complex128)
    left = period_matrix(act(t, k, k_prime), tol=tol)
    right = period_matrix(t, tol=tol).times(g)
    return same_orbit_residual(left, right)


class LeafKind(StrEnum):
    DISK = "disk"
    PUNCTURED_DISK = "punctured_disk"
    BOUNDARY_M0 = "boundary_M0"


@dataclass(frozen=True, slots=True)
class LeafInfo:
    t: Vector3
    b_dxy: float
    b_xdxy: float
    b_mixed: complex
    c2: complex
    c4: complex
    classification: LeafKind
    near_k: bool


def classify_b(b_xdxy: float, tol: float) -> LeafKind:
    if b_xdxy > tol:
        return LeafKind.PUNCTURED_DISK
    if b_xdxy < -tol:
        return LeafKind.DISK
    return LeafKind.BOUNDARY_M0


def leaf_classify(t: Sequence[complex], *, tol: float = 1e-8) -> LeafInfo:
    point = tuple(complex(v) for v in t)
    p = period_matrix(point)
    b = b_invariants_of(p)
    reduced = sl2z_reduce(p).reduced
    return LeafInfo(
        t=(point[0], point[1], point[2]),
        b_dxy=b.b_dxy,
        b_xdxy=b.b_xdxy,
        b_mixed=b.b_mixed,
        c2=p.x2,
        c4=p.x4,
        classification=classify_b(b.b_xdxy, tol),
        # Diagnostic only: vanishing of an x dx/y period cannot be certified numerically.
        near_k=abs(reduced.x4) < tol,
    )


def _connection_components(t: Sequence[complex], t0: complex) -> list[ComplexArray]:
    """B_k evaluated at (t0, t) for k = 0..3."""

    connection = reference_connection()
    values = (t0, *t, 0.0, 0.0)
    return [
        np.array(
            [[compile_rational(e)(*values) for e in row] for row in connection.component(k)],
            dtype=np.complex128,
        )
        for k in range(4)
    ]


def period_derivatives(
    t: Sequence[complex], *, t0: complex = 1.0, tol: float = 1e-13
) -> list[ComplexArray]:
    """d per / dt_k = per B_k^T for k = 0..3, from the connection."""

    p = period_matrix(t, tol=tol, t0=t0).as_array()
    return [p @ b.T for b in _connection_components(t, t0)]


def inverse_jacobian_matrix(
    p: PeriodMatrix, t: Sequence[complex], *, t0: complex = 1.0
) -> ComplexArray:
    """The closed form of (dF)_x: rows F0..F3, columns x1..x4, with F = (t0, t1, t2, t3)."""

    x1, x2, x3, x4 = p.x1, p.x2, p.x3, p.x4
    f0 = complex(t0)
    f1, f2, f3 = (complex(v) for v in t)
    rows = [
        [-f0 * x4, f0 * x3, f0 * x2, -f0 * x1],
        [
            (12 * f0 * f1**2 * x3 - 12 * f0 * f1 * x4 - f2 * x3) / (12 * f0),
            -f1 * x3 + x4,
            (-12 * f0 * f1**2 * x1 + 12 * f0 * f1 * x2 + f2 * x1) / (12 * f0),
            f1 * x1 - x2,
        ],
        [
            4 * f1 * f2 * x3 - 3 * f2 * x4 - 6 * f3 * x3,
            -f2 * x3,
            -4 * f1 * f2 * x1 + 3 * f2 * x2 + 6 * f3 * x1,
            f2 * x1,
        ],
        [
            (18 * f0 * f1 * f3 * x3 - 12 * f0 * f3 * x4 - f2**2 * x3) / (3 * f0),
            -2 * f3 * x3,
            (-18 * f0 * f1 * f3 * x1 + 12 * f0 * f3 * x2 + f2**2 * x1) / (3 * f0),
            2 * f3 * x1,
        ],
    ]
    return np.array(rows, dtype=np.complex128) / p.determinant


def inverse_jacobian_check(
    t: Sequence[complex], *, t0: complex = 1.0, tol: float = 1e-13
) -> float:
    """max |(dF)_x (d per)_t - I| at x = per(t)."""

    p = period_matrix(t, tol=tol, t0=t0)
    columns = [d.reshape(4) for d in period_derivatives(t, t0=t0, tol=tol)]
    d_per = np.column_stack(columns)
    product = inverse_jacobian_matrix(p, t, t0=t0) @ d_per
    return float(np.max(np.abs(product - np.eye(4))))
