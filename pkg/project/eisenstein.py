"""
Normalized Eisenstein triple g = (g1, g2, g3) on the upper half-plane, its q-series
calculus and the theta triple (roots of the shifted cubic, labelled by continuity).

g_k(z) = a_k (1 + (-1)^k (4k / B_k) sum_n sigma_{2k-1}(n) q^n),  q = exp(2 pi i z),
with a_1 = 2 pi i / 12, a_2 = 12 a_1^2, a_3 = 8 a_1^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy.optimize import linear_sum_assignment
from sympy import bernoulli as _sympy_bernoulli
from sympy import divisor_sigma

from project.exceptions import RootCollisionError, ToleranceUnreachableError, UpperHalfPlaneError

ComplexArray = npt.NDArray[np.complex128]
Triple = tuple[complex, complex, complex]

TWO_PI_I = 2j * math.pi
A1 = TWO_PI_I / 12
P_INFINITY: Triple = (A1, 12 * A1**2, 8 * A1**3)

MAX_ORDER = 20_000
THETA_BASE = 1j
THETA_PATH_STEP = 0.05
THETA_MIN_STEP = 1e-9
THETA_MATCH_FRACTION = 0.25
ROOT_COLLISION = 1e-10
_NEWTON_STEPS = 2


def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = 1/6, B_2 = 1/30, B_3 = 1/42, ... (all positive)."""

    if not 1 <= k <= 8:
        raise ValueError(f"k must be in 1..8 (got {k})")
    b = _sympy_bernoulli(2 * k)
    return abs(Fraction(int(b.p), int(b.q)))


def sigma_divisor(power: int, n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be positive (got {n})")
    if power < 0:
        raise ValueError(f"power must be nonnegative (got {power})")
    return int(divisor_sigma(n, power))


@lru_cache(maxsize=16)
def _sigma_table(power: int, order: int) -> npt.NDArray[np.float64]:
    table = np.zeros(order + 1)
    for d in range(1, order + 1):
        table[d::d] += float(d) ** power
    return table


@dataclass(frozen=True, slots=True, eq=False)
class QSeries:
    """
    Truncated q-expansion c_0 .. c_N together with |c_n| <= bound_constant * n^bound_power
    for the omitted n > N.
    """

    coefficients: ComplexArray
    bound_constant: float
    bound_power: int

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def tail_bound(self, radius: float) -> float:
        """Upper bound of |sum_{n > N} c_n q^n| on |q| <= radius."""

        return _tail_bound(self.bound_constant, self.bound_power, self.order, radius)

    def evaluate(self, q: complex) -> complex:
        return complex(np.polynomial.polynomial.polyval(q, self.coefficients))


def _tail_bound(constant: float, power: int, order: int, radius: float) -> float:
    if radius <= 0.0 or constant == 0.0:
        return 0.0
    n1 = order + 1
    rho = ((order + 2) / n1) ** power * radius
    if rho >= 1.0:
        return math.inf
    log_bound = math.log(constant) + power * math.log(n1) + n1 * math.log(radius)
    return math.exp(log_bound) / (1.0 - rho)


def _series_constants(k: int) -> tuple[complex, float]:
    if k not in (1, 2, 3):
        raise ValueError(f"k must be 1, 2 or 3 (got {k})")
    a_k = P_INFINITY[k - 1]
    return a_k, (-1) ** k * 4 * k / float(bernoulli(k))


def eisenstein_series(k: int, order: int) -> QSeries:
    if order < 0:
        raise ValueError("order must be nonnegative")
    a_k, factor = _series_constants(k)
    coeffs = (a_k * factor) * _sigma_table(2 * k - 1, order).astype(np.complex128)
    coeffs[0] = a_k
    return QSeries(coefficients=coeffs, bound_constant=abs(a_k * factor), bound_power=2 * k)


def q_derivative(series: QSeries) -> QSeries:
    """d/dz = 2 pi i q d/dq, applied termwise."""

    n = np.arange(series.order + 1)
    return QSeries(
        coefficients=TWO_PI_I * n * series.coefficients,
        bound_constant=2 * math.pi * series.bound_constant,
        bound_power=series.bound_power + 1,
    )


def _truncation_order(constant: float, power: int, radius: float, tol: float) -> int:
    for order in range(MAX_ORDER + 1):
        if _tail_bound(constant, power, order, radius) < tol:
            return order
    raise ToleranceUnreachableError(
        f"|q| = {radius:.6f}: tail bound stays above {tol:g} up to order {MAX_ORDER}"
    )


def _nome(z: complex) -> complex:
    if z.imag <= 0:
        raise UpperHalfPlaneError(z)
    return complex(np.exp(TWO_PI_I * z))


@dataclass(frozen=True, slots=True)
class EisensteinTriple:
    z: complex
    values: Triple
    error_bound: float

    @property
    def g1(self) -> complex:
        return self.values[0]

    @property
    def g2(self) -> complex:
        return self.values[1]

    @property
    def g3(self) -> complex:
        return self.values[2]


def _evaluate_all(z: complex, tol: float, *, derivative: bool) -> EisensteinTriple:
    q = _nome(z)
    radius = abs(q)
    values: list[complex] = []
    worst = 0.0
    for k in (1, 2, 3):
        a_k, factor = _series_constants(k)
        constant = abs(a_k * factor) * (2 * math.pi if derivative else 1.0)
        power = 2 * k + (1 if derivative else 0)
        series = eisenstein_series(k, _truncation_order(constant, power, radius, tol))
        if derivative:
            series = q_derivative(series)
        values.append(series.evaluate(q))
        worst = max(worst, series.tail_bound(radius))
    return EisensteinTriple(z=z, values=(values[0], values[1], values[2]), error_bound=worst)


def eisenstein_eval(z: complex, tol: float) -> EisensteinTriple:
    return _evaluate_all(complex(z), tol, derivative=False)


def eisenstein_derivative(z: complex, tol: float) -> EisensteinTriple:
    """(g1', g2', g3') at z with the same tail-bound contract."""

    return _evaluate_all(complex(z), tol, derivative=True)


def ramanujan_vector(t: Triple) -> Triple:
    t1, t2, t3 = t
    return t1 * t1 - t2 / 12, 4 * t1 * t2 - 6 * t3, 6 * t1 * t3 - t2 * t2 / 3


def ramanujan_residual(z: complex, tol: float) -> float:
    """Relative distance between g'(z) and Ra(g(z))."""

    g = np.array(eisenstein_eval(z, tol).values)
    dg = np.array(eisenstein_derivative(z, tol).values)
    ra = np.array(ramanujan_vector((g[0], g[1], g[2])))
    return float(np.linalg.norm(dg - ra) / np.linalg.norm(ra))


@dataclass(frozen=True, slots=True)
class ThetaTriple:
    z: complex
    values: Triple
    error_bound: float
    base: complex
    path_steps: int


def _cubic_roots(g2: complex, g3: complex) -> ComplexArray:
    coeffs = [4.0, 0.0, -g2, -g3]
    roots = np.roots(coeffs).astype(np.complex128)
    for _ in range(_NEWTON_STEPS):
        value = ((4 * roots) * roots - g2) * roots - g3
        slope = 12 * roots * roots - g2
        safe = np.abs(slope) > 0
        roots = np.where(safe, roots - value / np.where(safe, slope, 1.0), roots)
    return roots


def _min_gap(roots: ComplexArray) -> float:
    return min(abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3))


def _check_separation(roots: ComplexArray, z: complex) -> None:
    gap = _min_gap(roots)
    if gap < ROOT_COLLISION:
        raise RootCollisionError(f"theta roots within {gap:.2e} at z = {z}")


def _base_order(roots: ComplexArray) -> ComplexArray:
    keyed = sorted(roots, key=lambda r: (round(r.real, 8), round(r.imag, 8)))
    return np.array(keyed, dtype=np.complex128)


def _match(labelled: ComplexArray, roots: ComplexArray) -> tuple[ComplexArray, float]:
    cost = np.abs(labelled[:, None] - roots[None, :])
    rows, cols = linear_sum_assignment(cost)
    return roots[cols[np.argsort(rows)]], float(cost[rows, cols].max())


def theta_eval(z: complex, tol: float, *, base: complex = THETA_BASE) -> ThetaTriple:
    """
    theta_i = g1 + e_i with e_i the roots of 4u^3 - g2 u - g3. Labels are the sorted order at
    `base` carried along the straight segment to z by nearest matching.

    A step is accepted only when every root moves less than THETA_MATCH_FRACTION of the
    smallest root gap; otherwise it is halved.
    """

    z = complex(z)
    if z.imag <= 0:
        raise UpperHalfPlaneError(z)
    current = eisenstein_eval(base, tol)
    labelled = _base_order(_cubic_roots(current.g2, current.g3))
    _check_separation(labelled, base)

    span = z - base
    length = abs(span)
    position = 0.0 if length else 1.0
    steps = 0 if length else 1
    step = THETA_PATH_STEP
    while position < 1.0:
        ds = min(step / length, 1.0 - position)
        w = base + span * (position + ds)
        candidate = eisenstein_eval(w, tol)
        roots = _cubic_roots(candidate.g2, candidate.g3)
        _check_separation(roots, w)
        matched, moved = _match(labelled, roots)
        if moved > THETA_MATCH_FRACTION * min(_min_gap(roots), _min_gap(labelled)):
            step /= 2
            if step < THETA_MIN_STEP:
                raise RootCollisionError(f"theta continuation stalled near w = {w}")
            continue
        labelled, current = matched, candidate
        position = 1.0 if ds >= 1.0 - position else position + ds
        steps += 1
        step = min(THETA_PATH_STEP, 2 * step)

    thetas = labelled + current.g1
    return ThetaTriple(
        z=z,
        values=(complex(thetas[0]), complex(thetas[1]), complex(thetas[2])),
        error_bound=current.error_bound,
        base=base,
        path_steps=steps,
    )


def theta_relations_residual(theta: ThetaTriple, g: EisensteinTriple) -> tuple[float, float, float]:
    """
    Residuals of sum theta_i = 3 g1, g2 = -4 sum (g1 - th_i)(g1 - th_j) and
    g3 = -4 prod (g1 - th_i).
    """

    d = [g.g1 - th for th in theta.values]
    sum_residual = abs(sum(theta.values) - 3 * g.g1)
    g2_residual = abs(-4 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]) - g.g2)
    g3_residual = abs(-4 * d[0] * d[1] * d[2] - g.g3)
    return sum_residual, g2_residual, g3_residual


def mobius(matrix: tuple[tuple[int, int], tuple[int, int]], z: complex) -> complex:
    (a, b), (c, d) = matrix
    return (a * z + b) / (c * z + d)


def theta_quasi_modularity_residual(
    matrix: tuple[tuple[int, int], tuple[int, int]], z: complex, tol: float
) -> float:
    """max_i |(cz+d)^-2 theta_i(Az) - theta_i(z) - c/(cz+d)| for A in Gamma(2)."""

    (_, _), (c, d) = matrix
    j = c * z + d
    lhs = theta_eval(mobius(matrix, z), tol).values
    rhs = theta_eval(z, tol).values
    return max(abs(a / j**2 - b - c / j) for a, b in zip(lhs, rhs))


def quasi_modularity_constant(z: complex, tol: float) -> complex:
    """z (z^-2 g1(-1/z) - g1(z)); equals 1 for the normalized g1."""

    return z * (eisenstein_eval(-1 / z, tol).g1 / z**2 - eisenstein_eval(z, tol).g1)
