from __future__ import annotations

from sympy.polys.matrices import DomainMatrix

from project.exceptions import BezoutInfeasibleError
from project.symbolic.rational import (
    FIELD,
    X,
    RationalFunction,
    coefficients_in_x,
    from_coefficients_in_x,
)

A1_DEGREE = 4
A2_DEGREE = 3
_IDENTITY_ROWS = A1_DEGREE + 3  # x-degree of -p' a1 + p a2 is at most 6
# a1 coefficients at (x - c)^1 and (x - c)^3 vanish; this picks one pair out of
# (a1 + k p, a2 + k p') with deg k <= 1.
_GAUGE_COLUMNS = (1, 3)


def _padded(coeffs: list[RationalFunction], length: int) -> list[RationalFunction]:
    if len(coeffs) > length:
        raise BezoutInfeasibleError(f"x-degree {len(coeffs) - 1} exceeds {length - 1}")
    return coeffs + [FIELD.zero] * (length - len(coeffs))


def cubic_center(p: RationalFunction) -> RationalFunction:
    """x-coordinate where the cubic p has no quadratic term after shifting."""

    coeffs = coefficients_in_x(p)
    if len(coeffs) != 4:
        raise BezoutInfeasibleError("p must be cubic in x")
    return -coeffs[2] / (3 * coeffs[3])


def bezout_decompose(
    target: RationalFunction, p: RationalFunction, p_prime: RationalFunction
) -> tuple[RationalFunction, RationalFunction]:
    """
    Solve -p' * a1 + p * a2 = target over Q(t) with deg_x a1 <= 4 and deg_x a2 <= 3.

    Unknowns are the coefficients of a1, a2 in powers of (x - c), c the centre of p.
    """

    center = cubic_center(p)
    shift = X - center
    columns: list[list[RationalFunction]] = []
    for j in range(A1_DEGREE + 1):
        columns.append(_padded(coefficients_in_x(-p_prime * shift**j), _IDENTITY_ROWS))
    for j in range(A2_DEGREE + 1):
        columns.append(_padded(coefficients_in_x(p * shift**j), _IDENTITY_ROWS))
    rhs = _padded(coefficients_in_x(target), _IDENTITY_ROWS)

    unknowns = len(columns)
    rows = [[columns[c][r] for c in range(unknowns)] + [rhs[r]] for r in range(_IDENTITY_ROWS)]
    for gauge in _GAUGE_COLUMNS:
        rows.append([FIELD.one if c == gauge else FIELD.zero for c in range(unknowns + 1)])

    domain = FIELD.to_domain()
    system = DomainMatrix(
        [[domain.convert(e) for e in row] for row in rows], (len(rows), unknowns + 1), domain
    )
    reduced, pivots = system.rref()
    if unknowns in pivots:
        raise BezoutInfeasibleError("target is not in the ideal generated by p and p'")

    solution = [FIELD.zero] * unknowns
    for row, col in enumerate(pivots):
        solution[col] = FIELD(reduced[row, unknowns].element)

    a1 = from_coefficients_in_x(solution[: A1_DEGREE + 1], center=center)
    a2 = from_coefficients_in_x(solution[A1_DEGREE + 1 :], center=center)
    return a1, a2
