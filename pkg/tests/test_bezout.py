from __future__ import annotations

import numpy as np
import pytest
from sympy import resultant

from project.exceptions import BezoutInfeasibleError
from project.gauss_manin.families import FAMILY_L, FAMILY_W, FamilySpec
from project.symbolic.bezout import bezout_decompose, cubic_center
from project.symbolic.rational import (
    FIELD,
    T0,
    T1,
    T2,
    T3,
    X,
    X_INDEX,
    coefficients_in_x,
    evaluate,
)


def test_center_of_both_families() -> None:
    assert cubic_center(FAMILY_W.polynomial) == FIELD(T1)
    assert cubic_center(FAMILY_L.polynomial) == (T1 + T2 + T3) / 3


def test_center_needs_a_cubic() -> None:
    with pytest.raises(BezoutInfeasibleError):
        cubic_center(X**2 + T1)


@pytest.mark.parametrize("spec", [FAMILY_W, FAMILY_L], ids=["W", "L"])
def test_discriminant_is_in_the_ideal(spec: FamilySpec) -> None:
    p, p_prime, delta = spec.polynomial, spec.p_prime, spec.discriminant
    a1, a2 = bezout_decompose(delta, p, p_prime)
    assert -p_prime * a1 + p * a2 == delta
    assert len(coefficients_in_x(a1)) <= 5
    assert len(coefficients_in_x(a2)) <= 4


def test_gauge_picks_the_trivial_pair_for_p() -> None:
    p = FAMILY_W.polynomial
    assert bezout_decompose(p, p, FAMILY_W.p_prime) == (FIELD.zero, FIELD.one)


def test_gauge_kills_odd_taylor_coefficients_at_the_center() -> None:
    a1, _ = bezout_decompose(FAMILY_W.discriminant, FAMILY_W.polynomial, FAMILY_W.p_prime)
    point = {"t0": 1.0, "t1": 0.3, "t2": 2.0, "t3": -0.7, "s": 0.0, "x": 0.3}
    assert abs(evaluate(a1.diff(X), point)) < 1e-9
    assert abs(evaluate(a1.diff(X).diff(X).diff(X), point)) < 1e-9


def test_degree_overflow_is_infeasible() -> None:
    with pytest.raises(BezoutInfeasibleError):
        bezout_decompose(X**7, FAMILY_W.polynomial, FAMILY_W.p_prime)


def test_discriminant_pair_has_the_displayed_leading_terms() -> None:
    a1, a2 = bezout_decompose(FAMILY_W.discriminant, FAMILY_W.polynomial, FAMILY_W.p_prime)
    a1_coeffs, a2_coeffs = coefficients_in_x(a1), coefficients_in_x(a2)
    assert len(a1_coeffs) == 5
    assert len(a2_coeffs) == 4
    assert a1_coeffs[4] == -36 * T0**3
    assert a1_coeffs[3] == 144 * T0**3 * T1
    assert a2_coeffs[3] == -108 * T0**3


def test_resultant_of_random_cubics_decomposes() -> None:
    rng = np.random.default_rng(5)
    x = FIELD.symbols[X_INDEX]
    checked = 0
    while checked < 20:
        c3, c2, c1, c0, b = (int(v) for v in rng.integers(-6, 7, size=5))
        if c3 == 0:
            continue
        p = c3 * X**3 + c2 * X**2 + c1 * X + c0 + b * T1
        p_prime = p.diff(X)
        target = FIELD(resultant(p.as_expr(), p_prime.as_expr(), x))
        if not target:
            continue
        a1, a2 = bezout_decompose(target, p, p_prime)
        assert -p_prime * a1 + p * a2 == target
        checked += 1
