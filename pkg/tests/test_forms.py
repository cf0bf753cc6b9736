from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from project.exceptions import MissingCoordinateError, PoleError
from project.symbolic.forms import (
    DifferentialForm1,
    DifferentialForm2,
    contract,
    exterior_derivative,
    exterior_derivative_form,
    wedge,
)
from project.symbolic.rational import (
    FIELD,
    T0,
    T1,
    T2,
    T3,
    X,
    RationalFunction,
    as_polynomial,
    coefficients_in_x,
    evaluate,
    from_coefficients_in_x,
    rational,
    t_point,
)


def test_d_of_d_vanishes() -> None:
    f = T1**2 * T3 / (T2 - T0) + T0 * T1
    assert exterior_derivative_form(exterior_derivative(f)).is_zero()


def test_wedge_is_antisymmetric() -> None:
    a = DifferentialForm1.of({0: T1, 2: T3**2})
    b = DifferentialForm1.of({1: 1, 2: T0 / T2, 3: T1})
    assert wedge(a, b) == -wedge(b, a)
    assert wedge(a, a).is_zero()
    assert wedge(a, b).slot(2, 0) == -wedge(a, b).slot(0, 2)


def test_first_nonzero_follows_slot_order() -> None:
    form = wedge(DifferentialForm1.of({1: 1}), DifferentialForm1.of({3: T2}))
    assert form.first_nonzero() == ((1, 3), FIELD(T2))
    assert DifferentialForm2.zero().first_nonzero() is None


def test_contract_with_three_or_four_components() -> None:
    a = DifferentialForm1.of({0: 5, 1: T2, 3: 1})
    assert contract(a, (FIELD.one, FIELD.zero, T1)) == T2 + T1
    assert contract(a, (FIELD.one, FIELD.one, FIELD.zero, FIELD.zero)) == 5 + T2
    with pytest.raises(ValueError):
        contract(a, (FIELD.one, FIELD.one))


def test_restriction_drops_dt0_and_sets_t0() -> None:
    a = DifferentialForm1.of({0: T0, 1: T0 * T1, 3: T3 / T0})
    assert a.restrict_t0_one() == DifferentialForm1.of({1: T1, 3: T3})


def test_forms_require_full_length() -> None:
    with pytest.raises(ValueError):
        DifferentialForm1((FIELD.zero,) * 3)
    with pytest.raises(ValueError):
        DifferentialForm2((FIELD.zero,) * 4)


def test_coefficients_in_x_round_trip() -> None:
    f = (4 * T0 * X**3 - T2 * X - T3) / T0
    coeffs = coefficients_in_x(f)
    assert coeffs == [-T3 / T0, -T2 / T0, FIELD.zero, FIELD(4)]
    assert from_coefficients_in_x(coeffs) == f
    with pytest.raises(ValueError):
        coefficients_in_x(1 / X)


def test_as_polynomial_needs_constant_denominator() -> None:
    assert as_polynomial(T1 / 3) * 3 == as_polynomial(FIELD(T1))
    with pytest.raises(ValueError):
        as_polynomial(1 / T1)


def test_evaluate_checks_poles_and_coordinates() -> None:
    f = (T1 + rational("1/2")) / (27 * T3**2 - T2**3)
    assert evaluate(f, t_point((1.5, 0.0, 1.0))) == pytest.approx(2 / 27)
    with pytest.raises(PoleError):
        evaluate(f, t_point((0.0, 3.0, 1.0)))
    with pytest.raises(MissingCoordinateError):
        evaluate(f, {"t1": 1.0, "t2": 2.0})


def _random_polynomial(rng: np.random.Generator, *, terms: int = 3) -> RationalFunction:
    p = FIELD.zero
    for _ in range(terms):
        c = rational(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))))
        e0, e1, e2, e3 = (int(e) for e in rng.integers(0, 3, size=4))
        p += c * T0**e0 * T1**e1 * T2**e2 * T3**e3
    return p


def _random_rational(rng: np.random.Generator) -> RationalFunction:
    return _random_polynomial(rng) / (_random_polynomial(rng, terms=2) ** 2 + 1)


def _random_form(rng: np.random.Generator) -> DifferentialForm1:
    return DifferentialForm1.of({i: _random_rational(rng) for i in range(4)})


def test_d_of_discriminant() -> None:
    assert exterior_derivative(27 * T3**2 - T2**3) == DifferentialForm1.of(
        {2: -3 * T2**2, 3: 54 * T3}
    )


def test_leibniz_rule_on_random_functions() -> None:
    rng = np.random.default_rng(7)
    for _ in range(50):
        f, g = _random_rational(rng), _random_rational(rng)
        expected = exterior_derivative(g).scale(f) + exterior_derivative(f).scale(g)
        assert exterior_derivative(f * g) == expected


def test_d_of_d_vanishes_on_random_functions() -> None:
    rng = np.random.default_rng(11)
    for _ in range(50):
        assert exterior_derivative_form(exterior_derivative(_random_rational(rng))).is_zero()


def test_wedge_is_antisymmetric_on_random_forms() -> None:
    rng = np.random.default_rng(13)
    for _ in range(50):
        a, b = _random_form(rng), _random_form(rng)
        assert wedge(a, b) == -wedge(b, a)
        assert wedge(a, a).is_zero()
