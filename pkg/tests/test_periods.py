from __future__ import annotations

import math

import numpy as np
import pytest

from project.eisenstein import eisenstein_eval
from project.exceptions import DiscriminantTooSmallError, PeriodDomainError
from project.periods import (
    LEGENDRE_RAW,
    CycleSpec,
    LeafKind,
    PeriodMatrix,
    act,
    act_full,
    b_invariants,
    b_invariants_of,
    classify_b,
    cubic_roots,
    cycle_basis,
    cycle_integrals,
    discriminant,
    functional_equation_residual,
    inverse_jacobian_check,
    inverse_period,
    leaf_classify,
    monodromy_apply,
    period_matrix,
    same_orbit_residual,
    sl2z_reduce,
)

SAMPLE = (0.2 + 0.1j, 4.0 - 0.5j, 1.0 + 0.3j)


def test_discriminant_vanishes_on_cuspidal_curve() -> None:
    assert discriminant((0.0, 3.0, 1.0)) == 0
    assert discriminant((0.5, 12 * 0.5**2, 8 * 0.5**3)) == pytest.approx(0.0, abs=1e-12)


def test_cubic_roots_with_double_root() -> None:
    found = cubic_roots((1.0, 12.0, 8.0))
    assert found.double_root
    assert sorted(r.real for r in found.roots) == pytest.approx([0.0, 0.0, 3.0], abs=1e-6)


def test_cubic_roots_simple() -> None:
    found = cubic_roots((0.0, 4.0, 0.0))
    assert not found.double_root
    assert sorted(r.real for r in found.roots) == pytest.approx([-1.0, 0.0, 1.0], abs=1e-12)


def test_cubic_roots_of_pure_cube() -> None:
    found = cubic_roots((0.0, 0.0, -4.0))
    for root in found.roots:
        assert root**3 == pytest.approx(-1.0, abs=1e-12)
    t1 = 0.4 - 0.2j
    assert sum(cubic_roots((t1, 4.0, 1.0)).roots) == pytest.approx(3 * t1, abs=1e-12)


def test_cycle_basis_pairs_adjacent_roots() -> None:
    first, second = cycle_basis([1.0 + 0j, -1.0 + 0j, 0j])
    assert first == CycleSpec(start=-1.0, end=0.0, other=1.0)
    assert second == CycleSpec(start=0.0, end=1.0, other=-1.0)


def test_cycle_integral_of_lemniscatic_curve() -> None:
    # y^2 = 4x^3 - 4x: the half-period over [0, 1] is the complete integral of 1/(2 sqrt(x^3 - x)).
    values = cycle_integrals(CycleSpec(start=0.0, end=1.0, other=-1.0))
    half = math.gamma(0.25) ** 2 / (4 * math.sqrt(2 * math.pi))
    assert abs(values[0]) == pytest.approx(2 * half, rel=1e-10)


def test_cycle_integrals_accept_real_endpoints() -> None:
    real = cycle_integrals(CycleSpec(start=0, end=1, other=-1))
    complex_ = cycle_integrals(CycleSpec(start=0j, end=1 + 0j, other=-1 + 0j))
    assert np.all(np.isfinite(real))
    np.testing.assert_allclose(real, complex_, rtol=1e-12)


def test_legendre_relation_on_raw_periods() -> None:
    raw = period_matrix(SAMPLE, raw=True)
    assert not raw.normalized
    assert abs(raw.determinant - LEGENDRE_RAW) < 1e-8 * abs(LEGENDRE_RAW)
    assert (raw.x1 * raw.x3.conjugate()).imag > 0


def test_normalized_determinant_is_one() -> None:
    p = period_matrix(SAMPLE)
    assert abs(p.determinant - 1) < 1e-8
    assert p.normalize() is p


def test_normalized_determinant_scales_with_t0() -> None:
    p = period_matrix(SAMPLE, t0=2.0)
    assert p.t0 == 2.0
    assert abs(p.determinant - 0.5) < 1e-8


def test_period_matrix_rejects_singular_fibres() -> None:
    with pytest.raises(DiscriminantTooSmallError):
        period_matrix((0.0, 3.0, 1.0))


@pytest.mark.parametrize("z", [1.1j, 0.3 + 1.2j, -0.4 + 2.0j])
def test_normal_form_of_eisenstein_point(z: complex) -> None:
    p = period_matrix(eisenstein_eval(z, 1e-14).values)
    assert same_orbit_residual(p, PeriodMatrix.normal_form(z)) < 1e-6


def test_sl2z_reduce_translates_into_strip() -> None:
    reduction = sl2z_reduce(PeriodMatrix.normal_form(5 + 1j))
    assert reduction.transform == ((1, -5), (0, 1))
    assert reduction.reduced.tau == pytest.approx(1j)


def test_sl2z_reduce_inverts_small_tau() -> None:
    reduction = sl2z_reduce(PeriodMatrix.normal_form(0.5j))
    assert abs(reduction.reduced.tau) >= 1 - 1e-12
    assert abs(reduction.reduced.tau.real) <= 0.5


def test_b_invariants_survive_monodromy() -> None:
    p = period_matrix(SAMPLE)
    before = b_invariants_of(p)
    after = b_invariants_of(monodromy_apply(p, ((2, 1), (1, 1))))
    assert after.b_dxy == pytest.approx(before.b_dxy, rel=1e-10)
    assert after.b_xdxy == pytest.approx(before.b_xdxy, rel=1e-10, abs=1e-12)
    assert after.b_mixed == pytest.approx(before.b_mixed, rel=1e-10, abs=1e-12)


def test_b_invariants_match_matrix_route() -> None:
    assert b_invariants(SAMPLE) == b_invariants_of(period_matrix(SAMPLE))


def test_action_on_the_slice() -> None:
    t = (0.1, 2.0, 3.0)
    assert act(t, 2.0, 1.0) == pytest.approx((0.1 / 4 + 0.5, 2.0 / 16, 3.0 / 64))
    assert act_full((1.0, *t), 2.0, 0.5, 1.0)[1:] == pytest.approx(act(t, 2.0, 1.0))


def test_functional_equation() -> None:
    assert functional_equation_residual(SAMPLE, 1.3 + 0.2j, 0.4 - 0.1j) < 1e-8


def test_inverse_period_round_trip() -> None:
    back = inverse_period(period_matrix(SAMPLE))
    np.testing.assert_allclose(back, SAMPLE, rtol=1e-6, atol=1e-8)


def test_inverse_period_is_equivariant() -> None:
    scaled = period_matrix(SAMPLE).times(np.diag([2.0, 0.5]).astype(np.complex128))
    expected = act(SAMPLE, 2.0, 0.0)
    np.testing.assert_allclose(inverse_period(scaled), expected, rtol=1e-6, atol=1e-8)


def test_inverse_period_domain_checks() -> None:
    with pytest.raises(PeriodDomainError):
        inverse_period(PeriodMatrix(x1=2.0, x2=0.0, x3=0.0, x4=1.0))
    with pytest.raises(PeriodDomainError):
        inverse_period(PeriodMatrix(x1=-1j, x2=-1.0, x3=1.0, x4=0.0))


def test_inverse_jacobian() -> None:
    assert inverse_jacobian_check(SAMPLE) < 1e-6


def test_classify_b() -> None:
    assert classify_b(0.4, 1e-8) is LeafKind.PUNCTURED_DISK
    assert classify_b(-0.4, 1e-8) is LeafKind.DISK
    assert classify_b(1e-10, 1e-8) is LeafKind.BOUNDARY_M0


def test_eisenstein_point_lies_on_m0() -> None:
    info = leaf_classify(eisenstein_eval(2j, 1e-14).values)
    assert info.classification is LeafKind.BOUNDARY_M0
    assert info.near_k


@pytest.mark.parametrize(
    ("k_prime", "kind", "b_xdxy"),
    [(0.3j, LeafKind.PUNCTURED_DISK, 0.408), (-0.3j, LeafKind.DISK, -0.192)],
)
def test_leaf_kinds_off_m0(k_prime: complex, kind: LeafKind, b_xdxy: float) -> None:
    start = act(eisenstein_eval(1.2j, 1e-14).values, 1.0, k_prime)
    info = leaf_classify(start)
    assert info.classification is kind
    # Im(z) |k'|^2 + Im(k') on [[z, z k' - 1], [1, k']].
    assert info.b_xdxy == pytest.approx(b_xdxy, rel=1e-6)
    assert not info.near_k
