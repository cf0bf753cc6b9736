from __future__ import annotations

import io

import numpy as np
import pytest

from project.eisenstein import eisenstein_eval
from project.exceptions import BoundingBoxExitError, ConfigError, DegenerateCurveError
from project.flows import (
    BuiltinField,
    ConservedQuantity,
    TangencyMode,
    builtin_field,
    check_monitor,
    conservation_monitor,
    conserved_values,
    dh_flow_check,
    eisenstein_curve,
    foliation_field,
    integrate_field,
    jacobian_order_ratio,
    period_jacobian_check,
    tangency_check,
    theta_sum_residual,
    uniformization_curve,
    write_trajectory_csv,
)
from project.gauss_manin.foliation import reference_field
from project.periods import act

GRID = [1.1j, 0.2 + 1.3j, -0.3 + 1.6j]


def test_builtin_dimensions() -> None:
    assert builtin_field(BuiltinField.RA).dimension == 3
    assert builtin_field("dh").coordinates == ("t1", "t2", "t3")
    assert builtin_field(BuiltinField.RESTRICTED_DELTA0).coordinates == ("t", "t1")


def test_ra_vanishes_on_cuspidal_curve() -> None:
    ra = builtin_field(BuiltinField.RA)
    t1 = 0.7 - 0.2j
    np.testing.assert_allclose(ra((t1, 12 * t1**2, 8 * t1**3)), 0, atol=1e-12)


def test_restricted_field_is_ra_on_the_discriminant() -> None:
    t, t1 = 0.4 + 0.1j, -0.3 + 0.2j
    dt, dt1 = builtin_field(BuiltinField.RESTRICTED_DELTA0)((t, t1))
    ra = builtin_field(BuiltinField.RA)((t1, 3 * t**2, t**3))
    np.testing.assert_allclose(ra, [dt1, 6 * t * dt, 3 * t**2 * dt], atol=1e-12)


def test_custom_field_at_s_zero_is_ramanujan() -> None:
    point = (0.1 + 0.2j, 2.0, -0.5j)
    custom = foliation_field(reference_field("example_s_plus_x"), s=0.0)
    np.testing.assert_allclose(custom(point), builtin_field(BuiltinField.RA)(point))
    assert custom.name == "custom"


@pytest.mark.parametrize("phase", [1.0, 1j, np.exp(0.3j)])
def test_dh_diagonal_has_closed_form(phase: complex) -> None:
    # On t1 = t2 = t3 = a the system reduces to a' = a^2.
    trajectory = integrate_field(
        builtin_field(BuiltinField.DH), (0.5, 0.5, 0.5), phase=phase, length=1.0, tol=1e-12
    )
    expected = 0.5 / (1 - 0.5 * phase)
    np.testing.assert_allclose(trajectory.end, [expected] * 3, rtol=1e-9)
    assert trajectory.arcs[0] == 0.0
    assert trajectory.arcs[-1] == pytest.approx(1.0)
    assert trajectory.evaluations > 0
    assert trajectory.phase == pytest.approx(phase)


def test_blowup_leaves_the_box() -> None:
    with pytest.raises(BoundingBoxExitError) as info:
        integrate_field(builtin_field(BuiltinField.DH), (1.0, 1.0, 1.0), length=2.0, bound=100.0)
    assert info.value.arc < 1.0


def test_cuspidal_points_are_fixed() -> None:
    start = np.array([0.3, 12 * 0.09, 8 * 0.027], dtype=np.complex128)
    trajectory = integrate_field(builtin_field(BuiltinField.RA), start)
    assert float(np.max(np.abs(trajectory.points - start))) < 1e-10


def test_ra_flow_follows_eisenstein_translation() -> None:
    z = 0.1 + 1.2j
    start = eisenstein_eval(z, 1e-14).values
    trajectory = integrate_field(builtin_field(BuiltinField.RA), start, length=0.3, tol=1e-11)
    expected = eisenstein_eval(z + 0.3, 1e-14).values
    np.testing.assert_allclose(trajectory.end, expected, rtol=1e-7)


def test_eta1_field_translates_t1() -> None:
    trajectory = integrate_field(foliation_field(reference_field("eta1")), (0.0, 4.0, 1.0))
    np.testing.assert_allclose(trajectory.end, [1.0, 4.0, 1.0], atol=1e-10)


def test_b_xdxy_is_conserved_along_ra() -> None:
    start = act(eisenstein_eval(1.2j, 1e-14).values, 1.05, 0.1 + 0.1j)
    trajectory = integrate_field(builtin_field(BuiltinField.RA), start, length=0.5, tol=1e-11)
    assert conservation_monitor(trajectory, ConservedQuantity.B_XDXY) < 1e-6


def test_restricted_first_integral() -> None:
    trajectory = integrate_field(
        builtin_field(BuiltinField.RESTRICTED_DELTA0), (0.5, 0.1), length=1.0, tol=1e-12
    )
    assert conservation_monitor(trajectory, "delta0_first_integral") < 1e-8


def test_halphen_plane_first_integral() -> None:
    trajectory = integrate_field(
        builtin_field(BuiltinField.DH), (0.3, 0.3, -0.2), length=1.0, tol=1e-12
    )
    assert conservation_monitor(trajectory, ConservedQuantity.HALPHEN_PLANE_FIRST_INTEGRAL) < 1e-8
    np.testing.assert_allclose(trajectory.points[:, 0], trajectory.points[:, 1], rtol=1e-9)


def test_eisenstein_curve_is_an_integral_curve() -> None:
    ra = builtin_field(BuiltinField.RA)
    assert tangency_check(eisenstein_curve(), GRID, ra) < 1e-6


def test_uniformization_curve_is_tangent() -> None:
    ra = builtin_field(BuiltinField.RA)
    curve = uniformization_curve(1.0, 0.5)
    assert tangency_check(curve, GRID, ra, mode=TangencyMode.PROJECTIVE) < 1e-7


def test_tangency_on_a_zero_of_the_field() -> None:
    point = np.array([0.5, 3.0, 1.0], dtype=np.complex128)
    with pytest.raises(DegenerateCurveError):
        tangency_check(lambda _: point, GRID, builtin_field(BuiltinField.RA))


def test_theta_triple_solves_the_symmetric_system() -> None:
    assert dh_flow_check(GRID) < 1e-6
    assert dh_flow_check(GRID, permutation=(2, 0, 1)) < 1e-6
    assert theta_sum_residual(GRID) < 1e-10


def test_period_jacobian() -> None:
    assert period_jacobian_check((0.0, 4.0, 1.0)) < 1e-5
    assert jacobian_order_ratio((0.0, 4.0, 1.0)) == pytest.approx(4.0, abs=0.5)


def test_trajectory_csv_layout() -> None:
    trajectory = integrate_field(
        builtin_field(BuiltinField.RESTRICTED_DELTA0), (0.5, 0.1), length=0.2
    )
    values = conserved_values(trajectory, ConservedQuantity.DELTA0_FIRST_INTEGRAL)
    trajectory = trajectory.with_conserved("delta0_first_integral", values)

    buf = io.StringIO()
    write_trajectory_csv(trajectory, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == (
        "s,re_t,im_t,re_t1,im_t1,"
        "conserved_delta0_first_integral_re,conserved_delta0_first_integral_im"
    )
    assert len(lines) == len(trajectory.arcs) + 1
    assert lines[1].split(",")[:3] == ["0.0", "0.5", "0.0"]


def test_monitor_must_match_the_field_dimension() -> None:
    restricted = builtin_field(BuiltinField.RESTRICTED_DELTA0)
    check_monitor(ConservedQuantity.DELTA0_FIRST_INTEGRAL, restricted)
    with pytest.raises(ConfigError):
        check_monitor("B_xdxy", restricted)
    with pytest.raises(ConfigError):
        check_monitor("delta0_first_integral", builtin_field(BuiltinField.RA))
    trajectory = integrate_field(restricted, (0.5, 0.1), length=0.1)
    with pytest.raises(ConfigError):
        conservation_monitor(trajectory, ConservedQuantity.HALPHEN_PLANE_FIRST_INTEGRAL)
