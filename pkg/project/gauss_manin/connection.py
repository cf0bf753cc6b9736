from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from enum import StrEnum
from functools import lru_cache

from sympy.polys.matrices import DomainMatrix

from project.exceptions import SingularMatrixError, UnsupportedPoleOrderError
from project.gauss_manin.families import FAMILY_W, FamilyLabel, FamilySpec, w_discriminant_t0_one
from project.gauss_manin.fixtures import Matrix2, load_fixtures
from project.symbolic.bezout import bezout_decompose
from project.symbolic.forms import (
    DifferentialForm1,
    DifferentialForm2,
    exterior_derivative,
    exterior_derivative_form,
    wedge,
)
from project.symbolic.rational import (
    FIELD,
    T1,
    T2,
    T3,
    T_GENERATORS,
    X,
    RationalFunction,
    coefficients_in_x,
    rational,
)

Row = tuple[DifferentialForm1, DifferentialForm1]
Pair = tuple[RationalFunction, RationalFunction]


class BasisLabel(StrEnum):
    OMEGA = "omega"  # (dx/y, x dx/y)
    ETA = "eta"  # S (dx/y, x dx/y)


@dataclass(frozen=True, slots=True)
class ConnectionMatrix:
    """nabla w = B w with B a 2x2 matrix of 1-forms; row i differentiates w_i."""

    entries: tuple[Row, Row]
    basis: BasisLabel

    @classmethod
    def from_components(
        cls, components: Mapping[int, Matrix2], *, basis: BasisLabel
    ) -> ConnectionMatrix:
        def _form(i: int, j: int) -> DifferentialForm1:
            return DifferentialForm1.of({k: m[i][j] for k, m in components.items()})

        return cls(
            entries=((_form(0, 0), _form(0, 1)), (_form(1, 0), _form(1, 1))),
            basis=basis,
        )

    def entry(self, i: int, j: int) -> DifferentialForm1:
        return self.entries[i][j]

    def component(self, k: int) -> Matrix2:
        """Coefficient matrix of dt_k."""

        (a, b), (c, d) = self.entries
        return (a[k], b[k]), (c[k], d[k])

    def restrict_t0_one(self) -> ConnectionMatrix:
        (a, b), (c, d) = self.entries
        return ConnectionMatrix(
            entries=(
                (a.restrict_t0_one(), b.restrict_t0_one()),
                (c.restrict_t0_one(), d.restrict_t0_one()),
            ),
            basis=self.basis,
        )

    def perturbed(self, *, k: int, i: int, j: int, delta: RationalFunction) -> ConnectionMatrix:
        """Copy with delta added to the dt_k coefficient of entry (i, j)."""

        rows = [list(row) for row in self.entries]
        rows[i][j] = rows[i][j] + DifferentialForm1.of({k: delta})
        return ConnectionMatrix(
            entries=((rows[0][0], rows[0][1]), (rows[1][0], rows[1][1])), basis=self.basis
        )


@dataclass(frozen=True, slots=True)
class IntegrabilityReport:
    passed: bool
    entry: tuple[int, int] | None = None
    slot: tuple[int, int] | None = None
    residual: RationalFunction = FIELD.zero


@lru_cache(maxsize=8)
def _bezout_pair(spec: FamilySpec) -> Pair:
    return bezout_decompose(spec.discriminant, spec.polynomial, spec.p_prime)


def _reduce_simple_pole(numerator: RationalFunction, p: RationalFunction) -> Pair:
    # Subtract d(x^m y) = (m x^(m-1) p + x^m p'/2) dx/y until deg_x <= 1.
    lead = coefficients_in_x(p)[3]
    p_prime = p.diff(X)
    coeffs = coefficients_in_x(numerator)
    while len(coeffs) > 2:
        m = len(coeffs) - 3
        factor = coeffs[-1] / (rational(2 * m + 3) / 2 * lead)
        exact = X**m * p_prime / 2
        if m:
            exact += m * X ** (m - 1) * p
        numerator = numerator - factor * exact
        coeffs = coefficients_in_x(numerator)
    coeffs += [FIELD.zero] * (2 - len(coeffs))
    return coeffs[0], coeffs[1]


def reduce_second_kind(numerator: RationalFunction, pole_power: int, spec: FamilySpec) -> Pair:
    """
    Coefficients (c1, c2) with numerator dx/y^pole_power = c1 dx/y + c2 x dx/y modulo
    relatively exact forms.
    """

    if pole_power not in (1, 3):
        raise UnsupportedPoleOrderError(pole_power)
    if pole_power == 3:
        # q dx/y^3 = q (-p' a1 + p a2) dx/(D y^3) and q a1 p' dx/y^3 = 2 (q a1)' dx/y.
        a1, a2 = _bezout_pair(spec)
        numerator = (numerator * a2 - 2 * (numerator * a1).diff(X)) / spec.discriminant
    return _reduce_simple_pole(numerator, spec.polynomial)


@lru_cache(maxsize=8)
def _derive_omega(spec: FamilySpec) -> ConnectionMatrix:
    components: dict[int, Matrix2] = {}
    for k in spec.directions:
        dp = spec.polynomial.diff(T_GENERATORS[k])
        row0 = reduce_second_kind(-dp / 2, 3, spec)
        row1 = reduce_second_kind(-X * dp / 2, 3, spec)
        components[k] = (row0, row1)
    return ConnectionMatrix.from_components(components, basis=BasisLabel.OMEGA)


def basis_change_matrix() -> Matrix2:
    return load_fixtures().basis_change


def derive_connection(spec: FamilySpec, basis: BasisLabel = BasisLabel.OMEGA) -> ConnectionMatrix:
    """
    Gauss-Manin connection of a family: differentiate the basis integrands in each parameter
    and reduce back to (dx/y, x dx/y).
    """

    if basis is BasisLabel.OMEGA:
        return _derive_omega(spec)
    if spec.label is not FamilyLabel.W:
        raise ValueError("the eta basis is defined for the W family only")
    return change_basis(_derive_omega(spec), basis_change_matrix(), basis=BasisLabel.ETA)


def check_integrability(connection: ConnectionMatrix) -> IntegrabilityReport:
    """dB - B ^ B entry by entry; the first nonzero coefficient is the counterexample."""

    b = connection.entries
    for i in range(2):
        for j in range(2):
            curvature: DifferentialForm2 = exterior_derivative_form(b[i][j])
            curvature = curvature - wedge(b[i][0], b[0][j]) - wedge(b[i][1], b[1][j])
            hit = curvature.first_nonzero()
            if hit is not None:
                slot, value = hit
                return IntegrabilityReport(passed=False, entry=(i, j), slot=slot, residual=value)
    return IntegrabilityReport(passed=True)


def determinant2(m: Matrix2) -> RationalFunction:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def inverse2(m: Matrix2) -> Matrix2:
    det = determinant2(m)
    if not det:
        raise SingularMatrixError("basis change matrix is singular")
    return (m[1][1] / det, -m[0][1] / det), (-m[1][0] / det, m[0][0] / det)


def change_basis(
    connection: ConnectionMatrix, s: Matrix2, *, basis: BasisLabel = BasisLabel.ETA
) -> ConnectionMatrix:
    """Connection in the basis S w: (dS + S B) S^-1."""

    s_inv = inverse2(s)
    b = connection.entries
    m = [
        [
            exterior_derivative(s[i][j]) + b[0][j].scale(s[i][0]) + b[1][j].scale(s[i][1])
            for j in range(2)
        ]
        for i in range(2)
    ]
    out = [
        [m[i][0].scale(s_inv[0][j]) + m[i][1].scale(s_inv[1][j]) for j in range(2)]
        for i in range(2)
    ]
    return ConnectionMatrix(entries=((out[0][0], out[0][1]), (out[1][0], out[1][1])), basis=basis)


def covariant_derivative(connection: ConnectionMatrix, direction: int, v: Pair) -> Pair:
    """Coefficients of nabla_{d/dt_k}(v0 w0 + v1 w1) in the same basis."""

    g = T_GENERATORS[direction]
    (b00, b01), (b10, b11) = connection.component(direction)
    return (
        v[0].diff(g) + v[0] * b00 + v[1] * b10,
        v[1].diff(g) + v[0] * b01 + v[1] * b11,
    )


def stacked_determinant(
    connection: ConnectionMatrix, discriminant: RationalFunction
) -> RationalFunction:
    """det of the 4x4 matrix whose k-th row is the flattened discriminant * B_k."""

    domain = FIELD.to_domain()
    rows = []
    for k in range(4):
        (a, b), (c, d) = connection.component(k)
        rows.append([domain.convert(e * discriminant) for e in (a, b, c, d)])
    return FIELD(DomainMatrix(rows, (4, 4), domain).det())


def connection_from_fixture(
    components: Mapping[int, Matrix2], discriminant: RationalFunction, *, basis: BasisLabel
) -> ConnectionMatrix:
    scaled = {
        k: ((a / discriminant, b / discriminant), (c / discriminant, d / discriminant))
        for k, ((a, b), (c, d)) in components.items()
    }
    return ConnectionMatrix.from_components(scaled, basis=basis)


def reference_connection(basis: BasisLabel = BasisLabel.OMEGA) -> ConnectionMatrix:
    """Published W connection in the requested basis."""

    data = load_fixtures()
    components = data.w_omega if basis is BasisLabel.OMEGA else data.w_eta
    return connection_from_fixture(components, FAMILY_W.discriminant, basis=basis)


def reference_l_connection() -> ConnectionMatrix:
    return ConnectionMatrix.from_components(load_fixtures().l_omega, basis=BasisLabel.OMEGA)


def ramanujan_forms() -> tuple[
    DifferentialForm1, DifferentialForm1, DifferentialForm1, DifferentialForm1
]:
    """Four 1-forms on t0 = 1 annihilating the Ramanujan field."""

    x1 = T1**2 - T2 / 12
    x2 = 4 * T1 * T2 - 6 * T3
    x3 = 6 * T1 * T3 - T2**2 / 3
    return (
        DifferentialForm1.of({2: x1, 1: -x2}),
        DifferentialForm1.of({3: x2, 2: -x3}),
        DifferentialForm1.of({3: x1, 1: -x3}),
        DifferentialForm1.of({2: 3 * T3, 3: -2 * T2}),
    )


def connection_from_ramanujan_forms() -> ConnectionMatrix:
    eta1, eta2, eta3, eta4 = ramanujan_forms()
    inv = FIELD.one / w_discriminant_t0_one()
    q = rational("3/4")
    lower_left = (
        eta1.scale(rational("9/2") * T3) - eta3.scale(3 * T2) + eta2.scale(rational("3/2") * T1)
    )
    return ConnectionMatrix(
        entries=(
            (eta2.scale(q * inv), eta4.scale(rational("3/2") * inv)),
            (lower_left.scale(inv), eta2.scale(-q * inv)),
        ),
        basis=BasisLabel.OMEGA,
    )
