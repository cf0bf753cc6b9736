from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from sympy import QQ

from project.exceptions import DegenerateFormError
from project.gauss_manin.connection import ConnectionMatrix, derive_connection
from project.gauss_manin.families import FAMILY_W
from project.gauss_manin.fixtures import load_fixtures
from project.symbolic.forms import DifferentialForm1, exterior_derivative
from project.symbolic.parser import format_polynomial
from project.symbolic.rational import (
    FIELD,
    RING,
    T1,
    T2,
    T3,
    MultiPoly,
    RationalFunction,
    as_polynomial,
    as_rational,
    restrict_t0,
)

# Ring generators for t1, t2, t3.
_T_RING = RING.gens[1:4]


@dataclass(frozen=True, slots=True)
class FormSpec:
    """The class p1 dx/y + p2 x dx/y."""

    p1: RationalFunction
    p2: RationalFunction

    def __post_init__(self) -> None:
        if not self.p1 and not self.p2:
            raise DegenerateFormError("p1 and p2 are both zero")


@dataclass(frozen=True, slots=True)
class NotInvariant:
    remainder: MultiPoly


@dataclass(frozen=True, slots=True)
class FoliationField:
    """Polynomial vector field X1 d/dt1 + X2 d/dt2 + X3 d/dt3 on the slice t0 = 1."""

    components: tuple[MultiPoly, MultiPoly, MultiPoly]

    @classmethod
    def of(
        cls, components: tuple[RationalFunction, RationalFunction, RationalFunction]
    ) -> FoliationField:
        x1, x2, x3 = (as_polynomial(c) for c in components)
        return cls((x1, x2, x3))

    def normalized(self) -> FoliationField:
        """Divide out the polynomial gcd and rational content; first leading term positive."""

        nonzero = [p for p in self.components if p]
        if not nonzero:
            raise DegenerateFormError("vector field is identically zero")
        common = reduce(lambda a, b: a.gcd(b), nonzero)
        polys = [p.exquo(common) if p else p for p in self.components]
        content = reduce(QQ.gcd, (c for p in polys for c in p.coeffs()))
        polys = [p.quo_ground(content) for p in polys]
        lead = next(p for p in polys if p).LC
        if lead < 0:
            polys = [-p for p in polys]
        return FoliationField((polys[0], polys[1], polys[2]))

    def cross(self, other: FoliationField) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        a1, a2, a3 = self.components
        b1, b2, b3 = other.components
        return a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1

    def is_parallel(self, other: FoliationField) -> bool:
        return not any(self.cross(other))

    def derivative_of(self, f: RationalFunction | MultiPoly) -> RationalFunction:
        """X(f), the derivative of f along the field."""

        f = as_rational(f)
        out = FIELD.zero
        for gen, comp in zip((T1, T2, T3), self.components):
            out += f.diff(gen) * comp
        return out

    def formatted(self) -> list[str]:
        return [format_polynomial(p) for p in self.components]


def reference_field(name: str) -> FoliationField:
    return FoliationField.of(load_fixtures().fields[name])


def reference_form(name: str) -> FormSpec:
    p1, p2 = load_fixtures().forms[name]
    return FormSpec(p1=p1, p2=p2)


def _defining_forms(form: FormSpec, connection: ConnectionMatrix) -> list[DifferentialForm1]:
    p = (restrict_t0(form.p1), restrict_t0(form.p2))
    b = connection.entries
    return [
        exterior_derivative(p[j]) + b[0][j].scale(p[0]) + b[1][j].scale(p[1]) for j in range(2)
    ]


def foliation_from_form(form: FormSpec) -> FoliationField:
    """
    Field tangent to the loci where the periods of p1 dx/y + p2 x dx/y are constant:
    the kernel of dp_j + p1 w_1j + p2 w_2j (j = 1, 2) on t0 = 1.
    """

    connection = derive_connection(FAMILY_W).restrict_t0_one()
    alpha, beta = _defining_forms(form, connection)
    a = alpha.coefficients[1:]
    b = beta.coefficients[1:]
    cross = (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
    if not any(cross):
        raise DegenerateFormError("the two defining 1-forms are linearly dependent")
    common = reduce(lambda u, v: u.lcm(v), (c.denom for c in cross))
    x1, x2, x3 = (c.numer * common.exquo(c.denom) for c in cross)
    return FoliationField((x1, x2, x3)).normalized()


def invariant_cofactor(
    v: RationalFunction | MultiPoly, field: FoliationField
) -> RationalFunction | NotInvariant:
    """c with X(V) = c V when V divides X(V), else the division remainder."""

    poly = as_polynomial(v)
    if not poly:
        raise ValueError("V must be nonzero")
    derivative = as_polynomial(field.derivative_of(poly))
    quotient, remainder = derivative.div(poly)
    if remainder:
        return NotInvariant(remainder=remainder)
    return as_rational(quotient)


def singular_curve_check(field: FoliationField) -> bool:
    """True when the field vanishes on t2 = 12 t1^2, t3 = 8 t1^3."""

    t1, t2, t3 = _T_RING
    on_curve = [(t2, 12 * t1**2), (t3, 8 * t1**3)]
    return not any(p.compose(on_curve) for p in field.components)
