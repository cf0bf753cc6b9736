from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from fractions import Fraction
from functools import lru_cache
from typing import Any, TypeAlias

from sympy import QQ, horner, lambdify
from sympy.polys.fields import FracElement, field
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement

from project.exceptions import MissingCoordinateError, PoleError

VARIABLES: tuple[str, ...] = ("t0", "t1", "t2", "t3", "s", "x")

# Graded-lex with t0 < t1 < t2 < t3 < s < x; FracElement keeps num/den cancelled, so equal
# rational functions have identical representations.
FIELD, T0, T1, T2, T3, S, X = field(",".join(VARIABLES), QQ, grlex)
RING = FIELD.ring
T_GENERATORS = (T0, T1, T2, T3)
X_INDEX = VARIABLES.index("x")

MultiPoly: TypeAlias = PolyElement
RationalFunction: TypeAlias = FracElement

POLE_THRESHOLD = 1e-12


def rational(value: int | Fraction | str) -> RationalFunction:
    """Exact scalar as a constant rational function ("1/12" and Fraction both accepted)."""

    q = Fraction(value)
    return FIELD(QQ(q.numerator, q.denominator))


def as_rational(value: RationalFunction | MultiPoly | int) -> RationalFunction:
    if isinstance(value, FracElement):
        return value
    if isinstance(value, PolyElement):
        return FIELD.new(value, RING.one)
    return FIELD(value)


def as_polynomial(value: RationalFunction | MultiPoly) -> MultiPoly:
    if isinstance(value, PolyElement):
        return value
    if value.denom.is_ground:
        return value.numer.quo_ground(value.denom.LC)
    raise ValueError("rational function has a non-constant denominator")


def restrict_t0(f: RationalFunction) -> RationalFunction:
    """Specialize to the t0 = 1 slice."""

    return f.subs(T0, 1)


def coefficients_in_x(f: RationalFunction) -> list[RationalFunction]:
    """
    Coefficients c_0..c_d of f = sum c_j x^j over Q(t0, t1, t2, t3, s).

    The zero function gives [0]; a denominator involving x is rejected.
    """

    if f.denom.degree(X_INDEX) > 0:
        raise ValueError("denominator depends on x")
    if not f.numer:
        return [FIELD.zero]
    degree = int(f.numer.degree(X_INDEX))
    buckets = [RING.zero for _ in range(degree + 1)]
    for monom, coeff in f.numer.terms():
        rest = monom[:X_INDEX] + (0,) + monom[X_INDEX + 1 :]
        buckets[monom[X_INDEX]] += RING.term_new(rest, coeff)
    return [FIELD.new(bucket, f.denom) for bucket in buckets]


def from_coefficients_in_x(
    coefficients: Sequence[RationalFunction], *, center: RationalFunction | None = None
) -> RationalFunction:
    shift = X - (center if center is not None else FIELD.zero)
    out = FIELD.zero
    for c in reversed(coefficients):
        out = out * shift + c
    return out


def used_variables(f: RationalFunction | MultiPoly) -> list[str]:
    polys: Iterable[MultiPoly] = (f,) if isinstance(f, PolyElement) else (f.numer, f.denom)
    seen = {
        VARIABLES[i]
        for monom in itertools.chain.from_iterable(p.itermonoms() for p in polys)
        for i, e in enumerate(monom)
        if e
    }
    return [name for name in VARIABLES if name in seen]


@lru_cache(maxsize=4096)
def compile_polynomial(poly: MultiPoly) -> Callable[..., Any]:
    """Horner-form numpy callable taking one argument per entry of VARIABLES."""

    expr = horner(poly.as_expr(), *RING.symbols) if not poly.is_ground else poly.as_expr()
    return lambdify(RING.symbols, expr, "numpy")


def compile_rational(f: RationalFunction) -> Callable[..., Any]:
    """Vectorized evaluation of f (no pole check); arguments follow VARIABLES order."""

    num = compile_polynomial(f.numer)
    den = compile_polynomial(f.denom)

    def _call(*values: Any) -> Any:
        return num(*values) / den(*values)

    return _call


def _magnitude(poly: MultiPoly, values: Sequence[complex]) -> float:
    total = 0.0
    for monom, coeff in poly.terms():
        term = abs(float(coeff))
        for v, e in zip(values, monom):
            if e:
                term *= abs(v) ** e
        total += term
    return total


def evaluate(f: RationalFunction | MultiPoly, point: Mapping[str, complex]) -> complex:
    """
    Evaluate at a point given by variable name.

    Variables the function does not use may be omitted. The denominator must exceed
    1e-12 times the sum of its term magnitudes, otherwise PoleError is raised.
    """

    f = as_rational(f)
    for name in used_variables(f):
        if name not in point:
            raise MissingCoordinateError(name)
    values = tuple(complex(point.get(name, 0.0)) for name in VARIABLES)
    den = complex(compile_polynomial(f.denom)(*values))
    scale = _magnitude(f.denom, values) or 1.0
    if abs(den) <= POLE_THRESHOLD * scale:
        raise PoleError(abs(den))
    return complex(compile_polynomial(f.numer)(*values)) / den


def t_point(t: Sequence[complex], *, t0: complex = 1.0, s: complex = 0.0) -> dict[str, complex]:
    """Point mapping for (t1, t2, t3) on the slice t0 = const."""

    t1, t2, t3 = t
    return {"t0": t0, "t1": t1, "t2": t2, "t3": t3, "s": s}
