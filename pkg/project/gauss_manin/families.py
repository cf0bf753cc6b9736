from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

from project.symbolic.rational import FIELD, T0, T1, T2, T3, X, RationalFunction, rational


class FamilyLabel(StrEnum):
    W = "W"  # shifted Weierstrass: y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3
    L = "L"  # roots: y^2 = 4 (x - t1)(x - t2)(x - t3), t0 = 1 slice


@dataclass(frozen=True, slots=True)
class FamilySpec:
    """
    One elliptic family y^2 = polynomial(x). W keeps t0 free; L lives on the t0 = 1 slice, so its
    polynomial and discriminant carry no t0 and it has no dt0 direction.
    """

    label: FamilyLabel
    polynomial: RationalFunction
    discriminant: RationalFunction
    # Parameter indices that carry a connection component.
    directions: tuple[int, ...]

    @property
    def p_prime(self) -> RationalFunction:
        return self.polynomial.diff(X)


FAMILY_W = FamilySpec(
    label=FamilyLabel.W,
    polynomial=4 * T0 * (X - T1) ** 3 - T2 * (X - T1) - T3,
    discriminant=T0 * (27 * T0 * T3**2 - T2**3),
    directions=(0, 1, 2, 3),
)

# t0 = 1 slice: the general-t0 root family is never derived.
FAMILY_L = FamilySpec(
    label=FamilyLabel.L,
    polynomial=4 * (X - T1) * (X - T2) * (X - T3),
    discriminant=rational("-16/27") * ((T1 - T2) * (T2 - T3) * (T3 - T1)) ** 2,
    directions=(1, 2, 3),
)


def family(label: FamilyLabel | str) -> FamilySpec:
    return FAMILY_W if FamilyLabel(label) is FamilyLabel.W else FAMILY_L


def w_discriminant_t0_one() -> RationalFunction:
    """27 t3^2 - t2^3, the discriminant on the t0 = 1 slice."""

    return 27 * T3**2 - T2**3


def l_to_w(theta: tuple[RationalFunction, RationalFunction, RationalFunction]) -> tuple[
    RationalFunction, RationalFunction, RationalFunction
]:
    """
    Parameters of the W curve isomorphic to the L curve with roots theta (t0 = 1).

    Works on any values supporting ring arithmetic, so exact and complex inputs share it.
    """

    t1, t2, t3 = theta
    g1 = (t1 + t2 + t3) / 3
    e1, e2, e3 = t1 - g1, t2 - g1, t3 - g1
    g2 = -4 * (e1 * e2 + e1 * e3 + e2 * e3)
    g3 = 4 * e1 * e2 * e3
    return g1, g2, g3


def l_to_w_discriminant_defect() -> RationalFunction:
    """Pulled-back W discriminant minus 27 times the L discriminant; zero when consistent."""

    _, g2, g3 = l_to_w((FIELD(T1), FIELD(T2), FIELD(T3)))
    return 27 * g3**2 - g2**3 - 27 * FAMILY_L.discriminant
