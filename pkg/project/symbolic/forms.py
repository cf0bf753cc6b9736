from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from project.symbolic.rational import FIELD, T_GENERATORS, RationalFunction, restrict_t0

# dt_i ^ dt_j storage order, i < j.
SLOTS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _zeros(n: int) -> tuple[RationalFunction, ...]:
    return tuple(FIELD.zero for _ in range(n))


@dataclass(frozen=True, slots=True)
class DifferentialForm1:
    """Coefficients on dt0, dt1, dt2, dt3."""

    coefficients: tuple[RationalFunction, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) != 4:
            raise ValueError("a 1-form carries exactly four coefficients")

    @classmethod
    def zero(cls) -> DifferentialForm1:
        return cls(_zeros(4))

    @classmethod
    def of(cls, components: Mapping[int, RationalFunction | int]) -> DifferentialForm1:
        """Build from {index: coefficient}; missing indices are zero."""

        return cls(tuple(FIELD(components.get(i, 0)) for i in range(4)))

    def __getitem__(self, index: int) -> RationalFunction:
        return self.coefficients[index]

    def __add__(self, other: DifferentialForm1) -> DifferentialForm1:
        return DifferentialForm1(
            tuple(a + b for a, b in zip(self.coefficients, other.coefficients))
        )

    def __sub__(self, other: DifferentialForm1) -> DifferentialForm1:
        return DifferentialForm1(
            tuple(a - b for a, b in zip(self.coefficients, other.coefficients))
        )

    def __neg__(self) -> DifferentialForm1:
        return DifferentialForm1(tuple(-a for a in self.coefficients))

    def scale(self, factor: RationalFunction | int) -> DifferentialForm1:
        return DifferentialForm1(tuple(a * factor for a in self.coefficients))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def restrict_t0_one(self) -> DifferentialForm1:
        """Pull back to t0 = 1: substitute and drop the dt0 coefficient."""

        return DifferentialForm1((FIELD.zero, *(restrict_t0(a) for a in self.coefficients[1:])))


@dataclass(frozen=True, slots=True)
class DifferentialForm2:
    """Coefficients on the bivectors listed in SLOTS."""

    coefficients: tuple[RationalFunction, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(SLOTS):
            raise ValueError("a 2-form carries exactly six coefficients")

    @classmethod
    def zero(cls) -> DifferentialForm2:
        return cls(_zeros(len(SLOTS)))

    def slot(self, i: int, j: int) -> RationalFunction:
        if i == j:
            return FIELD.zero
        if i > j:
            return -self.coefficients[SLOTS.index((j, i))]
        return self.coefficients[SLOTS.index((i, j))]

    def __add__(self, other: DifferentialForm2) -> DifferentialForm2:
        return DifferentialForm2(
            tuple(a + b for a, b in zip(self.coefficients, other.coefficients))
        )

    def __sub__(self, other: DifferentialForm2) -> DifferentialForm2:
        return DifferentialForm2(
            tuple(a - b for a, b in zip(self.coefficients, other.coefficients))
        )

    def __neg__(self) -> DifferentialForm2:
        return DifferentialForm2(tuple(-a for a in self.coefficients))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def first_nonzero(self) -> tuple[tuple[int, int], RationalFunction] | None:
        for slot, value in zip(SLOTS, self.coefficients):
            if value:
                return slot, value
        return None


def exterior_derivative(f: RationalFunction) -> DifferentialForm1:
    return DifferentialForm1(tuple(f.diff(g) for g in T_GENERATORS))


def exterior_derivative_form(a: DifferentialForm1) -> DifferentialForm2:
    g = T_GENERATORS
    return DifferentialForm2(tuple(a[j].diff(g[i]) - a[i].diff(g[j]) for i, j in SLOTS))


def wedge(a: DifferentialForm1, b: DifferentialForm1) -> DifferentialForm2:
    return DifferentialForm2(tuple(a[i] * b[j] - a[j] * b[i] for i, j in SLOTS))


def contract(a: DifferentialForm1, vector: Sequence[RationalFunction]) -> RationalFunction:
    """
    a(X) for X given on (dt1, dt2, dt3) when it has three entries, or on all four
    coordinates otherwise.
    """

    if len(vector) == 3:
        offset = 1
    elif len(vector) == 4:
        offset = 0
    else:
        raise ValueError("vector must have 3 or 4 components")
    out = FIELD.zero
    for k, value in enumerate(vector):
        out += a[k + offset] * value
    return out
