from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum


class ExitCode(IntEnum):
    VERIFICATION_FAILED = 1
    USAGE = 2
    NUMERIC = 3


class ModularFoliationError(Exception):
    """Base exception for controlled failures."""


class ConfigError(ModularFoliationError):
    """Configuration file or environment is invalid."""


@dataclass(frozen=True, slots=True)
class ExpressionParseError(ModularFoliationError):
    message: str
    position: int

    def __str__(self) -> str:  # pragma: no cover
        return f"{self.message} at position {self.position}"


@dataclass(frozen=True, slots=True)
class UnknownVariableError(ModularFoliationError):
    name: str
    position: int

    def __str__(self) -> str:  # pragma: no cover
        return f"unknown variable {self.name!r} at position {self.position}"


@dataclass(frozen=True, slots=True)
class PoleError(ModularFoliationError):
    modulus: float

    def __str__(self) -> str:  # pragma: no cover
        return f"denominator vanishes at point (|den| = {self.modulus:.3e})"


@dataclass(frozen=True, slots=True)
class MissingCoordinateError(ModularFoliationError):
    name: str

    def __str__(self) -> str:  # pragma: no cover
        return f"point has no value for variable {self.name!r}"


class BezoutInfeasibleError(ModularFoliationError):
    """Target is not in the ideal generated by p and p' within the degree caps."""


class SingularMatrixError(ModularFoliationError):
    """Basis change matrix has zero determinant."""


class DegenerateFormError(ModularFoliationError):
    """The two defining 1-forms of a modular foliation are linearly dependent."""


@dataclass(frozen=True, slots=True)
class UnsupportedPoleOrderError(ModularFoliationError):
    pole_power: int

    def __str__(self) -> str:  # pragma: no cover
        return f"pole power must be 1 or 3 (got {self.pole_power})"


class NumericalError(ModularFoliationError):
    """A numeric routine could not deliver a value within its contract."""


class RootFindingError(NumericalError):
    """Polished cubic roots do not meet the residual bound."""


@dataclass(frozen=True, slots=True)
class DiscriminantTooSmallError(NumericalError):
    discriminant: complex
    scale: float

    def __str__(self) -> str:  # pragma: no cover
        return f"|discriminant| = {abs(self.discriminant):.3e} below 1e-8 * {self.scale:.3e}"


class IllConditionedCyclesError(NumericalError):
    """A root lies too close to a cycle segment."""


class QuadratureError(NumericalError):
    """Node doubling did not converge."""


class ToleranceUnreachableError(NumericalError):
    """Series truncation cannot reach the requested tolerance."""


@dataclass(frozen=True, slots=True)
class UpperHalfPlaneError(NumericalError):
    z: complex

    def __str__(self) -> str:  # pragma: no cover
        return f"Im(z) must be positive (z = {self.z})"


class RootCollisionError(NumericalError):
    """Roots came closer than the labelling can resolve."""


class ReductionLimitError(NumericalError):
    """SL(2,Z) reduction exceeded its step guard."""


class MonodromyError(NumericalError):
    """Matrix is not in SL(2,Z)."""


class PeriodDomainError(NumericalError):
    """Period matrix violates the period-domain conditions."""


class StepSizeUnderflowError(NumericalError):
    """Adaptive integrator could not take a step."""


@dataclass(frozen=True, slots=True)
class BoundingBoxExitError(NumericalError):
    arc: float
    bound: float

    def __str__(self) -> str:  # pragma: no cover
        return f"trajectory left |t| <= {self.bound:g} at s = {self.arc:.6g}"


class DegenerateCurveError(NumericalError):
    """Vector field vanishes along the sampled curve."""


class ReportWriteError(ModularFoliationError):
    """Report or trajectory file could not be written."""


def exit_code_for_report(*, saw_failure: bool, saw_error: bool) -> int:
    """
    Decide final exit code for a verification run.

    A failing check outranks a numeric error: both are reported, failures are the headline.
    """

    if saw_failure:
        return int(ExitCode.VERIFICATION_FAILED)
    if saw_error:
        return int(ExitCode.NUMERIC)
    return 0
