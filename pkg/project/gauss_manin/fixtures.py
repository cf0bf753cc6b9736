from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Any

import yaml

from project.exceptions import ConfigError
from project.symbolic.parser import parse_expression
from project.symbolic.rational import FIELD, RationalFunction, as_rational

Row2 = tuple[RationalFunction, RationalFunction]
Matrix2 = tuple[Row2, Row2]
IntMatrix = tuple[tuple[int, int], tuple[int, int]]
Triple = tuple[RationalFunction, RationalFunction, RationalFunction]

_RESOURCE = "fixtures.yaml"


@dataclass(frozen=True, slots=True)
class Fixtures:
    w_omega: dict[int, Matrix2]
    w_eta: dict[int, Matrix2]
    basis_change: Matrix2
    l_omega: dict[int, Matrix2]
    fields: dict[str, Triple]
    forms: dict[str, tuple[RationalFunction, RationalFunction]]
    sl2z: dict[str, IntMatrix]
    gamma2: tuple[IntMatrix, ...]


def _entry(raw: Any) -> RationalFunction:
    if isinstance(raw, str):
        return as_rational(parse_expression(raw))
    if isinstance(raw, list) and len(raw) == 2:
        return as_rational(parse_expression(raw[0])) / as_rational(parse_expression(raw[1]))
    raise ConfigError(f"Invalid fixture entry: {raw!r}")


def _matrix(raw: Any) -> Matrix2:
    (a, b), (c, d) = raw
    return (_entry(a), _entry(b)), (_entry(c), _entry(d))


def _int_matrix(raw: Any) -> IntMatrix:
    (a, b), (c, d) = raw
    return (int(a), int(b)), (int(c), int(d))


def _scaled(matrix: Matrix2, factor: RationalFunction) -> Matrix2:
    (a, b), (c, d) = matrix
    return (a * factor, b * factor), (c * factor, d * factor)


@lru_cache(maxsize=1)
def load_fixtures() -> Fixtures:
    text = resources.files("project.gauss_manin").joinpath(_RESOURCE).read_text(encoding="utf-8")
    try:
        raw: Any = yaml.safe_load(text)
    except yaml.YAMLError as e:  # pragma: no cover
        raise ConfigError(f"Invalid YAML in {_RESOURCE}") from e

    l_omega = {
        int(k): _scaled(_matrix(v["matrix"]), FIELD.one / _entry(v["denominator"]))
        for k, v in raw["l_omega"].items()
    }
    return Fixtures(
        w_omega={int(k): _matrix(v) for k, v in raw["w_omega"].items()},
        w_eta={int(k): _matrix(v) for k, v in raw["w_eta"].items()},
        basis_change=_matrix(raw["basis_change"]),
        l_omega=l_omega,
        fields={
            name: (_entry(x1), _entry(x2), _entry(x3))
            for name, (x1, x2, x3) in raw["fields"].items()
        },
        forms={name: (_entry(p1), _entry(p2)) for name, (p1, p2) in raw["forms"].items()},
        sl2z={name: _int_matrix(m) for name, m in raw["monodromy"]["sl2z"].items()},
        gamma2=tuple(_int_matrix(m) for m in raw["monodromy"]["gamma2"]),
    )
