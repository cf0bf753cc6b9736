from __future__ import annotations

import numpy as np
import numpy.typing as npt

from project.exceptions import MonodromyError
from project.gauss_manin.fixtures import IntMatrix, load_fixtures

IntArray = npt.NDArray[np.int64]
_MINUS_I = -np.eye(2, dtype=np.int64)


def as_sl2z(matrix: IntMatrix | IntArray) -> IntArray:
    m = np.asarray(matrix, dtype=np.int64)
    if m.shape != (2, 2):
        raise MonodromyError(f"expected a 2x2 matrix, got shape {m.shape}")
    det = int(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if det != 1:
        raise MonodromyError(f"determinant must be 1 (got {det})")
    return m


def sl2z_inverse(matrix: IntMatrix | IntArray) -> IntArray:
    m = as_sl2z(matrix)
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=np.int64)


def in_gamma2(matrix: IntMatrix | IntArray) -> bool:
    m = as_sl2z(matrix)
    return bool(np.all((m - np.eye(2, dtype=np.int64)) % 2 == 0))


def monodromy_relations() -> dict[str, bool]:
    """Relations among the stored generators, by name."""

    data = load_fixtures()
    a1, a2 = as_sl2z(data.sl2z["a1"]), as_sl2z(data.sl2z["a2"])
    g1, g2 = as_sl2z(data.sl2z["g1"]), as_sl2z(data.sl2z["g2"])
    a1_inv, a2_inv = sl2z_inverse(a1), sl2z_inverse(a2)
    return {
        "g1_from_a": bool(np.array_equal(a2_inv @ a1_inv @ a2_inv, g1)),
        "g2_from_a": bool(np.array_equal(a1_inv @ a2_inv, g2)),
        "g1_squared": bool(np.array_equal(g1 @ g1, _MINUS_I)),
        "g2_cubed": bool(np.array_equal(g2 @ g2 @ g2, _MINUS_I)),
        "gamma2_congruence": all(in_gamma2(m) for m in data.gamma2),
    }
