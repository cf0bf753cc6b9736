from __future__ import annotations

import argparse
import re

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_LITERAL = re.compile(rf"^(?:[+-]?{_NUMBER}(?:[+-]{_NUMBER}?j)?|[+-]?(?:{_NUMBER})?j)$")


def parse_complex(text: str) -> complex:
    """
    Decimal complex literal: "a", "a+bi", "a-bi", "bi", "i".
    `j` is accepted in place of `i`.
    """

    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    if not _LITERAL.match(s):
        raise argparse.ArgumentTypeError(f"not a complex literal: {text!r}")
    return complex(s)


def parse_point(text: str) -> tuple[complex, ...]:
    """Comma-separated complex coordinates, e.g. "0,4,1" or "1+0.2i,12,8"."""

    parts = text.split(",")
    if any(not p.strip() for p in parts):
        raise argparse.ArgumentTypeError(f"empty coordinate in {text!r}")
    return tuple(parse_complex(p) for p in parts)


def parse_triple(text: str) -> tuple[complex, complex, complex]:
    point = parse_point(text)
    if len(point) != 3:
        raise argparse.ArgumentTypeError(f"expected 3 coordinates, got {len(point)}")
    return point[0], point[1], point[2]


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from e
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0 (got {text})")
    return value
