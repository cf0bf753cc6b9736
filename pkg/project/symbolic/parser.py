"""
Recursive-descent parser for the polynomial grammar used by fixtures and the CLI:

    expr   := ('+' | '-')? term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := rational | var | '(' expr ')'
    rational := int ('/' uint)?

Implicit multiplication ("2t1") and negative exponents are syntax errors.
"""

from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass

from sympy import QQ

from project.exceptions import ExpressionParseError, UnknownVariableError
from project.symbolic.rational import RING, VARIABLES, MultiPoly

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^/()]))")
_END = "end"


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # int | name | op | end
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup or "op"
        tokens.append(_Token(kind=kind, text=m.group(kind), position=m.start(kind)))
        pos = m.end()
    tokens.append(_Token(kind=_END, text="", position=len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], allowed: Sequence[str]) -> None:
        self._tokens = tokens
        self._index = 0
        self._generators = {name: RING.gens[VARIABLES.index(name)] for name in allowed}

    def parse(self) -> MultiPoly:
        value = self._expr()
        tok = self._peek()
        if tok.kind != _END:
            raise ExpressionParseError(f"unexpected {tok.text!r}", tok.position)
        return value

    def _peek(self) -> _Token:
        return self._tokens[self._index]

    def _next(self) -> _Token:
        tok = self._tokens[self._index]
        self._index += 1
        return tok

    def _is_op(self, *ops: str) -> bool:
        tok = self._peek()
        return tok.kind == "op" and tok.text in ops

    def _expect_uint(self, what: str) -> int:
        tok = self._next()
        if tok.kind != "int":
            shown = tok.text if tok.kind != _END else "end of input"
            raise ExpressionParseError(f"expected {what}, got {shown!r}", tok.position)
        return int(tok.text)

    def _expr(self) -> MultiPoly:
        negate = False
        if self._is_op("+", "-"):
            negate = self._next().text == "-"
        value = self._term()
        if negate:
            value = -value
        while self._is_op("+", "-"):
            op = self._next().text
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> MultiPoly:
        value = self._factor()
        while self._is_op("*"):
            self._next()
            value = value * self._factor()
        return value

    def _factor(self) -> MultiPoly:
        base = self._base()
        if self._is_op("^"):
            self._next()
            base = base ** self._expect_uint("exponent")
        return base

    def _base(self) -> MultiPoly:
        tok = self._next()
        if tok.kind == "int":
            num = int(tok.text)
            if self._is_op("/"):
                slash = self._next()
                den = self._expect_uint("denominator")
                if den == 0:
                    raise ExpressionParseError("zero denominator", slash.position)
                return RING.ground_new(QQ(num, den))
            return RING.ground_new(QQ(num))
        if tok.kind == "name":
            gen = self._generators.get(tok.text)
            if gen is None:
                raise UnknownVariableError(tok.text, tok.position)
            return gen
        if tok.kind == "op" and tok.text == "(":
            value = self._expr()
            close = self._next()
            if not (close.kind == "op" and close.text == ")"):
                raise ExpressionParseError("expected ')'", close.position)
            return value
        shown = tok.text if tok.kind != _END else "end of input"
        raise ExpressionParseError(f"unexpected {shown!r}", tok.position)


def parse_expression(text: str, variables: Sequence[str] = VARIABLES) -> MultiPoly:
    unknown = [v for v in variables if v not in VARIABLES]
    if unknown:
        raise ValueError(f"unsupported variable names: {', '.join(unknown)}")
    return _Parser(_tokenize(text), variables).parse()


def _format_scalar(q: object) -> str:
    num, den = QQ.numer(q), QQ.denom(q)
    return str(num) if den == 1 else f"{num}/{den}"


def format_polynomial(p: MultiPoly) -> str:
    """Print p in the parser grammar, terms in descending graded-lex order."""

    if not p:
        return "0"
    out: list[str] = []
    for monom, coeff in p.terms():
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        factors = [
            VARIABLES[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(monom) if e
        ]
        if not factors:
            body = _format_scalar(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = _format_scalar(magnitude) + "*" + "*".join(factors)
        if not out:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)
