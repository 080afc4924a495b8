"""
Recursive descent parser for the expression input language.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' uint)?
    base   := uint | 'sqrt2' | 'sqrt3' | 'sqrt6' | 'x1'..'x5' | '(' expr ')'

A rational constant p/q is read as a division of two integers. Negation
binds looser than '^', so '-x1^2' is -(x1^2).
"""
from __future__ import annotations

import re
from typing import Mapping

from g2conformal.constants import ODE_VARIABLE_ALIASES, VARIABLE_NAMES
from g2conformal.exceptions import DivisionByZeroError, ExpressionSyntaxError
from g2conformal.scalars.algscalar import SQRT2, SQRT3, SQRT6
from g2conformal.scalars.ratfn import RatFn

_TOKEN_PATTERN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class Token:
    NUMBER = "number"
    NAME = "name"
    OPERATOR = "operator"
    END = "end"

    def __init__(self, kind: str, text: str, position: int) -> None:
        self.kind = kind
        self.text = text
        self.position = position

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.position})"


def tokenize(text: str) -> list[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_PATTERN.match(text, position)
        if match is None or match.end() == position:
            break
        number, name, other = match.groups()
        start = match.start(match.lastindex)
        if number is not None:
            tokens.append(Token(Token.NUMBER, number, start))
        elif name is not None:
            tokens.append(Token(Token.NAME, name, start))
        elif other is not None:
            if other not in "+-*/^()":
                raise ExpressionSyntaxError(f"Unexpected character {other!r}", start)
            tokens.append(Token(Token.OPERATOR, other, start))
        position = match.end()
    tokens.append(Token(Token.END, "", len(text)))
    return tokens


class ExpressionParser:
    """
    Parses one expression into a normalized RatFn. 'aliases' maps extra
    identifiers onto the coordinate names, e.g. the Monge names x, y, p, q, z.
    """

    constants = {
        "sqrt2": SQRT2,
        "sqrt3": SQRT3,
        "sqrt6": SQRT6,
    }

    def __init__(self, text: str, aliases: Mapping[str, str] = None) -> None:
        self.text = text
        self.aliases = dict(aliases) if aliases else {}
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _accept(self, *operators: str) -> Token | None:
        token = self.current
        if token.kind == Token.OPERATOR and token.text in operators:
            return self._advance()
        return None

    def parse(self) -> RatFn:
        if self.current.kind == Token.END:
            raise ExpressionSyntaxError("Empty expression", self.current.position)
        value = self._expr()
        if self.current.kind != Token.END:
            raise ExpressionSyntaxError(
                f"Unexpected {self.current.text!r}", self.current.position
            )
        return value

    def _expr(self) -> RatFn:
        value = self._term()
        while True:
            token = self._accept("+", "-")
            if token is None:
                return value
            right = self._term()
            value = value + right if token.text == "+" else value - right

    def _term(self) -> RatFn:
        value = self._factor()
        while True:
            token = self._accept("*", "/")
            if token is None:
                return value
            right = self._factor()
            if token.text == "*":
                value = value * right
                continue
            if right.is_zero:
                raise DivisionByZeroError(
                    f"Division by zero at position {token.position} in {self.text!r}"
                )
            value = value / right

    def _factor(self) -> RatFn:
        if self._accept("-") is not None:
            return -self._factor()
        value = self._base()
        if self._accept("^") is not None:
            token = self.current
            if token.kind != Token.NUMBER:
                raise ExpressionSyntaxError("Expected an unsigned integer exponent", token.position)
            self._advance()
            value = value ** int(token.text)
        return value

    def _base(self) -> RatFn:
        token = self.current
        if token.kind == Token.NUMBER:
            self._advance()
            return RatFn.coerce(int(token.text))
        if token.kind == Token.NAME:
            self._advance()
            return self._resolve_name(token)
        if self._accept("(") is not None:
            value = self._expr()
            if self._accept(")") is None:
                raise ExpressionSyntaxError("Expected ')'", self.current.position)
            return value
        if token.kind == Token.END:
            raise ExpressionSyntaxError("Unexpected end of expression", token.position)
        raise ExpressionSyntaxError(f"Unexpected {token.text!r}", token.position)

    def _resolve_name(self, token: Token) -> RatFn:
        name = self.aliases.get(token.text, token.text)
        if name in self.constants:
            return RatFn.coerce(self.constants[name])
        if name in VARIABLE_NAMES:
            return RatFn.variable(VARIABLE_NAMES.index(name) + 1)
        raise ExpressionSyntaxError(f"Unknown identifier {token.text!r}", token.position)


def parse_expr(text: str, *, ode_aliases: bool = False) -> RatFn:
    aliases = ODE_VARIABLE_ALIASES if ode_aliases else None
    return ExpressionParser(text, aliases).parse()
