"""A small parser for polynomial expressions such as ``y*z^2 + 1/2``."""

from __future__ import annotations

import re
from fractions import Fraction

from .mpoly import MPoly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def _tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected character {text[pos]!r} at offset {pos}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, variables: tuple[str, str]):
        self.toks = _tokens(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected or 'a token'}, got {tok!r}")
        self.i += 1
        return tok

    def parse(self) -> MPoly:
        out = self.sum()
        if self.peek() is not None:
            raise ValueError(f"trailing input at {self.peek()!r}")
        return out

    def sum(self) -> MPoly:
        acc = self.product()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.product()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def product(self) -> MPoly:
        acc = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ValueError("only division by a nonzero constant is supported")
                acc = acc.scale(1 / rhs.constant_value())
        return acc

    def unary(self) -> MPoly:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
        return self.power()

    def power(self) -> MPoly:
        base = self.atom()
        if self.peek() in ("^", "**"):
            self.take()
            tok = self.take()
            if not tok.isdigit():
                raise ValueError("exponents must be non-negative integers")
            return base ** int(tok)
        return base

    def atom(self) -> MPoly:
        tok = self.take()
        if tok == "(":
            inner = self.sum()
            self.take(")")
            return inner
        if tok.isdigit():
            return MPoly.const(Fraction(int(tok)), self.variables)
        if tok in self.variables:
            return MPoly.var(tok, self.variables)
        raise ValueError(f"unknown symbol {tok!r}; variables are {', '.join(self.variables)}")


def parse_poly(text: str, variables: tuple[str, str] = ("y", "z")) -> MPoly:
    return _Parser(text, variables).parse()
