"""Recursive-descent parser and closure compiler for rhs expressions.

expr   := term (('+'|'-') term)*
term   := factor (('*'|'/') factor)*
factor := ('-'|'+') factor | power
power  := primary ('^' factor)?          # right-associative; binds above unary minus
primary:= NUMBER | 't' | 'yK' | name '(' expr (',' expr)* ')' | '(' expr ')'

so -2^2 is -(2^2) and 2^-3 parses.  Compilation produces nested closures
over (t, y); numeric constants are float64 scalars, so arithmetic stays in
numpy semantics (division by zero yields inf, not an exception) and
promotes cleanly to long double or mpf operands.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ExprError
from .systems import _cos, _exp, _sin, g_piecewise

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)

_VAR_RE = re.compile(r"^y([0-9]+)$")


def _min2(a, b):
    return a if a <= b else b


def _max2(a, b):
    return a if a >= b else b


# name -> (arity, implementation); implementations accept any real scalar type
FUNCTIONS: dict[str, tuple[int, Callable]] = {
    "sin": (1, _sin),
    "cos": (1, _cos),
    "exp": (1, _exp),
    "abs": (1, abs),
    "min": (2, _min2),
    "max": (2, _max2),
    "g_pw": (3, g_piecewise),
}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # 'num' | 'id' | one of -+*/^(), | 'end'
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        if source[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ExprError(
                f"unexpected character {source[i]!r}", source=source, position=i
            )
        if m.lastgroup == "op":
            tokens.append(_Token(m.group(), m.group(), i))
        else:
            tokens.append(_Token(m.lastgroup, m.group(), i))
        i = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    """One pass over the token stream producing a compiled closure."""

    def __init__(self, source: str, dim: int):
        self.source = source
        self.dim = dim
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: _Token):
        raise ExprError(message, source=self.source, position=tok.pos)

    def parse(self) -> Callable:
        fn = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.fail(f"unexpected trailing input {tok.text!r}", tok)
        return fn

    def expr(self) -> Callable:
        left = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            right = self.term()
            if op == "+":
                left = (lambda a, b: lambda t, y: a(t, y) + b(t, y))(left, right)
            else:
                left = (lambda a, b: lambda t, y: a(t, y) - b(t, y))(left, right)
        return left

    def term(self) -> Callable:
        left = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.take().kind
            right = self.factor()
            if op == "*":
                left = (lambda a, b: lambda t, y: a(t, y) * b(t, y))(left, right)
            else:
                left = (lambda a, b: lambda t, y: a(t, y) / b(t, y))(left, right)
        return left

    def factor(self) -> Callable:
        tok = self.peek()
        if tok.kind == "-":
            self.take()
            inner = self.factor()
            return (lambda a: lambda t, y: -a(t, y))(inner)
        if tok.kind == "+":
            self.take()
            return self.factor()
        return self.power()

    def power(self) -> Callable:
        base = self.primary()
        if self.peek().kind == "^":
            self.take()
            exponent = self.factor()
            return (lambda a, b: lambda t, y: a(t, y) ** b(t, y))(base, exponent)
        return base

    def primary(self) -> Callable:
        tok = self.take()
        if tok.kind == "num":
            value = np.float64(tok.text)
            return lambda t, y: value
        if tok.kind == "(":
            inner = self.expr()
            closing = self.take()
            if closing.kind != ")":
                self.fail("expected ')'", closing)
            return inner
        if tok.kind == "id":
            if self.peek().kind == "(":
                return self.call(tok)
            return self.variable(tok)
        self.fail(
            "expected a number, variable, function call, or '('"
            if tok.kind != "end"
            else "unexpected end of expression",
            tok,
        )

    def variable(self, tok: _Token) -> Callable:
        if tok.text == "t":
            return lambda t, y: t
        m = _VAR_RE.match(tok.text)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= self.dim:
                self.fail(
                    f"unknown variable {tok.text!r} (system has {self.dim} component(s))",
                    tok,
                )
            index = k - 1
            return lambda t, y: y[index]
        self.fail(f"unknown identifier {tok.text!r}", tok)

    def call(self, name_tok: _Token) -> Callable:
        spec = FUNCTIONS.get(name_tok.text)
        if spec is None:
            self.fail(f"unknown function {name_tok.text!r}", name_tok)
        arity, impl = spec
        self.take()  # '('
        args = [self.expr()]
        while self.peek().kind == ",":
            self.take()
            args.append(self.expr())
        closing = self.take()
        if closing.kind != ")":
            self.fail("expected ')' or ','", closing)
        if len(args) != arity:
            self.fail(
                f"function {name_tok.text!r} takes {arity} argument(s), got {len(args)}",
                name_tok,
            )
        if arity == 1:
            a0 = args[0]
            return lambda t, y: impl(a0(t, y))
        if arity == 2:
            a0, a1 = args
            return lambda t, y: impl(a0(t, y), a1(t, y))
        a0, a1, a2 = args
        return lambda t, y: impl(a0(t, y), a1(t, y), a2(t, y))


def compile_expression(source: str, dim: int) -> Callable:
    """Compile one expression to a closure (t, y) -> scalar."""
    if not isinstance(source, str) or not source.strip():
        raise ExprError("empty expression", source=str(source), position=0)
    return _Parser(source, dim).parse()
