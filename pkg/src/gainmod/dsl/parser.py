"""Recursive-descent parser for term and right-hand-side expressions.

Grammar (ASCII, ``^`` is power, no implicit multiplication)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := '-' exponent | power
    atom     := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

Power is right-associative and binds tighter than negation, so ``-z^2`` is
``-(z^2)``.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

from ..errors import DslSyntaxError, UnknownFunction
from .expr import FUNCTIONS, MAX_DEPTH, Binary, Call, Constant, Unary, Variable, depth, is_constant

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def tokenize(source: str) -> list:
    """Split ``source`` into ``(kind, text, offset)`` triples ending with an END token."""
    if not source.isascii():
        bad = next(i for i, ch in enumerate(source) if not ch.isascii())
        raise DslSyntaxError("non-ASCII character", bad, source=source)
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            start = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise DslSyntaxError(f"unexpected character {source[start]!r}", start,
                                 expected=("number", "name", "operator"), source=source)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, message, expected):
        kind, text, offset = self.tok
        found = "end of input" if kind == "end" else repr(text)
        raise DslSyntaxError(f"{message}, found {found}", offset, expected=expected,
                             source=self.source)

    def accept(self, text):
        if self.tok[0] == "op" and self.tok[1] == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.fail(f"expected {text!r}", (text,))

    def parse(self):
        e = self.expr()
        if self.tok[0] != "end":
            self.fail("unexpected token", ("+", "-", "*", "/", "^", "end of input"))
        return e

    def expr(self):
        e = self.term()
        while True:
            if self.accept("+"):
                e = Binary("add", e, self.term())
            elif self.accept("-"):
                e = Binary("sub", e, self.term())
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Binary("mul", e, self.unary())
            elif self.tok[0] == "op" and self.tok[1] == "/":
                offset = self.tok[2]
                self.i += 1
                right = self.unary()
                if is_constant(right) and _const_value(right) == 0.0:
                    raise DslSyntaxError("division by constant zero", offset, source=self.source)
                e = Binary("div", e, right)
            else:
                return e

    def unary(self):
        if self.accept("-"):
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            offset = self.tok[2] + 1
            self.i += 1
            exponent = self.exponent()
            _check_exponent(exponent, offset, self.source)
            return Binary("pow", base, exponent)
        return base

    def exponent(self):
        if self.accept("-"):
            return Unary("neg", self.exponent())
        return self.power()

    def atom(self):
        kind, text, offset = self.tok
        if kind == "num":
            self.i += 1
            return Constant(float(text))
        if kind == "name":
            self.i += 1
            if self.tok[0] == "op" and self.tok[1] == "(":
                if text not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {text!r}", offset,
                                          expected=FUNCTIONS, source=self.source)
                self.i += 1
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in FUNCTIONS:
                self.fail(f"function {text!r} needs an argument", ("(",))
            return Variable(text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected an operand", ("number", "name", "("))


def _const_value(e) -> float:
    from .calculus import evaluate
    return evaluate(e, {})


def _check_exponent(e, offset, source):
    if not is_constant(e):
        raise DslSyntaxError("exponent must be a constant", offset, source=source)
    v = _const_value(e)
    if not math.isfinite(v) or float(Fraction(v).limit_denominator(10**6)) != v:
        raise DslSyntaxError("exponent must be a rational constant", offset, source=source)


def parse(source: str):
    """Parse one expression. Raises DslSyntaxError with offset and expected tokens."""
    if not source or not source.strip():
        raise DslSyntaxError("empty expression", 0, expected=("number", "name", "("),
                             source=source or "")
    try:
        e = _Parser(source).parse()
    except RecursionError:
        raise DslSyntaxError(f"expression deeper than {MAX_DEPTH} levels", 0,
                             source=source) from None
    if depth(e) > MAX_DEPTH:
        raise DslSyntaxError(f"expression deeper than {MAX_DEPTH} levels", 0, source=source)
    return e
