"""System-definition files: one ODE system plus its nonlinear term(s).

Format, one statement per line, ``;`` or ``#`` starts a comment::

    system rossler_v1
    param a = 1
    var x : -y + z
    var y : a*x - b*y
    var z : c - d*z + tanh(x + z)
    term tanh(x + z) input z modulator x
    init x = 0.1            # optional, default 0.1 for every variable
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

from ..errors import ConfigError, DslSyntaxError, UnknownSymbol
from .calculus import evaluate
from .expr import Expr, free_vars, is_constant
from .parser import parse

DEFAULT_INITIAL = 0.1

_NAME = r"[A-Za-z_][A-Za-z_0-9]*"
_STMT = {
    "system": re.compile(rf"system\s+(?P<name>{_NAME})\s*$"),
    "param": re.compile(rf"param\s+(?P<name>{_NAME})\s*=\s*(?P<expr>.+?)\s*$"),
    "init": re.compile(rf"init\s+(?P<name>{_NAME})\s*=\s*(?P<expr>.+?)\s*$"),
    "var": re.compile(rf"var\s+(?P<name>{_NAME})\s*:\s*(?P<expr>.+?)\s*$"),
    "term": re.compile(
        rf"term\s+(?P<expr>.+?)\s+input\s+(?P<input>{_NAME})\s+modulator\s+(?P<mod>{_NAME})\s*$"),
}


@dataclass(frozen=True)
class NonlinearTermDef:
    expr: Expr
    input_var: str
    modulator_var: str

    def __post_init__(self):
        if self.input_var == self.modulator_var:
            raise ConfigError("term input and modulator must be distinct variables")


@dataclass(frozen=True)
class SystemDef:
    name: str
    state_vars: tuple
    params: Mapping[str, float]
    rhs: tuple
    terms: tuple = ()
    initial: tuple = ()
    source: str = field(default="", compare=False, repr=False)

    def __reduce__(self):
        # mappingproxy does not pickle; rebuild from a plain dict (worker pools)
        return (SystemDef, (self.name, self.state_vars, dict(self.params), self.rhs, self.terms,
                            self.initial, self.source))

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        if len(self.rhs) != len(self.state_vars):
            raise ConfigError("one right-hand side per state variable is required")
        if len(set(self.state_vars)) != len(self.state_vars):
            raise ConfigError("duplicate state variable")
        if not self.initial:
            object.__setattr__(self, "initial", (DEFAULT_INITIAL,) * len(self.state_vars))
        known = set(self.state_vars) | set(self.params)
        for var, e in zip(self.state_vars, self.rhs):
            unknown = free_vars(e) - known
            if unknown:
                raise UnknownSymbol(f"d{var}/dt uses unknown symbol(s) {sorted(unknown)}")
        for t in self.terms:
            if self.state_vars:
                for v in (t.input_var, t.modulator_var):
                    if v not in self.state_vars:
                        raise UnknownSymbol(f"term variable {v!r} is not a state variable")
                unknown = free_vars(t.expr) - known
                if unknown:
                    raise UnknownSymbol(f"term uses unknown symbol(s) {sorted(unknown)}")

    @property
    def dim(self) -> int:
        return len(self.state_vars)

    @property
    def term(self) -> Optional[NonlinearTermDef]:
        return self.terms[0] if self.terms else None

    def to_text(self) -> str:
        lines = [f"system {self.name}"]
        lines += [f"param {k} = {v!r}" for k, v in self.params.items()]
        lines += [f"var {v} : {e}" for v, e in zip(self.state_vars, self.rhs)]
        lines += [f"term {t.expr} input {t.input_var} modulator {t.modulator_var}"
                  for t in self.terms]
        lines += [f"init {v} = {x!r}" for v, x in zip(self.state_vars, self.initial)]
        return "\n".join(lines) + "\n"


def _strip_comment(line):
    for mark in (";", "#"):
        cut = line.find(mark)
        if cut >= 0:
            line = line[:cut]
    return line


def _parse_at(text, lineno, column, source):
    try:
        return parse(text)
    except DslSyntaxError as exc:
        exc.line = lineno
        exc.column = column + exc.offset + 1
        exc.source = source
        raise


def _constant(text, lineno, column, source):
    e = _parse_at(text, lineno, column, source)
    if not is_constant(e):
        raise DslSyntaxError("value must be a numeric constant", 0, source=source,
                             line=lineno, column=column + 1)
    return evaluate(e, {})


def _check_symbols(variables, params, rhs, terms, inits, where):
    def fail(key, msg):
        line, col = where[key]
        raise UnknownSymbol(f"{msg} at line {line}, column {col}")

    known = set(variables) | set(params)
    for i, (var, e) in enumerate(zip(variables, rhs)):
        unknown = free_vars(e) - known
        if unknown:
            fail(("var", i), f"d{var}/dt uses unknown symbol(s) {sorted(unknown)}")
    for i, t in enumerate(terms):
        for v in (t.input_var, t.modulator_var):
            if v not in variables:
                fail(("term", i), f"term variable {v!r} is not a state variable")
        unknown = free_vars(t.expr) - known
        if unknown:
            fail(("term", i), f"term uses unknown symbol(s) {sorted(unknown)}")
    for v in inits:
        if v not in variables:
            fail(("init", v), f"init for undeclared variable {v!r}")


def parse_definition(source: str, default_name: str = "user") -> SystemDef:
    """Parse a definition file. Errors carry line and column."""
    name = default_name
    params, inits, variables, rhs, terms = {}, {}, [], [], []
    where = {}  # statement -> (line, column), for errors found after the whole file is read
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        keyword = body.split(None, 1)[0]
        pattern = _STMT.get(keyword)
        m = pattern.match(body) if pattern else None
        if m is None:
            raise DslSyntaxError(
                f"malformed {keyword!r} statement" if pattern else f"unknown statement {keyword!r}",
                0, expected=tuple(_STMT) if not pattern else (), source=source,
                line=lineno, column=indent + 1)
        col = indent + (m.start("expr") if "expr" in m.groupdict() else 0)
        if keyword == "system":
            name = m["name"]
        elif keyword == "param":
            params[m["name"]] = _constant(m["expr"], lineno, col, source)
        elif keyword == "init":
            inits[m["name"]] = _constant(m["expr"], lineno, col, source)
            where[("init", m["name"])] = (lineno, indent + 1)
        elif keyword == "var":
            variables.append(m["name"])
            rhs.append(_parse_at(m["expr"], lineno, col, source))
            where[("var", len(rhs) - 1)] = (lineno, col + 1)
        else:
            terms.append(NonlinearTermDef(_parse_at(m["expr"], lineno, col, source),
                                          m["input"], m["mod"]))
            where[("term", len(terms) - 1)] = (lineno, indent + 1)
    _check_symbols(variables, params, rhs, terms, inits, where)
    initial = tuple(inits.get(v, DEFAULT_INITIAL) for v in variables)
    return SystemDef(name, tuple(variables), params, tuple(rhs), tuple(terms), initial,
                     source=source)
