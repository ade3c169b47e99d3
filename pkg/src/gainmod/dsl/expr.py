"""Expression tree nodes and the canonical printer.

Nodes are frozen dataclasses, so structural equality is plain ``==``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

FUNCTIONS = ("tanh", "sech", "sinh", "cosh", "exp", "ln", "sin", "cos")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
MAX_DEPTH = 64

_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_ATOM = 5


@dataclass(frozen=True)
class Constant:
    value: float

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expr"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"

    def __str__(self):
        return to_text(self)


Expr = Union[Constant, Variable, Unary, Binary, Call]


def children(e: Expr) -> tuple:
    if isinstance(e, Unary):
        return (e.arg,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Call):
        return (e.arg,)
    return ()


def depth(e: Expr) -> int:
    # iterative so pathological inputs cannot blow the Python stack
    best = 0
    stack = [(e, 1)]
    while stack:
        node, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in children(node))
    return best


def free_vars(e: Expr) -> frozenset:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Variable):
            out.add(node.name)
        stack.extend(children(node))
    return frozenset(out)


def is_constant(e: Expr) -> bool:
    return not free_vars(e)


def format_number(v: float) -> str:
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"cannot print non-finite constant {v!r}")
    if float(v).is_integer() and abs(v) < 1e15:
        s = str(int(v))
    else:
        s = repr(float(v))
    return f"({s})" if v < 0 else s


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary):
        return _PREC["neg"]
    if isinstance(e, Constant) and e.value < 0:
        return _ATOM
    return _ATOM


def to_text(e: Expr) -> str:
    """Print with the minimum parentheses needed for ``parse`` to rebuild ``e``.

    Negative constants print as ``(-c)``, which parses back to a negation node;
    every other tree round-trips exactly.
    """
    if isinstance(e, Constant):
        return format_number(e.value)
    if isinstance(e, Variable):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Unary):
        inner = to_text(e.arg)
        if _prec(e.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "pow":
        # right-associative: the base needs parens at equal precedence
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < _PREC["neg"]:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    if e.op in ("add", "sub"):
        return f"{left} {_SYMBOL[e.op]} {right}"
    return f"{left}{_SYMBOL[e.op]}{right}"
