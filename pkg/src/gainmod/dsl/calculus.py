"""Evaluation, symbolic differentiation and code generation for expressions."""
from __future__ import annotations

import functools
import math

import numpy as np

from ..errors import NonFiniteResult, UnboundVariable
from .expr import Binary, Call, Constant, Expr, Unary, Variable, free_vars

ZERO = Constant(0.0)
ONE = Constant(1.0)


def _sech(u):
    try:
        return 1.0 / math.cosh(u)
    except OverflowError:
        return 0.0


_MATH_FUNCS = {
    "tanh": math.tanh,
    "sech": _sech,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "exp": math.exp,
    "ln": math.log,
    "sin": math.sin,
    "cos": math.cos,
}


def evaluate(e: Expr, bindings) -> float:
    """Evaluate ``e`` in double precision. ``sech(u)`` is ``1/cosh(u)``."""
    try:
        value = _eval(e, bindings)
    except (ArithmeticError, ValueError) as exc:
        raise NonFiniteResult(f"evaluation of {e} failed: {exc}") from None
    if not math.isfinite(value):
        raise NonFiniteResult(f"evaluation of {e} gave {value}")
    return value


def _eval(e, b):
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Variable):
        try:
            return float(b[e.name])
        except KeyError:
            raise UnboundVariable(f"variable {e.name!r} is not bound") from None
    if isinstance(e, Unary):
        return -_eval(e.arg, b)
    if isinstance(e, Call):
        return _MATH_FUNCS[e.fn](_eval(e.arg, b))
    left = _eval(e.left, b)
    right = _eval(e.right, b)
    if e.op == "add":
        return left + right
    if e.op == "sub":
        return left - right
    if e.op == "mul":
        return left * right
    if e.op == "div":
        return left / right
    return math.pow(left, right)


# -- simplifying constructors -------------------------------------------------

def _c(e):
    return e.value if isinstance(e, Constant) else None


def add(a, b):
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return Constant(ca + cb)
    if ca == 0.0:
        return b
    if cb == 0.0:
        return a
    if isinstance(b, Unary):
        return sub(a, b.arg)
    return Binary("add", a, b)


def sub(a, b):
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return Constant(ca - cb)
    if cb == 0.0:
        return a
    if ca == 0.0:
        return neg(b)
    if isinstance(b, Unary):
        return add(a, b.arg)
    return Binary("sub", a, b)


def neg(a):
    ca = _c(a)
    if ca is not None:
        return Constant(-ca)
    if isinstance(a, Unary):
        return a.arg
    return Unary("neg", a)


def mul(a, b):
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None:
        return Constant(ca * cb)
    if cb is not None:
        a, b, ca, cb = b, a, cb, ca
    if ca is not None:
        if ca == 0.0:
            return ZERO
        if ca == 1.0:
            return b
        if ca == -1.0:
            return neg(b)
        if isinstance(b, Binary) and b.op == "mul" and _c(b.left) is not None:
            return mul(Constant(ca * b.left.value), b.right)
        if isinstance(b, Unary):
            return neg(mul(a, b.arg))
    if isinstance(a, Unary):
        return neg(mul(a.arg, b))
    if isinstance(b, Unary):
        return neg(mul(a, b.arg))
    return Binary("mul", a, b)


def div(a, b):
    ca, cb = _c(a), _c(b)
    if ca is not None and cb is not None and cb != 0.0:
        return Constant(ca / cb)
    if ca == 0.0:
        return ZERO
    if cb == 1.0:
        return a
    if cb is not None and cb != 0.0:
        if isinstance(a, Unary):
            return neg(div(a.arg, b))
        if isinstance(a, Binary) and a.op == "mul" and _c(a.left) is not None:
            return mul(Constant(a.left.value / cb), a.right)
    return Binary("div", a, b)


def power(a, n):
    cn = _c(n)
    if cn == 1.0:
        return a
    if cn == 0.0:
        return ONE
    ca = _c(a)
    if ca is not None and cn is not None:
        try:
            return Constant(math.pow(ca, cn))
        except (ArithmeticError, ValueError):
            pass
    return Binary("pow", a, n)


def call(fn, a):
    ca = _c(a)
    if ca is not None:
        try:
            v = _MATH_FUNCS[fn](ca)
            if math.isfinite(v):
                return Constant(v)
        except (ArithmeticError, ValueError):
            pass
    return Call(fn, a)


_BUILD = {"add": add, "sub": sub, "mul": mul, "div": div, "pow": power}


def simplify(e: Expr) -> Expr:
    """Constant folding plus the 0/1 identities. Not a general CAS."""
    if isinstance(e, (Constant, Variable)):
        return e
    if isinstance(e, Unary):
        return neg(simplify(e.arg))
    if isinstance(e, Call):
        return call(e.fn, simplify(e.arg))
    return _BUILD[e.op](simplify(e.left), simplify(e.right))


# -- differentiation -----------------------------------------------------------

def _outer_derivative(fn, u):
    if fn == "tanh":
        return power(Call("sech", u), Constant(2.0))
    if fn == "sech":
        return neg(mul(Call("sech", u), Call("tanh", u)))
    if fn == "sinh":
        return Call("cosh", u)
    if fn == "cosh":
        return Call("sinh", u)
    if fn == "exp":
        return Call("exp", u)
    if fn == "ln":
        return div(ONE, u)
    if fn == "sin":
        return Call("cos", u)
    return neg(Call("sin", u))


def differentiate(e: Expr, var: str) -> Expr:
    """Symbolic partial derivative of ``e`` with respect to ``var``, simplified."""
    return _d(simplify(e), var)


def _d(e, var):
    if var not in free_vars(e):
        return ZERO
    if isinstance(e, Variable):
        return ONE
    if isinstance(e, Unary):
        return neg(_d(e.arg, var))
    if isinstance(e, Call):
        return mul(_outer_derivative(e.fn, e.arg), _d(e.arg, var))
    l, r = e.left, e.right
    if e.op == "add":
        return add(_d(l, var), _d(r, var))
    if e.op == "sub":
        return sub(_d(l, var), _d(r, var))
    if e.op == "mul":
        return add(mul(_d(l, var), r), mul(l, _d(r, var)))
    if e.op == "div":
        if var not in free_vars(r):
            return div(_d(l, var), r)
        num = sub(mul(_d(l, var), r), mul(l, _d(r, var)))
        return div(num, power(r, Constant(2.0)))
    # pow: exponent is a constant by construction
    n = evaluate(r, {})
    return mul(mul(Constant(n), power(l, Constant(n - 1.0))), _d(l, var))


# -- code generation -------------------------------------------------------------

_NUMPY_FUNCS = {
    "tanh": "_np.tanh",
    "sech": "_np_sech",
    "sinh": "_np.sinh",
    "cosh": "_np.cosh",
    "exp": "_np.exp",
    "ln": "_np.log",
    "sin": "_np.sin",
    "cos": "_np.cos",
}


def _np_sech(u):
    return 1.0 / np.cosh(u)


def to_python(e: Expr, names: dict, constants=None, backend: str = "math") -> str:
    """Fully parenthesised Python source for ``e``.

    ``names`` maps expression variables to Python identifiers; ``constants``
    maps names to floats that are inlined as literals.
    """
    constants = constants or {}

    def emit(node):
        if isinstance(node, Constant):
            return repr(float(node.value))
        if isinstance(node, Variable):
            if node.name in constants:
                return repr(float(constants[node.name]))
            try:
                return names[node.name]
            except KeyError:
                raise UnboundVariable(f"variable {node.name!r} is not bound") from None
        if isinstance(node, Unary):
            return f"(-{emit(node.arg)})"
        if isinstance(node, Call):
            fn = f"_m_{node.fn}" if backend == "math" else _NUMPY_FUNCS[node.fn]
            return f"{fn}({emit(node.arg)})"
        a, b = emit(node.left), emit(node.right)
        if node.op == "pow":
            n = evaluate(node.right, {})
            if float(n).is_integer():
                return f"({a} ** {float(n)!r})"
            return f"_pow({a}, {float(n)!r})"
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[node.op]
        return f"({a} {sym} {b})"

    return emit(e)


def namespace(backend: str = "math") -> dict:
    ns = {f"_m_{k}": v for k, v in _MATH_FUNCS.items()}
    ns["_np"] = np
    ns["_np_sech"] = _np_sech
    ns["_pow"] = math.pow if backend == "math" else np.power
    return ns


@functools.lru_cache(maxsize=256)
def _compiled(e, args, consts, backend):
    names = {a: f"_a{i}" for i, a in enumerate(args)}
    body = to_python(e, names, dict(consts), backend)
    src = f"def _f({', '.join(names.values())}):\n    return {body}\n"
    ns = namespace(backend)
    exec(compile(src, f"<expr {e}>", "exec"), ns)
    return ns["_f"]


def compile_expr(e: Expr, args, constants=None, backend: str = "math"):
    """Return a Python callable ``f(*args)`` equivalent to ``evaluate``.

    With ``backend="numpy"`` the callable accepts arrays; callers check
    finiteness themselves.
    """
    consts = tuple(sorted((constants or {}).items()))
    return _compiled(e, tuple(args), consts, backend)


def evaluate_array(e: Expr, bindings) -> np.ndarray:
    """Vectorised ``evaluate`` over equal-length arrays."""
    names = tuple(sorted(free_vars(e)))
    missing = [n for n in names if n not in bindings]
    if missing:
        raise UnboundVariable(f"variable {missing[0]!r} is not bound")
    arrays = [np.asarray(bindings[n], dtype=float) for n in names]
    fn = compile_expr(e, names, backend="numpy")
    with np.errstate(all="ignore"):
        out = fn(*arrays)
    shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
    out = np.broadcast_to(np.asarray(out, dtype=float), shape).copy()
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out.ravel()))[0])
        raise NonFiniteResult(f"evaluation of {e} is non-finite at sample {bad}")
    return out
