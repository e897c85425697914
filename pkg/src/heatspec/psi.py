"""Smooth real functions psi(x1, y1) given as small expressions, with exact derivatives.

The accepted grammar is numbers, the variables ``x1`` and ``y1``, the operators
``+ - * / **`` and the functions ``sin``, ``cos``, ``exp``.  Parsing and
differentiation are done symbolically, so the derivatives fed into the torsion
invariants carry no finite-difference error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

X1, Y1 = sp.symbols("x1 y1", real=True)
_ALLOWED_FUNCS = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp}
_NAMESPACE = {"x1": X1, "y1": Y1, "pi": sp.pi, **_ALLOWED_FUNCS}


class PsiExpressionError(ValueError):
    pass


@dataclass(frozen=True)
class Psi:
    """psi with gradient and Hessian in the ``(x1, y1)`` variables."""

    text: str
    value: Callable[[np.ndarray, np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    hessian: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, x1, y1):
        return self.value(x1, y1)


def _check_tree(expr: sp.Expr) -> None:
    for node in sp.preorder_traversal(expr):
        if isinstance(node, sp.Symbol):
            if node not in (X1, Y1):
                raise PsiExpressionError(f"unknown variable {node!r}")
        elif isinstance(node, sp.Function):
            if node.func not in _ALLOWED_FUNCS.values():
                raise PsiExpressionError(f"function {node.func} is not allowed")
        elif isinstance(node, (sp.Number, sp.Add, sp.Mul, sp.Pow, sp.NumberSymbol)):
            continue
        else:
            raise PsiExpressionError(f"unsupported construct {node!r}")


def _vectorize(expr: sp.Expr):
    f = sp.lambdify((X1, Y1), expr, modules="numpy")

    def call(x1, y1):
        x1 = np.asarray(x1, dtype=float)
        y1 = np.asarray(y1, dtype=float)
        out = np.asarray(f(x1, y1), dtype=float)
        return np.broadcast_to(out, np.broadcast(x1, y1).shape).astype(float)

    return call


def parse_psi(text: str) -> Psi:
    """Parse ``text`` (e.g. ``"sin(x1)"``) into a :class:`Psi`."""
    try:
        expr = parse_expr(
            text.replace("^", "**"),
            local_dict=dict(_NAMESPACE),
            global_dict={"__builtins__": {}, "Integer": sp.Integer, "Float": sp.Float,
                         "Rational": sp.Rational, "Symbol": sp.Symbol},
            transformations=standard_transformations,
        )
    except Exception as exc:  # sympy raises a zoo of exception types on bad input
        raise PsiExpressionError(f"cannot parse psi expression {text!r}: {exc}") from exc
    if not isinstance(expr, sp.Expr):
        raise PsiExpressionError(f"{text!r} is not an expression")
    _check_tree(expr)
    if expr.has(sp.I) or expr.has(sp.zoo, sp.nan, sp.oo):
        raise PsiExpressionError(f"{text!r} is not a finite real expression")

    dx, dy = sp.diff(expr, X1), sp.diff(expr, Y1)
    value = _vectorize(expr)
    grad = (_vectorize(dx), _vectorize(dy))
    hess = [[_vectorize(sp.diff(d, v)) for v in (X1, Y1)] for d in (dx, dy)]

    def gradient(x1, y1):
        return grad[0](x1, y1), grad[1](x1, y1)

    def hessian(x1, y1):
        return np.array([[h(x1, y1) for h in row] for row in hess])

    return Psi(text=text, value=value, gradient=gradient, hessian=hessian)
