"""Canonical text syntax for polynomials and rational functions.

Expressions use ``+ - * /``, ``^`` (or ``**``) with integer exponents, parentheses,
integer or decimal literals and the variables ``t, x, y, u, lam`` (``λ`` accepted).
"""

from __future__ import annotations

import ast
from fractions import Fraction

from ..errors import ParseError
from .poly import ALIASES, VARS, MultiPoly
from .ratfunc import RatFunc


def parse_ratfunc(text: str) -> RatFunc:
    src = text.strip().replace("^", "**").replace("λ", "lam")
    if not src:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return RatFunc.of(_eval(tree.body, text))


def parse_poly(text: str) -> MultiPoly:
    r = parse_ratfunc(text)
    if not r.is_polynomial():
        raise ParseError(f"{text!r} is not a polynomial")
    return r.num


def parse_number(text: str) -> Fraction:
    r = parse_ratfunc(text)
    if not r.is_constant():
        raise ParseError(f"{text!r} is not a constant")
    return r.constant_value()


def _eval(node, text):
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, text)
        if isinstance(node.op, ast.Pow):
            exp = _int_exponent(node.right, text)
            if exp < 0:
                return RatFunc.of(left) ** exp
            return left ** exp
        right = _eval(node.right, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if isinstance(left, (int, Fraction)) and isinstance(right, (int, Fraction)):
                if right == 0:
                    raise ParseError(f"division by zero in {text!r}")
                return Fraction(left) / right
            return RatFunc.of(left) / RatFunc.of(right)
    elif isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, text)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ParseError(f"unsupported literal {node.value!r} in {text!r}")
        if isinstance(node.value, float):
            return Fraction(repr(node.value))
        return node.value
    elif isinstance(node, ast.Name):
        name = ALIASES.get(node.id, node.id)
        if name not in VARS:
            raise ParseError(f"unknown symbol {node.id!r} in {text!r}")
        return MultiPoly.var(name)
    raise ParseError(f"unsupported syntax in {text!r}")


def _int_exponent(node, text) -> int:
    sign = 1
    while isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        if isinstance(node.op, ast.USub):
            sign = -sign
        node = node.operand
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return sign * node.value
    raise ParseError(f"exponents must be integer literals in {text!r}")

