"""Exact arithmetic: rationals, sparse polynomials, rational functions, truncated series."""

from fractions import Fraction as ExactRat

from .linalg import bareiss_det, linsolve_over_Qt, resultant
from .parse import parse_number, parse_poly, parse_ratfunc
from .poly import (
    ONE,
    VARS,
    ZERO,
    MultiPoly,
    content_in,
    divides,
    exact_divide,
    gcd,
    lcm,
    poly_sqrt,
    prem,
)
from .ratfunc import RatFunc, as_ratfunc, ratfunc_normalize
from .series import DEFAULT_ORDER, TruncSeries, compose_poly, series_arith
from .symmetric import branch_discriminant, reduce_mod_kernel, symmetrize, symmetrize_by_resultant

X = MultiPoly.var("x")
Y = MultiPoly.var("y")
T = MultiPoly.var("t")
U = MultiPoly.var("u")
LAM = MultiPoly.var("lam")


def poly_arith(a, b, kind: str) -> MultiPoly:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation {kind!r}")


__all__ = [
    "ExactRat",
    "MultiPoly",
    "RatFunc",
    "TruncSeries",
    "ONE",
    "ZERO",
    "VARS",
    "X",
    "Y",
    "T",
    "U",
    "LAM",
    "DEFAULT_ORDER",
    "poly_arith",
    "exact_divide",
    "divides",
    "gcd",
    "lcm",
    "prem",
    "content_in",
    "poly_sqrt",
    "ratfunc_normalize",
    "as_ratfunc",
    "series_arith",
    "compose_poly",
    "symmetrize",
    "symmetrize_by_resultant",
    "branch_discriminant",
    "reduce_mod_kernel",
    "linsolve_over_Qt",
    "resultant",
    "bareiss_det",
    "parse_ratfunc",
    "parse_poly",
    "parse_number",
]
