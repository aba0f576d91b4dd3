"""Numerical gluing construction: branch points, periods, Weierstrass functions and tQ(0, y)."""

from .gluing import (
    BranchData,
    CurveL,
    GluingContext,
    branch_points,
    build_q_construction,
    curve_L,
    evaluate_q0y,
    f_of_y,
    gluing_w,
    periods,
    reversed_kreweras_q,
    reversed_kreweras_report,
    y_branches,
)
from .weierstrass import Lattice, eisenstein_invariants, make_context, weierstrass_p, weierstrass_p_inv

__all__ = [
    "BranchData",
    "CurveL",
    "GluingContext",
    "Lattice",
    "branch_points",
    "build_q_construction",
    "curve_L",
    "eisenstein_invariants",
    "evaluate_q0y",
    "f_of_y",
    "gluing_w",
    "make_context",
    "periods",
    "reversed_kreweras_q",
    "reversed_kreweras_report",
    "weierstrass_p",
    "weierstrass_p_inv",
    "y_branches",
]
