"""Symmetric functions of a rational function over the two kernel roots in ``y``.

With ``K = a*y^2 + b*y + c`` every polynomial ``P(y)`` reduces modulo ``K`` to
``(A + B*y) / a^k``.  From there ``P(Y0) + P(Y1)`` and ``P(Y0)*P(Y1)`` only need
``e1 = -b/a`` and ``e2 = c/a``.
"""

from __future__ import annotations

from ..errors import BranchPole, DegenerateKernel
from .poly import ONE, ZERO, MultiPoly, univariate
from .ratfunc import RatFunc, as_ratfunc


def _kernel_of(model):
    k = getattr(model, "kernel", model)
    return k() if callable(k) else k


def reduce_mod_kernel(p: MultiPoly, a: MultiPoly, b: MultiPoly, c: MultiPoly) -> tuple[MultiPoly, MultiPoly, int]:
    """Return ``(A, B, k)`` with ``a^k * p(Y) = A + B*Y`` for both roots ``Y`` of ``a y^2 + b y + c``."""
    coeffs = univariate(p, "y")
    if not coeffs:
        return ZERO, ZERO, 0
    m = max(coeffs)
    k = max(m - 1, 0)
    A = coeffs.get(0, ZERO) * a ** k
    B = ZERO
    alpha, beta = ZERO, ONE
    for j in range(1, m + 1):
        if j > 1:
            alpha, beta = -c * beta, a * alpha - b * beta
        pj = coeffs.get(j)
        if pj is not None and not pj.is_zero():
            scale = pj * a ** (k - j + 1)
            A = A + scale * alpha
            B = B + scale * beta
    return A, B, k


def _norm_parts(A, B, a, b, c):
    return a * A * A - b * A * B + c * B * B


def symmetrize(h, model) -> tuple[RatFunc, RatFunc]:
    """``(h(Y0) + h(Y1), h(Y0) * h(Y1))`` as rational functions free of ``y``."""
    kern = _kernel_of(model)
    a, b, c = kern.a, kern.b, kern.c
    if a.is_zero():
        raise DegenerateKernel("kernel is not quadratic in y")
    h = as_ratfunc(h)
    A, B, k = reduce_mod_kernel(h.num, a, b, c)
    C, D, l = reduce_mod_kernel(h.den, a, b, c)
    nq = _norm_parts(C, D, a, b, c)
    if nq.is_zero():
        raise BranchPole(f"denominator {h.den} vanishes on a kernel branch")
    cross = 2 * a * A * C - b * (A * D + B * C) + 2 * c * B * D
    npart = _norm_parts(A, B, a, b, c)
    shift = l - k
    if shift >= 0:
        s_num, s_den = cross * a ** shift, nq
        p_num, p_den = npart * a ** (2 * shift), nq
    else:
        s_num, s_den = cross, nq * a ** (-shift)
        p_num, p_den = npart, nq * a ** (-2 * shift)
    return RatFunc(s_num, s_den), RatFunc(p_num, p_den)


def branch_discriminant(h, model) -> RatFunc:
    """``(h(Y0) - h(Y1))^2`` as a rational function of ``x``; zero exactly for invariants."""
    s, p = symmetrize(h, model)
    return s * s - 4 * p


def symmetrize_by_resultant(h, model) -> tuple[RatFunc, RatFunc]:
    """Independent route: ``Res_y(K, num - u*den)`` is a quadratic in ``u`` with roots ``h(Y0), h(Y1)``."""
    from .linalg import resultant

    kern = _kernel_of(model)
    h = as_ratfunc(h)
    K = kern.a * MultiPoly.var("y") ** 2 + kern.b * MultiPoly.var("y") + kern.c
    u = MultiPoly.var("u")
    if "u" in h.variables:
        raise ValueError("the auxiliary variable u must not occur in h")
    res = resultant(K, h.num - u * h.den, "y")
    parts = univariate(res, "u")
    q2 = parts.get(2, ZERO)
    if q2.is_zero():
        raise BranchPole("denominator vanishes on a kernel branch")
    q1 = parts.get(1, ZERO)
    q0 = parts.get(0, ZERO)
    return RatFunc(-q1, q2), RatFunc(q0, q2)
