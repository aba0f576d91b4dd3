"""Branch points, periods, the curve L and the conformal gluing function w.

Everything for one ``(model, t, precision)`` is bundled in a ``GluingContext``.
Building a context is pure; evaluations against it only read its fields.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import flint

from ..errors import (
    AtPole,
    ClassificationFailed,
    DegenerateQuadratic,
    OutsideDomain,
    PoleAtY4,
    PoleCollision,
    QuadratureNonConvergent,
    TOutOfRange,
)
from ..exact_algebra import RatFunc, parse_ratfunc
from ..model import StepModel, is_singular
from .weierstrass import Lattice, make_context

_MEMBERSHIP_SAMPLES = 400
POLE_EXCLUSION = 1e-3


# -- exact to numeric ---------------------------------------------------------------


def _exact_t(t) -> Fraction:
    t = Fraction(t)
    return t


def _univariate(poly, var: str, t: Fraction) -> list[Fraction]:
    p = poly.subs({"t": t})
    if not hasattr(p, "univariate_coeffs"):
        return [Fraction(p)]
    if p.is_zero():
        return [Fraction(0)]
    try:
        return [Fraction(c) for c in p.univariate_coeffs(var)]
    except ValueError:
        raise ValueError(f"polynomial {p} has free parameters; specialize the model first") from None


class NumPoly:
    """Real polynomial with exact coefficients, evaluated in a given mpmath context."""

    def __init__(self, coeffs: list[Fraction], mp):
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        self.exact = coeffs
        self.mp = mp
        self.c = [mp.mpf(q.numerator) / q.denominator for q in coeffs]

    @property
    def degree(self) -> int:
        return len(self.c) - 1 if any(self.exact) else -1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.c):
            acc = acc * x + c
        return acc

    def derivative(self, x, k: int):
        acc = 0
        for n in range(len(self.c) - 1, k - 1, -1):
            acc = acc * x + self.c[n] * math.perm(n, k)
        return acc

    def roots(self):
        mp = self.mp
        return mp.polyroots(self.c[::-1], maxsteps=400, extraprec=4 * mp.prec)


# -- branch points --------------------------------------------------------------------


@dataclass(frozen=True)
class BranchData:
    """Real branch points ordered ``|p1| <= |p2| < 1 < |p3| <= |p4|`` (``p4`` may be infinite)."""

    t: Fraction
    x: tuple
    y: tuple

    def to_dict(self) -> dict:
        return {"t": str(self.t), "x": list(self.x), "y": list(self.y)}


def classify_roots(poly: NumPoly, label: str):
    mp = poly.mp
    if poly.degree not in (3, 4):
        raise ClassificationFailed(f"discriminant in {label} has degree {poly.degree}")
    tol = mp.mpf(10) ** (-mp.dps // 2)
    roots = []
    for r in poly.roots():
        if abs(mp.im(r)) > tol * max(1, abs(r)):
            raise ClassificationFailed(f"non-real branch point {label}={r}")
        roots.append(mp.re(r))
    roots.sort(key=abs)
    inside = [r for r in roots if abs(r) < 1]
    outside = [r for r in roots if abs(r) > 1]
    if len(inside) != 2 or len(inside) + len(outside) != len(roots):
        raise ClassificationFailed(f"expected two branch points in the unit disc, got {len(inside)}")
    p1, p2 = inside
    p3 = outside[0]
    p4 = outside[1] if len(outside) > 1 else mp.inf
    if not (p2 > 0 and p3 > 0):
        raise ClassificationFailed(f"{label}2 and {label}3 must be positive")
    # the discriminant is negative between p1 and p2
    for s in (mp.mpf(1) / 4, mp.mpf(1) / 2, mp.mpf(3) / 4):
        if poly(p1 + (p2 - p1) * s) >= 0:
            raise ClassificationFailed(f"discriminant is not negative on ({label}1, {label}2)")
    return p1, p2, p3, p4


def _check_t(m: StepModel, t: Fraction):
    if is_singular(m):
        raise ClassificationFailed(f"{m.name} is singular")
    total = Fraction(m.total_weight())
    if not (0 < t < 1 / total):
        raise TOutOfRange(f"t={t} outside (0, 1/{total})")


def branch_points(m: StepModel, t, precision: int | None = None) -> BranchData:
    return GluingContext(m, t, precision, lazy=True).branch


# -- the context ----------------------------------------------------------------------


class GluingContext:
    """Numerical data for the gluing construction at fixed ``t``."""

    def __init__(self, m: StepModel, t, precision: int | None = None, *, lazy: bool = False):
        t = _exact_t(t)
        _check_t(m, t)
        self.model = m
        self.t = t
        self.mp = mp = make_context(precision)
        self.precision = mp.dps
        self.guard_digits = 0
        self._setup()
        if lazy:
            return
        self.omega1, self.omega2, self.omega3 = periods(self)
        # p has an exponentially small variation scale on elongated lattices; the
        # observed digit loss stays below 2 pi A / ln 10 for aspect ratio A
        aspect = max(self.omega2, self.omega3) / abs(self.omega1)
        self.guard_digits = int(mp.ceil(2 * mp.pi * aspect / mp.log(10)))
        mp.dps = self.precision + self.guard_digits
        self._setup()
        self.omega1, self.omega2, self.omega3 = periods(self)
        self.lattice12 = Lattice(self.omega1, self.omega2, mp=mp)
        self.lattice13 = Lattice(self.omega1, self.omega3, mp=mp)
        self.z0 = -(self.omega1 + self.omega2) / 2
        self._polygon = None
        self._unbounded = None

    def _setup(self):
        mp, t, k = self.mp, self.t, self.model.kernel
        num = lambda p, v: NumPoly(_univariate(p, v, t), mp)  # noqa: E731
        self.a, self.b, self.c = num(k.a, "x"), num(k.b, "x"), num(k.c, "x")
        self.at, self.bt, self.ct = num(k.at, "y"), num(k.bt, "y"), num(k.ct, "y")
        self.d, self.dt = num(k.d, "x"), num(k.dt, "y")
        with mp.extradps(10):
            xs = classify_roots(self.d, "x")
            ys = classify_roots(self.dt, "y")
        self.branch = BranchData(t, tuple(+v for v in xs), tuple(+v for v in ys))
        self.y2 = self.branch.y[1]

    # -- summaries --------------------------------------------------------------------

    @property
    def g2_12(self):
        return self.lattice12.g2

    @property
    def g3_12(self):
        return self.lattice12.g3

    @property
    def g2_13(self):
        return self.lattice13.g2

    @property
    def g3_13(self):
        return self.lattice13.g3

    def num(self, v):
        """Exact rationals and plain numbers as context numbers."""
        if isinstance(v, Fraction):
            return self.mp.mpf(v.numerator) / v.denominator
        return self.mp.mpmathify(v)

    @property
    def tolerance(self):
        return self.mp.mpf(10) ** (-(self.precision - 8))

    # -- branches of the kernel --------------------------------------------------------

    def y_branches(self, x):
        """``(Y0, Y1)`` roots of ``K(x, y)``; ``Y0`` is the smaller one, with ``Im Y0 >= 0`` on the cuts."""
        mp = self.mp
        x = self.num(x)
        A, B, C = self.a(x), self.b(x), self.c(x)
        if A == 0:
            raise DegenerateQuadratic(f"a(x) vanishes at x={x}")
        D = B * B - 4 * A * C
        if mp.im(x) == 0 and mp.re(D) < 0:
            r = mp.mpc(0, mp.sqrt(-mp.re(D)))
        else:
            r = mp.sqrt(D)
        y0, y1 = (-B + r) / (2 * A), (-B - r) / (2 * A)
        if abs(y1) < abs(y0):
            y0, y1 = y1, y0
        elif abs(y1) == abs(y0) and mp.im(y0) < mp.im(y1):
            y0, y1 = y1, y0
        return y0, y1

    def x_of_y_double(self, y):
        """The double root ``-bt(y) / (2 at(y))`` in x, infinite when ``at(y) = 0``."""
        A = self.at(y)
        if abs(A) < self.mp.mpf(10) ** (-self.precision):
            return self.mp.inf
        return -self.bt(y) / (2 * A)

    # -- f and w -------------------------------------------------------------------------

    @property
    def y4(self):
        return self.branch.y[3]

    def f_derivatives(self, y, order: int = 0) -> list:
        """``[f, f', ...]`` up to ``order`` (at most 3)."""
        mp = self.mp
        y = self.num(y)
        dt = self.dt
        if self.y4 == mp.inf:
            c0 = dt.derivative(0, 2) / 6
            c1 = dt.derivative(0, 3) / 6
            out = [c0 + c1 * y, c1, 0, 0]
            return out[: order + 1]
        h = y - self.y4
        if abs(h) < mp.mpf(10) ** (-self.precision):
            raise PoleAtY4(f"f has a pole at y4={self.y4}")
        D1 = dt.derivative(self.y4, 1)
        D2 = dt.derivative(self.y4, 2)
        out = [D2 / 6 + D1 / h, -D1 / h ** 2, 2 * D1 / h ** 3, -6 * D1 / h ** 4]
        return out[: order + 1]

    def f_of_y(self, y):
        return self.f_derivatives(y, 0)[0]

    def _check_pole(self, y):
        if abs(y - self.y2) < self.mp.mpf(10) ** (-(self.precision // 2)):
            raise AtPole(f"w has a pole at y2={self.y2}")

    def w_derivatives(self, y, order: int = 0, check_domain: bool = False) -> list:
        """``[w, w', ...]`` up to ``order`` (at most 3) by the chain rule.

        At the branch point ``y1`` the inner map ``v = p12^-1(f(y))`` is not
        differentiable (``p12'(v) = 0``), so the derivatives come from the
        expansion in ``s^2`` around the half period instead.
        """
        mp = self.mp
        y = self.num(y)
        self._check_pole(y)
        if check_domain and not self.contains(y):
            raise OutsideDomain(f"y={y} is outside the domain bounded by L")
        if order and abs(y - self.branch.y[0]) < mp.mpf(10) ** (-(self.precision // 2)):
            return [c * math.factorial(k) for k, c in enumerate(self._branch_taylor(order))]
        fs = self.f_derivatives(y, order)
        with mp.extradps(10):
            v = self.lattice12.p_inv(fs[0])
            z = self.z0 + v
            P = self.lattice13.derivatives(z)
            out = [P[0]]
            if order >= 1:
                Q = self.lattice12.derivatives(v)
                v1 = fs[1] / Q[1]
                out.append(P[1] * v1)
            if order >= 2:
                v2 = (fs[2] - Q[2] * v1 ** 2) / Q[1]
                out.append(P[2] * v1 ** 2 + P[1] * v2)
            if order >= 3:
                v3 = (fs[3] - Q[3] * v1 ** 3 - 3 * Q[2] * v1 * v2) / Q[1]
                out.append(P[3] * v1 ** 3 + 3 * P[2] * v1 * v2 + P[1] * v3)
        return [+o for o in out]

    def _branch_taylor(self, n: int) -> list:
        mp = self.mp
        yb = self.branch.y[0]
        m = 2 * n + 1
        with mp.extradps(10):
            vb = self.lattice12.p_inv(self.f_of_y(yb))
            P, _ = self.lattice12.p_and_dp(vb)
            f_s = _p_taylor(P, 0, self.lattice12.g2, m)
            W, W1 = self.lattice13.p_and_dp(self.z0 + vb)
            w_s = _p_taylor(W, W1, self.lattice13.g2, m)
            # y(s) from f(y) = p12(vb + s); f is a Moebius map (affine when y4 is infinite)
            if self.y4 == mp.inf:
                c0, c1 = self.f_derivatives(0, 1)
                y_s = [(f_s[0] - c0) / c1] + [c / c1 for c in f_s[1:]]
            else:
                D1 = self.dt.derivative(self.y4, 1)
                c0 = self.dt.derivative(self.y4, 2) / 6
                inv = _series_inverse([f_s[0] - c0] + f_s[1:], m)
                y_s = [self.y4 + D1 * inv[0]] + [D1 * c for c in inv[1:]]
            # both are even in s; pass to sigma = s^2 and invert y - yb = Y1 sigma + ...
            Y = [y_s[2 * k] for k in range(n + 1)]
            Wk = [w_s[2 * k] for k in range(n + 1)]
            b = _series_reversion(Y[1:], n)
            return [+c for c in _series_compose(Wk, b, n)]

    def w_taylor(self, y, n: int) -> list:
        """Taylor coefficients ``w^(k)(y) / k!`` for ``k <= n`` by composing local series."""
        mp = self.mp
        y = self.num(y)
        self._check_pole(y)
        if abs(y - self.branch.y[0]) < mp.mpf(10) ** (-(self.precision // 2)):
            return self._branch_taylor(n)
        with mp.extradps(10):
            if self.y4 == mp.inf:
                c0, c1 = self.f_derivatives(y, 1)
                F = [0, c1] + [0] * (n - 1)
            else:
                D1 = self.dt.derivative(self.y4, 1)
                h = y - self.y4
                F = [0] + [D1 / h * (-1 / h) ** k for k in range(1, n + 1)]
            v = self.lattice12.p_inv(self.f_of_y(y))
            P, P1 = self.lattice12.p_and_dp(v)
            q = _p_taylor(P, P1, self.lattice12.g2, n)
            # s(e) with p12(v + s) - p12(v) = F(e)
            s_of_e = _series_compose([0] + _series_reversion(q[1:], n)[1:], F, n)
            W, W1 = self.lattice13.p_and_dp(self.z0 + v)
            ws = _p_taylor(W, W1, self.lattice13.g2, n)
            return [+c for c in _series_compose(ws, s_of_e, n)]

    def w(self, y, check_domain: bool = False):
        return self.w_derivatives(y, 0, check_domain)[0]

    # -- the curve L and its domain ------------------------------------------------------

    @property
    def unbounded(self) -> bool:
        """``L`` is unbounded exactly when ``a`` vanishes at ``x1``."""
        if self._unbounded is None:
            x1 = self.branch.x[0]
            self._unbounded = bool(abs(self.a(x1)) < self.mp.mpf(10) ** (-(self.precision // 2)))
        return self._unbounded

    def curve_points(self, n: int):
        """``(x, Y0, Y1)`` at ``n`` Chebyshev nodes of ``(x1, x2)``."""
        mp = self.mp
        x1, x2 = self.branch.x[:2]
        out = []
        for k in range(n):
            s = (1 - mp.cos(mp.pi * (k + mp.mpf(1) / 2) / n)) / 2
            x = x1 + (x2 - x1) * s
            y0, y1 = self.y_branches(x)
            out.append((x, y0, y1))
        return out

    def _build_polygon(self):
        mp = self.mp
        x1, x2 = self.branch.x[:2]
        xs = [x1 + (x2 - x1) * (1 - mp.cos(mp.pi * k / _MEMBERSHIP_SAMPLES)) / 2 for k in range(_MEMBERSHIP_SAMPLES + 1)]
        if self.unbounded:
            head = [x1 + (xs[1] - x1) * mp.mpf(10) ** (-k) for k in range(20, 0, -1)]
            xs = head + xs[1:]
        else:
            xs = xs[1:-1]
        upper = [complex(self.y_branches(x)[0]) for x in xs]
        if not self.unbounded:
            ends = [complex(-self.b(x) / (2 * self.a(x))) for x in (x1, x2)]
            upper = [ends[0]] + upper + [ends[1]]
            lower = [v.conjugate() for v in reversed(upper[1:-1])]
            return upper + lower
        lower = [v.conjugate() for v in reversed(upper)]
        # close through the negative real axis
        start, end = lower[-1], upper[0]
        R = max(abs(start), abs(end))
        # angles in [0, 2 pi) so that interpolating between them passes through pi
        th0 = cmath.phase(start) % (2 * math.pi)
        th1 = cmath.phase(end) % (2 * math.pi)
        arc = [R * cmath.exp(1j * (th0 + (th1 - th0) * k / 64)) for k in range(1, 64)]
        return upper + lower + arc

    @property
    def polygon(self) -> list[complex]:
        if self._polygon is None:
            self._polygon = self._build_polygon()
        return self._polygon

    def winding(self, y) -> int:
        y = complex(y)
        pts = self.polygon
        total = 0.0
        prev = pts[-1] - y
        for p in pts:
            cur = p - y
            if cur == 0:
                return 0
            total += cmath.phase(cur / prev)
            prev = cur
        return round(total / (2 * math.pi))

    def contains(self, y) -> bool:
        """Membership in the domain bounded by ``L`` (containing -infinity when unbounded)."""
        return self.winding(y) != 0

    def on_curve(self, y) -> bool:
        """Whether ``K(x, y) = 0`` for some ``x`` in ``[x1, x2]``, i.e. ``y`` lies on ``L``."""
        mp = self.mp
        y = self.num(y)
        tol = mp.mpf(10) ** (-(self.precision // 2))
        x1, x2 = self.branch.x[:2]
        A, B, C = self.at(y), self.bt(y), self.ct(y)
        if abs(A) < tol:
            xs = [-C / B] if abs(B) > tol else []
        else:
            r = mp.sqrt(B * B - 4 * A * C)
            xs = [(-B + r) / (2 * A), (-B - r) / (2 * A)]
        return any(abs(mp.im(x)) < tol and x1 - tol <= mp.re(x) <= x2 + tol for x in xs)

    def in_closure(self, y) -> bool:
        return self.on_curve(y) or self.contains(y)

    def curve_L(self, n_samples: int = 50) -> "CurveL":
        return CurveL(tuple(self.curve_points(n_samples)), not self.unbounded)

    def to_dict(self) -> dict:
        return {
            "model": self.model.name,
            "t": str(self.t),
            "precision": self.precision,
            "branch_points": self.branch.to_dict(),
            "periods": [self.omega1, self.omega2, self.omega3],
            "g2": [self.g2_12, self.g2_13],
            "g3": [self.g3_12, self.g3_13],
            "pole_y2": self.y2,
            "unbounded": self.unbounded,
        }


@dataclass(frozen=True)
class CurveL:
    samples: tuple
    closed: bool

    def conjugacy_residual(self):
        return max(abs(y0 - y1.conjugate()) for _, y0, y1 in self.samples)


def y_branches(ctx: GluingContext, x):
    return ctx.y_branches(x)


def curve_L(ctx: GluingContext, n_samples: int = 50) -> CurveL:
    return ctx.curve_L(n_samples)


def f_of_y(ctx: GluingContext, y):
    return ctx.f_of_y(y)


def gluing_w(ctx: GluingContext, y, check_domain: bool = True):
    return ctx.w(y, check_domain)


# -- local series ----------------------------------------------------------------------------


def _p_taylor(P, P1, g2, n: int) -> list:
    """Taylor coefficients of ``p(z0 + s)`` from ``p(z0), p'(z0)`` and ``p'' = 6 p^2 - g2 / 2``."""
    c = [P, P1]
    for k in range(n - 1):
        conv = sum(c[i] * c[k - i] for i in range(k + 1))
        rhs = 6 * conv - (g2 / 2 if k == 0 else 0)
        c.append(rhs / ((k + 2) * (k + 1)))
    return c[: n + 1]


def _series_inverse(a: list, n: int) -> list:
    out = [1 / a[0]]
    for k in range(1, n + 1):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out.append(-s / a[0])
    return out


def _series_mul(a: list, b: list, n: int) -> list:
    return [sum(a[i] * b[k - i] for i in range(k + 1) if i < len(a) and k - i < len(b)) for k in range(n + 1)]


def _series_reversion(Y: list, n: int) -> list:
    """Coefficients ``b`` (``b[0] = 0``) with ``sum Y[k-1] s(e)^k = e`` up to ``e^n``."""
    b = [0, 1 / Y[0]]
    for k in range(2, n + 1):
        b.append(0)
        # coefficient of e^k in sum_j Y[j-1] b(e)^j must vanish
        total = 0
        pw = b[:]
        for j in range(1, k + 1):
            if j > 1:
                pw = _series_mul(pw, b, k)
            if j - 1 < len(Y):
                total += Y[j - 1] * pw[k]
        b[k] = -total / Y[0]
    return b


def _series_compose(W: list, b: list, n: int) -> list:
    out = [W[0]] + [0] * n
    pw = [1] + [0] * n
    for j in range(1, len(W)):
        pw = _series_mul(pw, b, n)
        for k in range(n + 1):
            out[k] += W[j] * pw[k]
    return out


# -- periods ------------------------------------------------------------------------------


def _quad(ctx: GluingContext, fn, a, b, what: str):
    """Gauss-Legendre with bisection wherever the two-degree error estimate is too large.

    Branch points close to an endpoint (relative to the interval) leave a
    near-singularity after substitution; bisection resolves it geometrically.
    """
    mp = ctx.mp
    tol = mp.mpf(10) ** (-(mp.dps + 5))

    def rec(lo, hi, tol, depth):
        val, err = mp.quad(fn, [lo, hi], method="gauss-legendre", error=True)
        if err <= tol * max(1, abs(val)):
            return val, err
        if depth == 0:
            raise QuadratureNonConvergent(f"{what}: error estimate {mp.nstr(err, 3)} on [{lo}, {hi}]")
        mid = (lo + hi) / 2
        v1, e1 = rec(lo, mid, tol / 2, depth - 1)
        v2, e2 = rec(mid, hi, tol / 2, depth - 1)
        return v1 + v2, e1 + e2

    val, err = rec(a, b, tol, 60)
    if err > mp.mpf(10) ** (-(mp.dps - 3)):
        raise QuadratureNonConvergent(f"{what}: error estimate {mp.nstr(err, 3)}")
    return val


def _others(d: NumPoly, roots, skip, x):
    """``|lc| * prod |x - r|`` over the finite roots not in ``skip``."""
    mp = d.mp
    acc = abs(d.c[-1])
    for i, r in enumerate(roots):
        if i in skip or r == mp.inf:
            continue
        acc *= abs(x - r)
    return acc


def periods(ctx: GluingContext):
    """``(omega1, omega2, omega3)`` with the endpoint singularities removed by substitution."""
    mp = ctx.mp
    d = ctx.d
    xs = ctx.branch.x
    x1, x2, x3, _ = xs
    with mp.extradps(10):
        half_pi = mp.pi / 2

        def sin2(A, B, skip):
            def g(th):
                x = A + (B - A) * mp.sin(th) ** 2
                return 2 / mp.sqrt(_others(d, xs, skip, x))

            return g

        w1 = mp.mpc(0, _quad(ctx, sin2(x1, x2, (0, 1)), 0, half_pi, "omega1"))
        w2 = _quad(ctx, sin2(x2, x3, (1, 2)), 0, half_pi, "omega2")
        X = ctx.x_of_y_double(ctx.branch.y[0])
        if X != mp.inf and not X < x1:
            raise ClassificationFailed(f"X(y1)={X} is not left of x1")
        for r in xs:
            if r != mp.inf and (X == mp.inf or X < r) and r < x1:
                raise ClassificationFailed("a branch point lies on the omega3 path")
        if X == mp.inf:

            def g3(phi):
                s = mp.sec(phi) ** 2
                return 2 * s / mp.sqrt(_others(d, xs, (0,), x1 - mp.tan(phi) ** 2))

            w3 = _quad(ctx, g3, 0, half_pi, "omega3")
        else:
            L = x1 - X

            def g3(sig):
                return 2 * mp.sqrt(L) / mp.sqrt(_others(d, xs, (0,), x1 - L * sig ** 2))

            w3 = _quad(ctx, g3, 0, 1, "omega3")
    w1, w2, w3 = +w1, +w2, +w3
    tol = mp.mpf(10) ** (-(ctx.precision - 5))
    if not (abs(mp.re(w1)) <= tol and mp.im(w1) > 0 and w2 > 0 and w3 > 0):
        raise ClassificationFailed("periods violate omega1 in iR+, omega2, omega3 in R+")
    return w1, w2, w3


# -- tQ(0, y) for decoupled models -------------------------------------------------------------


def _fpoly(coeffs: list[Fraction]) -> flint.fmpq_poly:
    return flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in coeffs])


def _frac(q: flint.fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def rational_poles(G: RatFunc) -> list[tuple[Fraction, int]]:
    den = _fpoly([Fraction(c) for c in G.den.univariate_coeffs("y")]) if G.den.degree("y") > 0 else None
    if den is None:
        return []
    out = []
    _, factors = den.factor()
    for fac, mult in factors:
        if fac.degree() != 1:
            raise NotImplementedError("only rational poles are supported")
        c = fac.coeffs()
        out.append((_frac(-c[0] / c[1]), mult))
    return out


def _roots(ctx: GluingContext, coeffs: list[Fraction]) -> list:
    """Distinct roots: exact ``Fraction`` for rational ones, context numbers otherwise."""
    if not any(coeffs[1:]):
        return []
    _, factors = _fpoly(coeffs).factor()
    out = []
    for fac, _ in factors:
        if fac.degree() == 1:
            c = fac.coeffs()
            out.append(_frac(-c[0] / c[1]))
        else:
            out.extend(NumPoly([_frac(c) for c in fac.coeffs()], ctx.mp).roots())
    return out


def laurent_at(G: RatFunc, p: Fraction, upto: int = 0) -> dict[int, Fraction]:
    """Exact Laurent coefficients of ``G(p + e)`` for exponents up to ``upto``."""
    shift = flint.fmpq_poly([flint.fmpq(p.numerator, p.denominator), 1])
    num = _fpoly([Fraction(c) for c in G.num.univariate_coeffs("y")])(shift)
    den = _fpoly([Fraction(c) for c in G.den.univariate_coeffs("y")])(shift)
    dc = [_frac(c) for c in den.coeffs()]
    nc = [_frac(c) for c in num.coeffs()]
    v = next(i for i, c in enumerate(dc) if c != 0)
    dc = dc[v:]
    n_terms = upto + v + 1
    # power series num / dc, then shift by -v
    q = []
    for k in range(n_terms):
        s = nc[k] if k < len(nc) else Fraction(0)
        for j in range(1, min(k, len(dc) - 1) + 1):
            s -= dc[j] * q[k - j]
        q.append(s / dc[0])
    return {k - v: q[k] for k in range(n_terms)}


def _specialize(G: RatFunc, t: Fraction) -> RatFunc:
    out = G.subs({"t": t})
    return out if isinstance(out, RatFunc) else RatFunc.of(out)


@dataclass
class PoleCorrection:
    """``sum alpha_e / (w - w(p))^e`` cancelling the principal part of G at ``p``."""

    p: Fraction
    wp: object
    alphas: dict
    constant_term: object

    def __call__(self, w):
        return sum(a / (w - self.wp) ** e for e, a in self.alphas.items())


def pole_correction(ctx: GluingContext, G: RatFunc, p: Fraction, mult: int) -> PoleCorrection:
    """Match the principal part of ``G`` at ``p`` with powers of ``u = 1 / (w - w(p))``.

    ``w - w(p)`` vanishes to order ``v`` (``v = 2`` where ``p`` is an end of ``L``),
    so ``u^e`` has a pole of order ``e v``.  The coefficients are found from the
    top order down; any remaining principal coefficients must then cancel.
    """
    mp = ctx.mp
    n = 2 * mult + 4
    c = ctx.w_taylor(p, n)
    scale = abs(ctx.num(p) - ctx.y2)
    tol = mp.mpf(10) ** (-(ctx.precision // 2))
    mags = [abs(c[k]) * scale ** k for k in range(1, n + 1)]
    v = next(k for k in range(1, n + 1) if mags[k - 1] > tol * max(mags))
    E = -(-mult // v)
    if v * (E + 1) > n:
        raise NotImplementedError(f"pole of order {mult} at a point where w - w(p) has order {v}")
    # u^e = c_v^-e e^(-e v) (1 + g)^-e
    g = [1] + [c[v + j] / c[v] for j in range(1, n - v + 1)]
    inv = _series_inverse(g, E * v)
    powers = {}
    acc = [1] + [0] * (E * v)
    for e in range(1, E + 1):
        acc = _series_mul(acc, inv, E * v)
        powers[e] = [x / c[v] ** e for x in acc]

    def coeff(e, j):
        # coefficient of e^j in u^e, for -e v <= j <= 0
        k = j + e * v
        return powers[e][k] if 0 <= k < len(powers[e]) else 0

    h = laurent_at(G, p, 0)
    target = {j: -ctx.num(h.get(-j, Fraction(0))) for j in range(1, E * v + 1)}
    alphas = {}
    for e in range(E, 0, -1):
        j = e * v
        rest = sum(alphas[k] * coeff(k, -j) for k in alphas)
        alphas[e] = (target[j] - rest) / coeff(e, -j)
    size = max(abs(x) for x in target.values()) or 1
    for j in range(1, E * v + 1):
        res = sum(a * coeff(e, -j) for e, a in alphas.items()) - target[j]
        if abs(res) > mp.mpf(10) ** (-(ctx.precision // 2)) * size:
            raise ArithmeticError(f"principal part of G at {p} is not matched by powers of 1/(w - w(p))")
    ct = sum(a * coeff(e, 0) for e, a in alphas.items())
    return PoleCorrection(p, c[0], alphas, ct)


@dataclass
class QConstruction:
    """``S = G + sum r_p + C`` and ``tQ(0, y) = t S(y) / K(0, y)``."""

    ctx: GluingContext
    G: RatFunc
    corrections: list
    constant: object
    normalization_point: object

    def S(self, y):
        mp = self.ctx.mp
        y = self.ctx.num(y)
        w = self.ctx.w(y)
        g = self.G.evaluate({"y": y}, convert=self.ctx.num)
        return g + sum(r(w) for r in self.corrections) + self.constant

    def tq0y(self, y):
        ctx = self.ctx
        y = ctx.num(y)
        return ctx.num(ctx.t) * self.S(y) / ctx.ct(y)


def _g_for(m: StepModel) -> RatFunc:
    from ..certificates import DECOUPLING_G

    name = m.name
    if name not in DECOUPLING_G:
        for key, g in DECOUPLING_G.items():
            from ..model import get_model

            try:
                if get_model(key).key == m.key:
                    name = key
                    break
            except Exception:  # noqa: BLE001 - weighted catalog entries need a parameter
                continue
        else:
            raise ValueError(f"no decoupling function known for {m.name}")
    return parse_ratfunc(DECOUPLING_G[name])


def build_q_construction(ctx: GluingContext, G: RatFunc | None = None) -> QConstruction:
    mp = ctx.mp
    G = _specialize(G if G is not None else _g_for(ctx.model), ctx.t)
    corrections = []
    poles = {}
    for p, mult in rational_poles(G):
        if not ctx.in_closure(ctx.num(p)):
            continue
        if abs(ctx.num(p) - ctx.y2) < POLE_EXCLUSION:
            raise PoleCollision(f"pole {p} of G coincides with the pole y2 of w")
        corrections.append(pole_correction(ctx, G, p, mult))
        poles[p] = corrections[-1]
    # normalization: S vanishes at the roots of K(0, y) inside the domain or on L
    roots = [r for r in _roots(ctx, ctx.ct.exact) if abs(ctx.num(r) - ctx.y2) > POLE_EXCLUSION]
    roots = [r for r in roots if ctx.in_closure(ctx.num(r))]
    if not roots:
        raise ValueError(f"{ctx.model.name}: K(0, y) has no root inside the domain; normalize explicitly")
    y0 = min(roots, key=lambda r: abs(ctx.num(r)))
    if y0 in poles:
        own = poles[y0]
        g_ct = laurent_at(G, y0, 0)[0]
        others = sum(r(ctx.w(y0)) for r in corrections if r is not own)
        C = -(ctx.num(g_ct) + own.constant_term + others)
    else:
        yv = ctx.num(y0)
        w = ctx.w(yv)
        g = G.evaluate({"y": yv}, convert=ctx.num)
        C = -(g + sum(r(w) for r in corrections))
    return QConstruction(ctx, G, corrections, C, y0)


def evaluate_q0y(m: StepModel, t, y, precision: int | None = None, ctx: GluingContext | None = None):
    ctx = ctx or GluingContext(m, t, precision)
    return build_q_construction(ctx).tq0y(y)


# -- reversed Kreweras ---------------------------------------------------------------------------


@dataclass
class ReversedKrewerasReport:
    tq0y: object
    tq00: object
    tail_values: list = field(default_factory=list)

    @property
    def bounded_at_infinity(self) -> bool:
        vals = self.tail_values
        return all(abs(v) < 10 * (1 + abs(vals[0])) for v in vals)


def reversed_kreweras_q(t, y, precision: int | None = None, ctx: GluingContext | None = None):
    """``(tQ(0, y), tQ(0, 0))`` for the reversed Kreweras model."""
    report = reversed_kreweras_report(t, y, precision, ctx)
    return report.tq0y, report.tq00


def reversed_kreweras_report(t, y, precision: int | None = None, ctx: GluingContext | None = None):
    from ..model import get_model

    m = get_model("reversed-kreweras")
    ctx = ctx or GluingContext(m, t, precision)
    mp = ctx.mp
    w0, w1, w2 = ctx.w_derivatives(0, 2)

    def W(v):
        return w1 / (ctx.w(v) - w0)

    tt = ctx.num(ctx.t)
    # small root of K(1, y) = t y^2 + (t - 1) y + t
    Y0 = min(mp.polyroots([tt, tt - 1, tt], extraprec=2 * mp.prec), key=abs)
    Y0 = mp.re(Y0)
    tq00 = Y0 + 1 + 1 / Y0 - W(1) - W(Y0) - w2 / w1
    y = ctx.num(y)
    tq0y = -1 / y + W(y) + tq00 + w2 / (2 * w1)
    # the weak invariant W stays bounded along the unbounded branch of L
    x1 = ctx.branch.x[0]
    tail = []
    for k in range(2, 9):
        x = x1 + mp.mpf(10) ** (-k)
        tail.append(W(ctx.y_branches(x)[0]))
    return ReversedKrewerasReport(+tq0y, +tq00, tail)


def reversed_kreweras_invariant(t):
    """``I2(y) = t y^2 - y - t / y``, a rational invariant for the reversed Kreweras model."""
    return parse_ratfunc("t*y^2 - y - t/y").subs({"t": Fraction(t)})
