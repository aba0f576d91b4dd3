"""Series-level certificates for Gessel's model.

Every identity is checked in the ring of truncated Laurent series in ``t``; a
certificate records the order through which the residual is known to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .enumeration import count_walks, q_series
from .exact_algebra import MultiPoly, RatFunc, TruncSeries, parse_ratfunc
from .exact_algebra.series import compose_poly
from .exact_algebra.ufield import UFrac
from .model import StepModel, get_model

DEFAULT_N = 20
GENERIC = "generic"
GESSEL_SUBSTITUTION = "gessel_substitution"

_T = MultiPoly.var("t")
_Y = MultiPoly.var("y")
_U = UFrac.u()


def _gessel_invariant() -> RatFunc:
    """``I(y) = 1/(t(1+y)(1+1/y)) + t(1+y)(1+1/y)``."""
    w = RatFunc((1 + _Y) ** 2, _Y)
    return (RatFunc(_T) * w).inverse() + RatFunc(_T) * w


GESSEL_I = _gessel_invariant()
GESSEL_G = RatFunc(MultiPoly.const(-1), _T * (1 + _Y))


@dataclass(frozen=True)
class BranchSeries:
    Y0: TruncSeries
    Y1: TruncSeries
    x: TruncSeries | RatFunc
    x_spec: str
    model: StepModel

    @property
    def order(self) -> int:
        return min(self.Y0.order, self.Y1.order)


@dataclass(frozen=True)
class SeriesCertificate:
    """``ok`` iff the residual vanishes through ``t^(order-1)``; otherwise ``first_failure`` is the lowest bad power."""

    name: str
    ok: bool
    order: int
    first_failure: int | None = None

    def to_dict(self) -> dict:
        return {"ok": self.ok, "order": self.order, "first_failure": self.first_failure}


def _residual_certificate(name: str, residual: TruncSeries, N: int) -> SeriesCertificate:
    v = residual.valuation()
    if v is not None and v < N:
        return SeriesCertificate(name, False, residual.order, v)
    if residual.order < N:
        raise ArithmeticError(f"{name}: residual known only to order {residual.order} < {N}")
    return SeriesCertificate(name, True, N)


def gessel_x_series(order: int) -> TruncSeries:
    """``x = t + t^2 (u + 1/u)``, coefficients in Q(u)."""
    return TruncSeries.from_dict({1: 1, 2: _U + _U.inverse()}, order)


def _roots(a: TruncSeries, b: TruncSeries, c: TruncSeries) -> tuple[TruncSeries, TruncSeries]:
    d = b * b - a * c * 4
    r = d.sqrt()
    two_a = a * 2
    minus = (-b - r) / two_a
    plus = (-b + r) / two_a
    vm, vp = minus.valuation(), plus.valuation()
    if vp is not None and (vm is None or vp > vm):
        return plus, minus
    return minus, plus


def kernel_root_series(m: StepModel, x_spec: str = GENERIC, N: int = DEFAULT_N) -> BranchSeries:
    """Both roots of ``K(x, y) = 0`` in ``y`` as series in ``t``, known through ``O(t^N)``.

    Y0 is the root of larger valuation; on a tie it is the root taken with the
    minus sign in front of the normalized square root.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    k = m.kernel
    if x_spec == GESSEL_SUBSTITUTION:
        if m.key != get_model("gessel").key:
            raise ValueError("the substitution x = t + t^2(u + 1/u) is specific to Gessel's model")
    elif x_spec != GENERIC:
        raise ValueError(f"unknown x_spec {x_spec!r}")
    extra = 4
    while True:
        work = N + extra
        if x_spec == GENERIC:
            consts = {v: RatFunc.var(v) for v in k.K.variables if v not in ("t", "y")}
            xval = RatFunc.var("x")
        else:
            xval = gessel_x_series(work + 2)
            consts = {"x": xval}
        a, b, c = (compose_poly(p, consts, work) for p in (k.a, k.b, k.c))
        Y0, Y1 = _roots(a, b, c)
        if min(Y0.order, Y1.order) >= N:
            return BranchSeries(Y0.truncate(N), Y1.truncate(N), xval, x_spec, m)
        extra += 4


def vieta_residuals(br: BranchSeries) -> tuple[TruncSeries, TruncSeries]:
    """``Y0 + Y1 + b/a`` and ``Y0 Y1 - c/a``, both expected ``O(t^N)``."""
    k = br.model.kernel
    consts = _x_consts(br)
    work = br.order + 4
    a, b, c = (compose_poly(p, consts, work) for p in (k.a, k.b, k.c))
    s = br.Y0 + br.Y1 + b / a
    p = br.Y0 * br.Y1 - c / a
    return s.truncate(br.order), p.truncate(br.order)


def _x_consts(br: BranchSeries) -> dict:
    if br.x_spec == GENERIC:
        return {v: RatFunc.var(v) for v in br.model.kernel.K.variables if v not in ("t", "y")}
    return {"x": br.x}


def _times_x(br: BranchSeries, s: TruncSeries) -> TruncSeries:
    return s.scale(br.x) if br.x_spec == GENERIC else br.x * s


def _evaluate_at_branches(h: RatFunc, br: BranchSeries) -> tuple[TruncSeries, TruncSeries]:
    out = []
    for Y in (br.Y0, br.Y1):
        assign = _x_consts(br)
        assign["y"] = Y
        out.append(compose_poly(h, assign, br.order + 8))
    return out[0], out[1]


def _certify_on_branches(name: str, N: int, x_spec: str, residual_of) -> SeriesCertificate:
    """Grow the working precision until the residual is known through ``t^N`` or fails below it."""
    margin = 4
    while True:
        br = kernel_root_series(get_model("gessel"), x_spec, N + margin)
        res = residual_of(br)
        v = res.valuation()
        if res.order >= N or (v is not None and v < res.order):
            return _residual_certificate(name, res.truncate(min(res.order, N)), N)
        margin += 4


def certify_gessel_invariant(N: int = DEFAULT_N, I: RatFunc | None = None, x_spec: str = GESSEL_SUBSTITUTION) -> SeriesCertificate:
    """``I(Y0) - I(Y1) = O(t^N)`` for Gessel's kernel roots."""
    if N < 5:
        raise ValueError("N must be at least 5")
    I = GESSEL_I if I is None else I

    def residual(br):
        v0, v1 = _evaluate_at_branches(I, br)
        return v0 - v1

    return _certify_on_branches("invariant", N, x_spec, residual)


GESSEL_I1 = parse_ratfunc("-t/x^2 + 1/x + 2*t + x - t*x^2")


def certify_gessel_invariant_sum(N: int = DEFAULT_N, x_spec: str = GESSEL_SUBSTITUTION) -> SeriesCertificate:
    """``I(Y0) + I(Y1) = 2 I1(x)``: the symmetric value is the x-invariant."""

    def residual(br):
        v0, v1 = _evaluate_at_branches(GESSEL_I, br)
        rhs = compose_poly(GESSEL_I1 * 2, _x_consts(br), br.order + 8)
        return v0 + v1 - rhs

    return _certify_on_branches("invariant-sum", N, x_spec, residual)


def certify_gessel_decoupling(N: int = DEFAULT_N, G: RatFunc | None = None, x_spec: str = GESSEL_SUBSTITUTION) -> SeriesCertificate:
    """``x (Y0 - Y1) = G(Y0) - G(Y1)`` with ``G = -1/(t(1+y))``."""
    if N < 5:
        raise ValueError("N must be at least 5")
    G = GESSEL_G if G is None else G

    def residual(br):
        g0, g1 = _evaluate_at_branches(G, br)
        return _times_x(br, br.Y0 - br.Y1) - (g0 - g1)

    return _certify_on_branches("decoupling", N, x_spec, residual)


def gessel_S_series(order: int) -> list[MultiPoly]:
    """Coefficients of ``S(y) = t(1+y)Q(0,y)`` from enumeration, polynomials in ``y``, for ``t^0 .. t^(order-1)``."""
    m = get_model("gessel")
    table = count_walks(m, max(order - 1, 1))
    return list(q_series(m, max(order, 2), table).S().coeffs[:order])


def certify_gessel_SYi(N: int = DEFAULT_N, x_spec: str = GESSEL_SUBSTITUTION) -> SeriesCertificate:
    """``S(Y0) - x Y0 = S(Y1) - x Y1`` with ``S`` taken from enumeration."""
    if N < 5:
        raise ValueError("N must be at least 5")

    def residual(br):
        # y^j t^n occurs in S only for j <= n/2 + 1, so about 2N orders of S reach t^N
        depth = 2 * (br.order + 2)
        S = _y_poly_series(gessel_S_series(depth), depth)
        s0 = compose_poly(S, {"y": br.Y0}, br.order)
        s1 = compose_poly(S, {"y": br.Y1}, br.order)
        return (s0 - _times_x(br, br.Y0)) - (s1 - _times_x(br, br.Y1))

    return _certify_on_branches("decoupling-S", N, x_spec, residual)


def _y_poly_series(coeffs: list[MultiPoly], order: int) -> MultiPoly:
    """Pack series coefficients (polynomials in ``y``) into one polynomial in ``t, y``; the caller truncates."""
    out = MultiPoly()
    for n, c in enumerate(coeffs[:order]):
        if not c.is_zero():
            out = out + c * _T ** n
    return out


# -- cubic identity ----------------------------------------------------------------


@dataclass(frozen=True)
class CubicIdentityReport:
    a: TruncSeries
    b: TruncSeries
    c: TruncSeries
    d: TruncSeries
    order: int
    ok: bool
    first_failure: int | None
    interpolated_agree: bool

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "order": self.order,
            "first_failure": self.first_failure,
            "interpolated_agree": self.interpolated_agree,
        }


def _series_in_t(coeffs, order: int) -> TruncSeries:
    return TruncSeries(list(coeffs), 0, order)


def _derivative_at(p: MultiPoly, var: str, k: int, at) -> Fraction:
    for _ in range(k):
        p = p.diff(var)
    return Fraction(p.evaluate({var: at}))


def _gessel_constants(S: list[MultiPoly], order: int):
    """``S(0)``, ``S'(-1)``, ``S''(-1)`` as series in ``t``."""
    S0 = _series_in_t([_derivative_at(c, "y", 0, 0) for c in S], order)
    S1 = _series_in_t([_derivative_at(c, "y", 1, -1) for c in S], order)
    S2 = _series_in_t([_derivative_at(c, "y", 2, -1) for c in S], order)
    return S0, S1, S2


def cubic_coefficients(order: int) -> tuple[TruncSeries, TruncSeries, TruncSeries, TruncSeries]:
    """``a = -t``, ``b = 2 + t S(0)``, ``c = -S(0) + 2 S'(-1) - 1/t``, ``d = -2 S(0) S'(-1) - 3 S'(-1)/t + S''(-1)/t``."""
    S = gessel_S_series(order + 1)
    S0, S1, S2 = _gessel_constants(S, order + 1)
    t = TruncSeries.monomial(1, 1, order + 2)
    tinv = TruncSeries.monomial(1, -1, order + 2)
    a = -t
    b = S0 * t + 2
    c = -S0 + S1 * 2 - tinv
    d = -(S0 * S1) * 2 - S1 * tinv * 3 + S2 * tinv
    return a, b, c, d


def _J_and_I(S_poly_series: TruncSeries, order: int) -> tuple[TruncSeries, TruncSeries, TruncSeries]:
    """``J(y) = S(y) + 1/(t(1+y))``, ``J(0)`` and ``I(y)`` with coefficients in ``Q(y)``."""
    y = RatFunc.var("y")
    tinv = TruncSeries.monomial(1, -1, order)
    J = S_poly_series + tinv.scale((1 + y).inverse())
    J0 = S_poly_series.map(lambda c: RatFunc.of(c).subs({"y": 0})) + tinv
    I = tinv.scale(y / (1 + y) ** 2) + TruncSeries.monomial((1 + y) ** 2 / y, 1, order)
    return J, J0, I


def _cubic_residual(J, J0, I, a, b, c, d):
    return (J - J0) * I - ((a * J + b) * J + c) * J - d


def _interpolate_cubic(samples: list[tuple[TruncSeries, TruncSeries]]):
    """Newton interpolation of ``P(J) = a J^3 + b J^2 + c J + d`` through four ``(J_k, P(J_k))``."""
    xs = [s[0] for s in samples]
    dd = [s[1] for s in samples]
    coef = [dd[0]]
    for level in range(1, 4):
        dd = [(dd[i + 1] - dd[i]) / (xs[i + level] - xs[i]) for i in range(len(dd) - 1)]
        coef.append(dd[0])
    c0, c1, c2, c3 = coef
    x0, x1, x2 = xs[0], xs[1], xs[2]
    # expand c0 + c1(J-x0) + c2(J-x0)(J-x1) + c3(J-x0)(J-x1)(J-x2)
    e1 = x0 + x1 + x2
    e2 = x0 * x1 + x0 * x2 + x1 * x2
    e3 = x0 * x1 * x2
    a = c3
    b = c2 - c3 * e1
    c = c1 - c2 * (x0 + x1) + c3 * e2
    d = c0 - c1 * x0 + c2 * (x0 * x1) - c3 * e3
    return a, b, c, d


SAMPLE_Y = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(-1, 3), Fraction(3))


def certify_cubic_identity(N: int = DEFAULT_N, sample_y=SAMPLE_Y, coefficients=None) -> CubicIdentityReport:
    """``(J(y) - J(0)) I(y) = a J^3 + b J^2 + c J + d`` as a series identity with ``y`` symbolic.

    Independently, ``a, b, c, d`` are re-solved from the identity at four rational
    ``y`` values and compared with the closed forms (or with ``coefficients``).
    """
    if N < 8:
        raise ValueError("N must be at least 8")
    work = N + 4
    S = gessel_S_series(work + 1)
    Sy = TruncSeries([RatFunc(p) for p in S], 0, work + 1)
    a, b, c, d = coefficients if coefficients is not None else cubic_coefficients(work + 4)
    J, J0, I = _J_and_I(Sy, work + 1)
    res = _cubic_residual(J, J0, I, a, b, c, d)
    v = res.valuation()
    if res.order < N:
        raise ArithmeticError(f"cubic residual known only to order {res.order} < {N}")
    ok = v is None or v >= N
    agree = _interpolation_agrees(S, sample_y, (a, b, c, d), N, work)
    return CubicIdentityReport(
        a.truncate(N), b.truncate(N), c.truncate(N), d.truncate(N), N, ok, None if ok else v, agree
    )


def _evaluate_at_y(S: list[MultiPoly], y0: Fraction, order: int):
    Sv = TruncSeries([Fraction(p.evaluate({"y": y0})) for p in S], 0, order)
    S0 = TruncSeries([Fraction(p.evaluate({"y": 0})) for p in S], 0, order)
    tinv = TruncSeries.monomial(1, -1, order)
    J = Sv + tinv.scale(1 / (1 + y0))
    J0 = S0 + tinv
    w = (1 + y0) ** 2 / y0
    I = tinv.scale(1 / w) + TruncSeries.monomial(w, 1, order)
    return J, (J - J0) * I


def _interpolation_agrees(S, sample_y, closed, N: int, work: int) -> bool:
    extra = 0
    while True:
        samples = [_evaluate_at_y(gessel_S_series(work + extra + 1) if extra else S, y0, work + extra + 1)
                   for y0 in sample_y[:4]]
        solved = _interpolate_cubic(samples)
        # divided differences by J_k - J_l (valuation -1) raise precision demands
        if min(s.order for s in solved) >= N:
            break
        extra += 6
    target = N - 2
    for s, f in zip(solved, closed):
        diff = s - f
        v = diff.valuation()
        if v is not None and v < min(target, diff.order):
            return False
    return True


def cubic_residual_at(y0: Fraction, N: int = DEFAULT_N) -> SeriesCertificate:
    """The cubic identity specialized at a rational ``y``."""
    work = N + 4
    S = gessel_S_series(work + 1)
    a, b, c, d = cubic_coefficients(work + 4)
    J, lhs = _evaluate_at_y(S, Fraction(y0), work + 1)
    res = lhs - ((a * J + b) * J + c) * J - d
    return _residual_certificate(f"cubic@{y0}", res.truncate(min(res.order, N)), N)


# -- Z -----------------------------------------------------------------------------


def z_series(N: int = DEFAULT_N) -> TruncSeries:
    """The series ``Z = 1 + O(t)`` with ``Z^2 = 1 + 256 t^2 Z^6 / (Z^2 + 3)^3``, through ``O(t^N)``."""
    if N < 2:
        raise ValueError("N must be at least 2")
    t2 = TruncSeries.monomial(256, 2, N)
    Z = TruncSeries.const(1, N)
    for _ in range(N):
        Z2 = Z * Z
        nxt = (t2 * Z2 ** 3 / (Z2 + 3) ** 3 + 1).sqrt()
        if nxt == Z:
            break
        Z = nxt
    return Z


def z_residual(Z: TruncSeries) -> TruncSeries:
    Z2 = Z * Z
    return Z2 - 1 - TruncSeries.monomial(256, 2, Z.order) * Z2 ** 3 / (Z2 + 3) ** 3


def certify_z(N: int = DEFAULT_N) -> SeriesCertificate:
    return _residual_certificate("z", z_residual(z_series(N)), N)


# -- whole pipeline ------------------------------------------------------------------


@dataclass(frozen=True)
class GesselReport:
    invariant: SeriesCertificate
    decoupling: SeriesCertificate
    decoupling_S: SeriesCertificate
    cubic: CubicIdentityReport
    z: SeriesCertificate

    @property
    def ok(self) -> bool:
        return all(
            (self.invariant.ok, self.decoupling.ok, self.decoupling_S.ok,
             self.cubic.ok and self.cubic.interpolated_agree, self.z.ok)
        )

    def to_dict(self) -> dict:
        return {
            "invariant_ok": self.invariant.ok,
            "decoupling_ok": self.decoupling.ok and self.decoupling_S.ok,
            "cubic_ok": self.cubic.ok and self.cubic.interpolated_agree,
            "z_ok": self.z.ok,
            "orders": {
                "invariant": self.invariant.order,
                "decoupling": self.decoupling.order,
                "decoupling_S": self.decoupling_S.order,
                "cubic": self.cubic.order,
                "z": self.z.order,
            },
        }


def certify_gessel(N: int = DEFAULT_N) -> GesselReport:
    return GesselReport(
        certify_gessel_invariant(N),
        certify_gessel_decoupling(N),
        certify_gessel_SYi(N),
        certify_cubic_identity(N),
        certify_z(N),
    )
