from fractions import Fraction

import pytest
import sympy

from quadwalk.enumeration import count_walks
from quadwalk.exact_algebra import RatFunc, TruncSeries, compose_poly, parse_ratfunc
from quadwalk.model import get_model
from quadwalk.series_lab import (
    GENERIC,
    GESSEL_SUBSTITUTION,
    certify_cubic_identity,
    certify_gessel,
    certify_gessel_decoupling,
    certify_gessel_invariant,
    certify_gessel_invariant_sum,
    certify_gessel_SYi,
    certify_z,
    cubic_coefficients,
    cubic_residual_at,
    gessel_S_series,
    kernel_root_series,
    vieta_residuals,
    z_series,
)


def _vanishes(s: TruncSeries) -> bool:
    return s.valuation() is None


@pytest.mark.parametrize("spec", [GENERIC, GESSEL_SUBSTITUTION])
def test_gessel_roots_and_vieta(spec):
    br = kernel_root_series(get_model("gessel"), spec, 10)
    assert br.order >= 10
    s, p = vieta_residuals(br)
    assert _vanishes(s) and _vanishes(p)


def test_roots_satisfy_kernel():
    br = kernel_root_series(get_model("gessel"), GESSEL_SUBSTITUTION, 8)
    K = get_model("gessel").kernel.K
    for Y in (br.Y0, br.Y1):
        res = compose_poly(K, {"x": br.x, "y": Y}, 8)
        assert _vanishes(res)


def test_kreweras_small_branch():
    br = kernel_root_series(get_model("kreweras"), GENERIC, 6)
    assert br.Y0.valuation() == 1
    # K(x, y) = 0 gives y (x - t) = t x + t x^2 y^2, so the small root starts at t
    assert br.Y0[1] == 1
    x, t = sympy.symbols("x t", positive=True)
    small = (x - t - sympy.sqrt((x - t) ** 2 - 4 * t ** 2 * x ** 3)) / (2 * t * x ** 2)
    ref = sympy.series(small, t, 0, 6).removeO()
    for k in range(6):
        got = sympy.sympify(str(br.Y0[k]).replace("^", "**"), locals={"x": x})
        assert sympy.simplify(got - ref.coeff(t, k)) == 0


def test_substitution_is_gessel_only():
    with pytest.raises(ValueError):
        kernel_root_series(get_model("kreweras"), GESSEL_SUBSTITUTION, 6)
    with pytest.raises(ValueError):
        kernel_root_series(get_model("gessel"), "bogus", 6)


def test_invariant_certificate_and_negative_control():
    assert certify_gessel_invariant(20).ok
    bad = certify_gessel_invariant(12, I=RatFunc.var("y"))
    assert not bad.ok and bad.first_failure <= 6


def test_invariant_sum_is_free_of_u():
    assert certify_gessel_invariant_sum(12).ok


def test_decoupling_certificates():
    assert certify_gessel_decoupling(20).ok
    assert certify_gessel_SYi(20).ok
    bad = certify_gessel_decoupling(12, G=parse_ratfunc("1/(t*(1+y))"))
    assert not bad.ok and bad.first_failure <= 6


def test_S_series_matches_enumeration():
    S = gessel_S_series(8)
    table = count_walks(get_model("gessel"), 8)
    y = RatFunc.var("y")
    for n in range(1, 8):
        q0y = sum(v * y ** j for (i, j), v in table.layer(n - 1).items() if i == 0)
        assert RatFunc(S[n]) == (1 + y) * q0y


def test_cubic_coefficients_closed_forms():
    a, b, c, d = cubic_coefficients(12)
    assert a == TruncSeries.monomial(-1, 1, a.order)
    S0 = [p.evaluate({"y": 0}) for p in gessel_S_series(14)]
    for k in range(1, 10):
        expected = 2 if k == 0 else S0[k - 1]
        assert b[k] == expected
    assert b[0] == 2


def test_cubic_identity():
    rep = certify_cubic_identity(15)
    assert rep.ok and rep.interpolated_agree
    for y0 in (Fraction(1, 2), Fraction(-1, 3), Fraction(3), Fraction(2), Fraction(1)):
        assert cubic_residual_at(y0, 15).ok


def test_cubic_identity_wrong_coefficient():
    a, b, c, d = cubic_coefficients(30)
    rep = certify_cubic_identity(10, coefficients=(a, b + TruncSeries.monomial(1, 3, b.order), c, d))
    assert not rep.ok


def test_z_series_against_sympy():
    N = 14
    Z = z_series(N)
    assert Z[0] == 1
    assert all(Z[k] == 0 for k in range(1, N, 2))
    assert certify_z(30).ok
    # undetermined coefficients, solved one order at a time
    t = sympy.Symbol("t")
    cs = [sympy.Integer(1)]
    for k in range(1, N):
        c = sympy.Symbol("c")
        z = sum(ci * t ** i for i, ci in enumerate(cs)) + c * t ** k
        rel = sympy.series(z ** 2 - 1 - 256 * t ** 2 * z ** 6 / (z ** 2 + 3) ** 3, t, 0, k + 1).removeO()
        cs.append(sympy.solve(rel.coeff(t, k), c)[0])
    assert [Z[k] for k in range(N)] == [Fraction(str(c)) for c in cs]


def test_full_report():
    rep = certify_gessel(20)
    assert rep.ok
    d = rep.to_dict()
    assert d["orders"]["cubic"] == 20
