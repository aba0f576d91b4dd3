"""Acceptance criteria 1-8; each test prints one PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) or through pytest.
"""

import time
from fractions import Fraction

import pytest
from mpmath.ctx_mp import MPContext

from quadwalk.analytic import GluingContext, curve_L, evaluate_q0y, reversed_kreweras_q
from quadwalk.certificates import (
    DECOUPLING_G,
    Ansatz,
    builtin_certificate_table,
    equivalent_up_to_constant,
    search_decoupling,
    verify_decoupling,
    verify_entries,
)
from quadwalk.enumeration import (
    check_functional_equation,
    count_walks,
    gessel_closed_form,
    q00_coefficients,
    tail_bound,
    tq0y_truncation,
)
from quadwalk.exact_algebra import parse_ratfunc
from quadwalk.group import orbit
from quadwalk.model import TABLE1, TABLE2, all_step_sets, get_model, vertically_symmetric_models
from quadwalk.series_lab import certify_gessel

LAM = Fraction(3, 2)
WEIGHTED = ("weighted-1", "weighted-2", "weighted-3", "weighted-4")


LINES: list[str] = []


def report(k, ok, detail, elapsed=None, limit=None):
    timing = ""
    if elapsed is not None:
        timing = f" [{elapsed:.1f}s" + (f" / limit {limit}s]" if limit else "]")
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}{timing}"
    LINES.append(line)
    print(line, flush=True)
    return ok


def _instances(name):
    m = get_model(name)
    return [m.specialize(lam=LAM), m] if m.weight_symbols else [m]


def test_1_gessel_closed_form():
    t0 = time.time()
    table = count_walks(get_model("gessel"), 16)
    bad = [n for n in range(9) if gessel_closed_form(n) != table.q(0, 0, 2 * n)]
    dt = time.time() - t0
    ok = not bad and dt < 10
    report(1, ok, f"closed form = DP q(0,0;2n) for n=0..8, mismatches {bad}", dt, 10)
    assert ok


def test_2_functional_equation_sweep():
    t0 = time.time()
    models = list(all_step_sets()) + [m for name in WEIGHTED for m in _instances(name)]
    bad = [m.name for m in models if not check_functional_equation(m, 10).ok]
    dt = time.time() - t0
    ok = len(models) == 255 + 5 and not bad and dt < 120
    report(2, ok, f"{len(models)} models at N=10, nonzero residuals {bad}", dt, 120)
    assert ok


def test_3_table_verification():
    t0 = time.time()
    table = builtin_certificate_table(check=False)
    results = verify_entries(table.items())
    bad = [f"{n}:{k}" for n, k, ok in results if not ok]
    n_sym = sum(1 for n in table if n.startswith("sym:"))
    n_dec = sum(1 for _, k, _ in results if k == "decoupling")
    dt = time.time() - t0
    ok = not bad and n_sym == 16 and n_dec == len(TABLE1) + len(TABLE2) and dt < 60
    report(3, ok, f"{len(results)} checks ({n_sym} symmetric pairs, {n_dec} decouplings), failures {bad}", dt, 60)
    assert ok


def test_4_decoupling_rediscovery():
    t0 = time.time()
    ansatz = Ansatz((-2, 2), ((Fraction(-1), 2),))
    missed = []
    for name in TABLE1 + TABLE2:
        m = get_model(name)
        pair = search_decoupling(m, ansatz)
        if pair is None or not verify_decoupling(m, pair):
            missed.append(name)
        elif not equivalent_up_to_constant(pair.G, parse_ratfunc(DECOUPLING_G[name])):
            missed.append(name)
    sym = vertically_symmetric_models()[:10]
    found_sym = [m.name for m in sym if search_decoupling(m, ansatz) is not None]
    dt = time.time() - t0
    ok = not missed and not found_sym and len(sym) == 10
    report(4, ok, f"{len(TABLE1) + len(TABLE2)} stored G rediscovered (missed {missed}); absent on 10 symmetric (found {found_sym})", dt)
    assert ok


EXPECTED_ORDERS = {
    "kreweras": 6, "reversed-kreweras": 6, "double-kreweras": 6, "gessel": 8,
    "weighted-1": 6, "weighted-2": 10, "weighted-3": 10, "weighted-4": 10,
}


def _table1_orders():
    return {name: orbit(_instances(name)[0]) for name in TABLE1}


def test_5_group_verdicts():
    t0 = time.time()
    t1 = _table1_orders()
    finite_ok = all(r.finite for r in t1.values())
    orders = {n: r.order for n, r in t1.items()}
    t2 = {name: orbit(get_model(name), bound=400) for name in TABLE2}
    t2_ok = all(r.verdict == "not-finite-within" and r.bound == 400 for r in t2.values())
    dt = time.time() - t0
    ok = finite_ok and orders == EXPECTED_ORDERS and t2_ok
    report(5, ok, f"Table 1 finite with orders {orders}; Table 2 not-finite-within(400): {t2_ok}", dt)
    assert ok


@pytest.mark.xfail(strict=True, reason="weighted-2, weighted-3 and weighted-4 have groups of order 10")
def test_5_literal_order_set():
    orders = {r.order for r in _table1_orders().values()}
    ok = orders <= {4, 6, 8}
    report("5 (literal order set {4,6,8})", ok, f"computed order set {sorted(orders)}")
    assert ok


def test_6_gessel_series_certificates():
    t0 = time.time()
    rep = certify_gessel(20)
    d = rep.to_dict()
    checks = {k: d[k] for k in ("invariant_ok", "decoupling_ok", "cubic_ok", "z_ok")}
    dt = time.time() - t0
    ok = all(checks.values()) and min(d["orders"].values()) >= 20 and dt < 60
    report(6, ok, f"zero residuals through t^20: {checks}", dt, 60)
    assert ok


def _criterion7_model(name, ts, ys):
    failures = []
    for t in ts:
        ctx = GluingContext(get_model(name), t, 30)
        mp = ctx.mp
        tiny = mp.mpf(10) ** -20
        tag = f"{name}@t={t}"
        # (a) classification happened in the constructor
        # (b) period reality
        if not (abs(mp.re(ctx.omega1)) < tiny and mp.im(ctx.omega1) > 0):
            failures.append(f"{tag}:omega1")
        for k, w in ((2, ctx.omega2), (3, ctx.omega3)):
            if not (abs(mp.im(w)) < tiny and mp.re(w) > 0):
                failures.append(f"{tag}:omega{k}")
        # (c) Weierstrass ODE at points of both lattices
        for L in (ctx.lattice12, ctx.lattice13):
            for a, b in ((0.3, 0.2), (-0.17, 0.41), (0.45, -0.33)):
                z = a * L.wa + b * L.wb
                if abs(L.ode_residual(z)) >= tiny * max(1, abs(L.p(z))) ** 3:
                    failures.append(f"{tag}:ode")
        # (d) weak invariance on 50 samples of L
        res = max(abs(ctx.w(y0) - ctx.w(y1)) for _, y0, y1 in curve_L(ctx, 50).samples)
        if res >= tiny:
            failures.append(f"{tag}:weak-invariance {mp.nstr(res, 3)}")
        # (e) agreement with the truncated series
        table = count_walks(ctx.model, 30)
        for y in ys:
            v = evaluate_q0y(ctx.model, t, y, ctx=ctx)
            tol = max(1e-6, tail_bound(ctx.model, t, 30))
            if abs(v - ctx.num(tq0y_truncation(table, t, y))) >= tol:
                failures.append(f"{tag}:q0y(y={y})")
    return failures


def test_7_analytic_stack():
    t0 = time.time()
    ts = (Fraction(1, 40), Fraction(1, 20), Fraction(1, 10))
    ys = (Fraction(1, 4), Fraction(3, 10))
    failures = [f for name in TABLE2 for f in _criterion7_model(name, ts, ys)]
    dt = time.time() - t0
    ok = not failures and dt < 600
    report(7, ok, f"#1..#9 x 3 values of t: (a)-(e) failures {failures}", dt, 600)
    assert ok


def _fit_series(data, degree, scale):
    """Least-squares coefficients c_n of sum c_n t^(n+1), in the basis (t/scale)^(n+1)."""
    mp = MPContext()
    mp.dps = 80
    frac = lambda q: mp.mpf(q.numerator) / q.denominator  # noqa: E731
    rows = [[(frac(t) / frac(scale)) ** (n + 1) for n in range(degree + 1)] for t, _ in data]
    x, _ = mp.qr_solve(mp.matrix(rows), mp.matrix([mp.mpf(v) for _, v in data]))
    return [x[n] / frac(scale) ** (n + 1) for n in range(degree + 1)]


def test_8_reversed_kreweras():
    t0 = time.time()
    m = get_model("reversed-kreweras")
    data = []
    for k in range(20, 101):
        t = Fraction(1, k)
        _, tq00 = reversed_kreweras_q(t, Fraction(1, 4))
        data.append((t, str(tq00.real)))
    fit = _fit_series(data, 18, Fraction(1, 20))
    dp = q00_coefficients(m, 6)
    errs = [abs(float(fit[n]) - int(dp[n])) for n in range(7)]
    fit_ok = max(errs) < 1e-6
    t, y = Fraction(1, 25), Fraction(1, 4)
    v, _ = reversed_kreweras_q(t, y)
    oracle = tq0y_truncation(count_walks(m, 30), t, y)
    point_err = abs(complex(v) - float(oracle))
    dt = time.time() - t0
    ok = fit_ok and point_err < 1e-6
    report(8, ok, f"fit of tQ(0,0) vs DP {list(map(int, dp))}: max error {max(errs):.1e}; "
           f"tQ(0,1/4) at t=1/25 error {point_err:.1e}", dt)
    assert ok


if __name__ == "__main__":
    import sys

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    status = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            status = 1 if "literal" not in fn.__name__ else status
    sys.exit(status)
