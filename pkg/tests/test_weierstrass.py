import random

import numpy as np
import pytest

from quadwalk.analytic.weierstrass import (
    Lattice,
    eisenstein_invariants,
    make_context,
    weierstrass_p,
    weierstrass_p_inv,
)
from quadwalk.errors import DegenerateLattice


def theta_p(mp, tau, z):
    """p for the lattice (tau, 1) from Jacobi theta functions."""
    q = mp.expjpi(tau)
    th = lambda k, x: mp.jtheta(k, x, q)  # noqa: E731
    lead = mp.pi * th(2, 0) * th(3, 0) * th(4, mp.pi * z) / th(1, mp.pi * z)
    return lead ** 2 - mp.pi ** 2 * (th(2, 0) ** 4 + th(3, 0) ** 4) / 3


def lattice_sum(wa, wb, M=300):
    """Brute-force g2 and g3 over the square box |i|, |j| <= M."""
    i, j = np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1))
    w = (i * complex(wa) + j * complex(wb)).ravel()
    w = w[w != 0]
    return 60 * np.sum(w ** -4), 140 * np.sum(w ** -6)


@pytest.fixture(scope="module")
def mp():
    return make_context(30)


TAUS = [(0.3, 1.2), (0, 1), (0.5, 0.8660254037844386), (-0.41, 2.7)]


@pytest.mark.parametrize("tau", TAUS)
def test_p_against_theta_functions(mp, tau):
    tau = mp.mpc(*tau)
    L = Lattice(tau, 1, mp=mp)
    for z in (mp.mpc(0.17, 0.31), mp.mpc(0.45, -0.2), mp.mpc(-0.8, 0.9)):
        assert abs(L.p(z) - theta_p(mp, tau, z)) < mp.mpf(10) ** -24 * max(1, abs(L.p(z)))


@pytest.mark.parametrize("tau", TAUS)
def test_invariants_against_lattice_sum(mp, tau):
    g2, g3 = eisenstein_invariants(mp.mpc(*tau), 1, mp)
    b2, b3 = lattice_sum(complex(*tau), 1)
    # the truncated sums converge like 1/M^2
    assert abs(complex(g2) - b2) < 1e-3 * max(1, abs(b2))
    assert abs(complex(g3) - b3) < 1e-3 * max(1, abs(b3))


def test_square_and_hexagonal(mp):
    g2, g3 = eisenstein_invariants(mp.mpc(0, 1), 1, mp)
    assert abs(g3) < mp.mpf(10) ** -25 and abs(mp.im(g2)) < mp.mpf(10) ** -25
    g2, g3 = eisenstein_invariants(mp.expjpi(mp.mpf(1) / 3), 1, mp)
    assert abs(g2) < mp.mpf(10) ** -25


def test_ode_evenness_periodicity(mp):
    rng = random.Random(11)
    L = Lattice(mp.mpc(0.2, 1.7), mp.mpc(1.1, 0.1), mp=mp)
    for _ in range(20):
        z = mp.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        P = L.p(z)
        tol = mp.mpf(10) ** -24 * max(1, abs(P)) ** 3
        assert abs(L.ode_residual(z)) < tol
        assert abs(L.p(-z) - P) < tol
        assert abs(L.p(z + L.wa) - P) < tol
        assert abs(L.p(z - 2 * L.wb) - P) < tol


def test_derivative_by_finite_difference(mp):
    L = Lattice(mp.mpc(0, 1.3), 1, mp=mp)
    z = mp.mpc(0.3, 0.2)
    P, P1, P2, P3 = L.derivatives(z)
    assert abs(mp.diff(L.p, z) - P1) < mp.mpf(10) ** -20
    assert abs(P2 - (6 * P ** 2 - L.g2 / 2)) < mp.mpf(10) ** -20


def test_inverse_round_trip(mp):
    rng = random.Random(5)
    L = Lattice(mp.mpc(0.1, 1.4), 1, mp=mp)
    for _ in range(50):
        v = mp.mpc(rng.uniform(-20, 20), rng.uniform(-20, 20))
        z = L.p_inv(v)
        assert abs(L.p(z) - v) < mp.mpf(10) ** -22 * max(1, abs(v))
        a, b = L.coordinates(z)
        assert -0.5 - 1e-20 <= a <= 0.5 + 1e-20 and -1e-20 <= b <= 0.5 + 1e-20


def test_wrappers(mp):
    tau = mp.mpc(0.25, 1.1)
    L = Lattice(tau, 1, mp=mp)
    z = mp.mpc(0.2, 0.1)
    assert weierstrass_p(z, L.g2, L.g3, tau, 1, mp) == L.p(z)
    v = L.p(z)
    assert abs(weierstrass_p(weierstrass_p_inv(v, L.g2, L.g3, tau, 1, mp), L.g2, L.g3, tau, 1, mp) - v) < 1e-20


def test_precision_convergence():
    lo, hi = make_context(30), make_context(60)
    z = (0.31, 0.22)
    a = Lattice(lo.mpc(0.1, 1.9), 1, mp=lo).p(lo.mpc(*z))
    b = Lattice(hi.mpc(0.1, 1.9), 1, mp=hi).p(hi.mpc(*z))
    assert abs(hi.mpc(a) - b) < hi.mpf(10) ** -27 * abs(b)


def test_degenerate(mp):
    with pytest.raises(DegenerateLattice):
        Lattice(1, 2, mp=mp)
    with pytest.raises(DegenerateLattice):
        eisenstein_invariants(0, 1, mp)
    with pytest.raises(ZeroDivisionError):
        Lattice(mp.mpc(0, 1), 1, mp=mp).p(1)
