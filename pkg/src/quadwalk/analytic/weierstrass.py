"""Weierstrass elliptic functions at adjustable precision.

A ``Lattice`` owns its own mpmath context, so lattices built at different
precisions (or in different threads) never share global state.
"""

from __future__ import annotations

import os

from mpmath.ctx_mp import MPContext

from ..errors import DegenerateLattice, IntegralNonConvergent, LatticeReductionFailed

DEFAULT_PRECISION = 30
_GUARD = 15


def default_precision() -> int:
    return int(os.environ.get("QUADWALK_PRECISION", DEFAULT_PRECISION))


# Gauss-Legendre nodes on [-1, 1] depend only on (degree, precision); computing them
# dominates context setup, so every private context shares one cache.
_GL_NODES: dict = {}


def make_context(precision: int | None = None) -> MPContext:
    ctx = MPContext()
    ctx.dps = precision or default_precision()
    ctx._gauss_legendre.standard_cache = _GL_NODES
    return ctx


def eisenstein_invariants(wa, wb, mp: MPContext | None = None):
    """``g2 = 60 sum' w^-4`` and ``g3 = 140 sum' w^-6`` over ``w = i wa + j wb``.

    The sums are evaluated through the q-expansions of E4 and E6 after reducing
    ``tau`` to the standard fundamental domain.
    """
    mp = mp or make_context()
    with mp.extradps(_GUARD):
        wa, wb = mp.mpc(wa), mp.mpc(wb)
        if wb == 0 or wa == 0:
            raise DegenerateLattice("zero period")
        tau = wa / wb
        if abs(mp.im(tau)) < mp.mpf(10) ** (-mp.dps // 2):
            raise DegenerateLattice("periods are real-collinear")
        scale = wb
        if mp.im(tau) < 0:
            tau = -tau
        for _ in range(200):
            n = mp.nint(mp.re(tau))
            tau -= n
            if abs(tau) >= 1:
                break
            scale = scale * tau
            tau = -1 / tau
        else:
            raise LatticeReductionFailed("modular reduction of tau did not terminate")
        q = mp.expjpi(2 * tau)
        e4 = _eisenstein_q(mp, q, 3)
        e6 = _eisenstein_q(mp, q, 5)
        G4 = mp.pi ** 4 / 45 * (1 + 240 * e4) / scale ** 4
        G6 = 2 * mp.pi ** 6 / 945 * (1 - 504 * e6) / scale ** 6
        g2, g3 = 60 * G4, 140 * G6
    return +g2, +g3


def _eisenstein_q(mp, q, k):
    """``sum n^k q^n / (1 - q^n)``; ``|q| <= exp(-pi sqrt 3)`` after reduction, so terms decay fast."""
    total = mp.mpc(0)
    eps = mp.mpf(10) ** (-mp.dps - 5)
    qn = q
    n = 1
    while True:
        term = n ** k * qn / (1 - qn)
        total += term
        if abs(term) < eps:
            return total
        n += 1
        qn *= q
        if n > 10000:
            raise LatticeReductionFailed("q-series did not converge")


class Lattice:
    """Periods ``wa, wb`` (full periods) and the associated ``g2, g3``."""

    def __init__(self, wa, wb, precision: int | None = None, mp: MPContext | None = None, g2=None, g3=None):
        self.mp = mp or make_context(precision)
        mp = self.mp
        self.wa, self.wb = mp.mpc(wa), mp.mpc(wb)
        if g2 is None or g3 is None:
            g2, g3 = eisenstein_invariants(self.wa, self.wb, mp)
        self.g2, self.g3 = mp.mpc(g2), mp.mpc(g3)
        self._basis = mp.matrix([[mp.re(self.wa), mp.re(self.wb)], [mp.im(self.wa), mp.im(self.wb)]])
        if abs(mp.det(self._basis)) < mp.mpf(10) ** (-mp.dps // 2):
            raise DegenerateLattice("periods are real-collinear")
        self._rmin = min(abs(self.wa), abs(self.wb), abs(self.wa + self.wb), abs(self.wa - self.wb))
        self._coeffs = self._laurent_coefficients()
        self._roots = None

    # -- lattice coordinates --------------------------------------------------------

    def coordinates(self, z):
        """Real ``(a, b)`` with ``z = a wa + b wb``."""
        mp = self.mp
        s = mp.lu_solve(self._basis, mp.matrix([mp.re(z), mp.im(z)]))
        return s[0], s[1]

    def reduce(self, z):
        """Representative of ``z`` with both lattice coordinates in ``[-1/2, 1/2]``."""
        mp = self.mp
        a, b = self.coordinates(z)
        return z - mp.nint(a) * self.wa - mp.nint(b) * self.wb

    def canonical(self, z):
        """Representative of ``+-z`` modulo the lattice with ``b``-coordinate in ``[0, 1/2]``."""
        z = self.reduce(z)
        a, b = self.coordinates(z)
        if b < 0 or (b == 0 and a < 0):
            z = self.reduce(-z)
        return z

    # -- p and p' ----------------------------------------------------------------------

    def _laurent_coefficients(self):
        mp = self.mp
        with mp.extradps(_GUARD):
            cs = [None, None, self.g2 / 20, self.g3 / 28]
            # |z| <= rmin/8 after halving; stop once c_k z^(2k) is below working precision.
            # Square and hexagonal lattices have c_k = 0 off every second or third k,
            # so three consecutive terms must be small.
            bound = (self._rmin / 8) ** 2
            eps = mp.mpf(10) ** (-mp.dps - 5)
            k = 4
            while True:
                c = 3 * mp.fsum(cs[m] * cs[k - m] for m in range(2, k - 1)) / ((2 * k + 1) * (k - 3))
                cs.append(c)
                if k > 8 and all(abs(cs[j]) * bound ** j < eps for j in (k - 2, k - 1, k)):
                    break
                k += 1
                if k > 400:
                    raise LatticeReductionFailed("Laurent coefficients do not decay")
        return cs

    def p_and_dp(self, z):
        """``(p(z), p'(z))`` by reduction, halving, the Laurent series at 0 and duplication."""
        mp = self.mp
        with mp.extradps(_GUARD):
            z = self.reduce(mp.mpc(z))
            if abs(z) < mp.mpf(10) ** (-mp.dps):
                raise ZeroDivisionError("p has a pole at lattice points")
            halvings = 0
            small = self._rmin / 8
            while abs(z) > small:
                z /= 2
                halvings += 1
            P, P1 = self._series(z)
            g2 = self.g2
            for _ in range(halvings):
                P2 = 6 * P ** 2 - g2 / 2
                P3 = 12 * P * P1
                r = P2 / (2 * P1)
                P, P1 = -2 * P + r ** 2, -P1 + P2 * P3 / (4 * P1 ** 2) - P2 ** 3 / (4 * P1 ** 3)
        return +P, +P1

    def p(self, z):
        return self.p_and_dp(z)[0]

    def derivatives(self, z):
        """``p, p', p'', p'''`` at ``z`` (the last two from the differential equation)."""
        P, P1 = self.p_and_dp(z)
        return P, P1, 6 * P ** 2 - self.g2 / 2, 12 * P * P1

    def _series(self, z):
        mp = self.mp
        z2 = z * z
        P = 1 / z2
        P1 = -2 / (z2 * z)
        zp = mp.mpc(1)
        for k in range(2, len(self._coeffs)):
            c = self._coeffs[k]
            P1 += c * (2 * k - 2) * zp * z
            zp *= z2
            P += c * zp
        return P, P1

    def ode_residual(self, z):
        P, P1 = self.p_and_dp(z)
        return P1 ** 2 - (4 * P ** 3 - self.g2 * P - self.g3)

    # -- inverse -------------------------------------------------------------------------

    @property
    def roots(self):
        if self._roots is None:
            mp = self.mp
            with mp.extradps(_GUARD):
                self._roots = mp.polyroots([4, 0, -self.g2, -self.g3], maxsteps=200, extraprec=4 * mp.prec)
        return self._roots

    def p_inv(self, v):
        """``z`` in the half period rectangle with ``p(z) = v``.

        Carlson's ``R_F(v - e1, v - e2, v - e3)`` gives the elliptic integral from
        ``v`` to infinity; a few Newton steps polish it at working precision.
        """
        mp = self.mp
        with mp.extradps(_GUARD):
            v = mp.mpc(v)
            e1, e2, e3 = self.roots
            try:
                z = mp.elliprf(v - e1, v - e2, v - e3)
            except (ValueError, ZeroDivisionError) as exc:
                raise IntegralNonConvergent(f"elliptic integral at v={v}: {exc}") from None
            if not mp.isfinite(z):
                raise IntegralNonConvergent(f"elliptic integral at v={v} is not finite")
            tol = mp.mpf(10) ** (-(mp.dps - _GUARD) - 3)
            for _ in range(40):
                P, P1 = self.p_and_dp(z)
                if P1 == 0:
                    break
                dz = (P - v) / P1
                z -= dz
                if abs(dz) <= tol * max(1, abs(z)):
                    break
            z = self.canonical(z)
        return +z


def weierstrass_p(z, g2, g3, wa, wb, mp: MPContext | None = None):
    return Lattice(wa, wb, mp=mp, g2=g2, g3=g3).p(z)


def weierstrass_p_inv(v, g2, g3, wa, wb, mp: MPContext | None = None):
    return Lattice(wa, wb, mp=mp, g2=g2, g3=g3).p_inv(v)
