"""Brute-force counting of quadrant walks, the oracle every other module is checked against."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .exact_algebra import MultiPoly, TruncSeries
from .exact_algebra.poly import pack, sum_polys
from .model import StepModel


@dataclass(frozen=True)
class CountTable:
    """``counts[n][(i, j)] = q(i, j; n)``, nonzero entries only."""

    n_max: int
    start: tuple[int, int]
    counts: tuple[dict, ...] = field(repr=False)

    def q(self, i: int, j: int, n: int):
        if n < 0 or n > self.n_max:
            raise IndexError(f"n={n} outside 0..{self.n_max}")
        return self.counts[n].get((i, j), 0)

    def layer(self, n: int) -> dict:
        return self.counts[n]

    def dense(self, n: int) -> list[list]:
        size = self.n_max + max(self.start) + 1
        grid = [[0] * size for _ in range(size)]
        for (i, j), v in self.counts[n].items():
            grid[i][j] = v
        return grid

    def total(self, n: int):
        return sum(self.counts[n].values())

    def with_entry(self, i: int, j: int, n: int, value) -> "CountTable":
        """Copy with one entry overwritten (used to exercise the residual checker)."""
        layers = [dict(layer) for layer in self.counts]
        layers[n][(i, j)] = value
        return CountTable(self.n_max, self.start, tuple(layers))


def count_walks(m: StepModel, n_max: int, start: tuple[int, int] = (0, 0)) -> CountTable:
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    i0, j0 = start
    if i0 < 0 or j0 < 0:
        raise ValueError("the starting point must lie in the quadrant")
    steps = m.step_items
    layer = {(i0, j0): 1}
    layers = [layer]
    for _ in range(n_max):
        nxt: dict = {}
        for (i, j), v in layer.items():
            for (a, b), w in steps:
                p, q = i + a, j + b
                if p >= 0 and q >= 0:
                    nxt[(p, q)] = nxt.get((p, q), 0) + v * w
        layer = {k: v for k, v in nxt.items() if v != 0}
        layers.append(layer)
    return CountTable(n_max, (i0, j0), tuple(layers))


@dataclass(frozen=True)
class QSeries:
    """Truncation ``sum_{n < order} Q_n(x, y) t^n`` of the generating function."""

    order: int
    coeffs: tuple[MultiPoly, ...]
    model: StepModel = field(repr=False)

    def as_poly(self) -> MultiPoly:
        """Whole truncation as one polynomial in ``t, x, y`` (and weight symbols)."""
        return sum_polys(c * MultiPoly.monomial(1, t=n) for n, c in enumerate(self.coeffs))

    def section(self, var: str, at: int = 0) -> list[MultiPoly]:
        """Coefficients of ``Q(x, 0)`` (``var='y'``) or ``Q(0, y)`` (``var='x'``)."""
        return [c.coefficient(var, at) for c in self.coeffs]

    def R(self) -> TruncSeries:
        """``K(x,0) Q(x,0)`` as a series in ``t`` with polynomial coefficients in ``x``."""
        kx0 = self.model.kernel.K.coefficient("y", 0)
        return _times_poly(kx0, self.section("y"), self.order)

    def S(self) -> TruncSeries:
        """``K(0,y) Q(0,y)`` as a series in ``t`` with polynomial coefficients in ``y``."""
        k0y = self.model.kernel.K.coefficient("x", 0)
        return _times_poly(k0y, self.section("x"), self.order)


def _times_poly(k: MultiPoly, qs: list[MultiPoly], order: int) -> TruncSeries:
    """Multiply ``k(t, .)`` by the series ``sum qs[n] t^n``; the result is known below ``order``."""
    by_t = k.coefficients_in("t")
    out = [MultiPoly() for _ in range(order)]
    for e, ck in by_t.items():
        for n, q in enumerate(qs):
            if n + e < order:
                out[n + e] = out[n + e] + ck * q
    return TruncSeries(out, 0, order)


def q_series(m: StepModel, N: int, table: CountTable | None = None) -> QSeries:
    if N < 1:
        raise ValueError("N must be at least 1")
    table = table or count_walks(m, N - 1)
    coeffs = []
    for n in range(N):
        layer = table.layer(n)
        if any(isinstance(v, MultiPoly) for v in layer.values()):
            coeffs.append(sum_polys(MultiPoly.monomial(1, x=i, y=j) * v for (i, j), v in layer.items()))
        else:
            coeffs.append(MultiPoly({pack((0, i, j, 0, 0)): v for (i, j), v in layer.items()}))
    qs = QSeries(N, tuple(coeffs), m)
    r, s = qs.R(), qs.S()
    r0 = [c.coefficient("x", 0) if c else c for c in r.coeffs]
    s0 = [c.coefficient("y", 0) if c else c for c in s.coeffs]
    if r0 != s0:
        raise AssertionError("R(0) and S(0) disagree")
    return qs


@dataclass(frozen=True)
class ResidualReport:
    order: int
    nonzero: tuple[tuple[int, str], ...]

    @property
    def ok(self) -> bool:
        return not self.nonzero


def check_functional_equation(m: StepModel, N: int, table: CountTable | None = None) -> ResidualReport:
    """Coefficients of ``K Q - R - S + R(0) + xy`` below ``t^N`` (expected: none)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    table = table or count_walks(m, N)
    qs = q_series(m, N + 1, table)
    K = m.kernel.K
    Q = qs.as_poly()
    xy = MultiPoly.monomial(1, x=1, y=1)
    R = sum_polys(c * MultiPoly.monomial(1, t=n) for n, c in enumerate(qs.R().coeffs))
    S = sum_polys(c * MultiPoly.monomial(1, t=n) for n, c in enumerate(qs.S().coeffs))
    R0 = R.coefficient("x", 0)
    resid = K * Q - R - S + R0 + xy
    bad = []
    for n, c in sorted(resid.coefficients_in("t").items()):
        if n <= N and not c.is_zero():
            bad.append((n, str(c)))
    return ResidualReport(N, tuple(bad))


def rising(a: Fraction, n: int) -> Fraction:
    return prod((a + k for k in range(n)), start=Fraction(1))


def gessel_closed_form(n: int) -> Fraction:
    """``q(0,0;2n) = 16^n (1/2)_n (5/6)_n / ((2)_n (5/3)_n)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return 16 ** n * rising(Fraction(1, 2), n) * rising(Fraction(5, 6), n) / (
        rising(Fraction(2), n) * rising(Fraction(5, 3), n)
    )


def q00_coefficients(m: StepModel, N: int) -> list:
    table = count_walks(m, N)
    return [table.q(0, 0, n) for n in range(N + 1)]


def tq0y_truncation(table: CountTable, t, y):
    """``sum_n t^(n+1) sum_j q(0, j; n) y^j`` evaluated numerically."""
    total = 0
    tp = t
    for n in range(table.n_max + 1):
        inner = 0
        for (i, j), v in table.layer(n).items():
            if i == 0:
                inner += v * y ** j
        total += tp * inner
        tp *= t
    return total


def tail_bound(m: StepModel, t, N: int) -> float:
    """Bound on ``|sum_{n > N} q_n t^n|`` using ``q_n <= |S|^n`` (for ``t |S| < 1``)."""
    s = float(m.total_weight()) * float(t)
    if s >= 1:
        return float("inf")
    return s ** (N + 1) / (1 - s)
