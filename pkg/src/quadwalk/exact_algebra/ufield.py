"""The univariate field Q(u), backed by FLINT polynomials.

Used as a series coefficient ring where ``MultiPoly``-based rational functions
would spend most of their time in gcds.
"""

from __future__ import annotations

from fractions import Fraction

import flint
from flint.utils.flint_exceptions import DomainError

from .poly import MultiPoly
from .ratfunc import RatFunc


def _q(c) -> flint.fmpq:
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    return flint.fmpq(c)


class UFrac:
    """``num / den`` with ``den`` monic and coprime to ``num``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, normalized: bool = False):
        if not isinstance(num, flint.fmpq_poly):
            num = flint.fmpq_poly([_q(num)])
        if den is None:
            den = flint.fmpq_poly([1])
        elif not isinstance(den, flint.fmpq_poly):
            den = flint.fmpq_poly([_q(den)])
        if not normalized:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator in Q(u)")
            if num.is_zero():
                den = flint.fmpq_poly([1])
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num, den = num // g, den // g
                lc = den.leading_coefficient()
                if lc != 1:
                    num, den = num / lc, den / lc
        self.num = num
        self.den = den

    @classmethod
    def u(cls) -> "UFrac":
        return cls(flint.fmpq_poly([0, 1]), normalized=True)

    @classmethod
    def coerce(cls, v) -> "UFrac":
        if isinstance(v, UFrac):
            return v
        if isinstance(v, (int, Fraction)):
            return cls(flint.fmpq_poly([_q(v)]), normalized=True)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        o = UFrac.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __add__(self, other):
        o = UFrac.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return UFrac(self.num + o.num, self.den)
        return UFrac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return UFrac(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        o = UFrac.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return UFrac(flint.fmpq_poly([]), normalized=True)
            return UFrac(self.num * _q(other), self.den, normalized=True)
        o = UFrac.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n = (self.num // g1) * (o.num // g2)
        if n.is_zero():
            return UFrac(n)
        return UFrac(n, (self.den // g2) * (o.den // g1), normalized=True)

    __rmul__ = __mul__

    @staticmethod
    def dot(pairs) -> "UFrac | int":
        """``sum(x * y)`` normalized once, over the lcm of the denominators."""
        if not pairs:
            return 0
        terms = []
        for x, y in pairs:
            x, y = UFrac.coerce(x), UFrac.coerce(y)
            terms.append((x.num * y.num, x.den * y.den))
        den = terms[0][1]
        for _, d in terms[1:]:
            if d != den:
                den = den * (d // den.gcd(d))
        num = flint.fmpq_poly([])
        for n, d in terms:
            num += n * (den // d)
        return UFrac(num, den)

    def inverse(self) -> "UFrac":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(u)")
        return UFrac(self.den, self.num)

    def __truediv__(self, other):
        o = UFrac.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return UFrac(self.num ** n, self.den ** n, normalized=True)

    def sqrt(self) -> "UFrac | None":
        try:
            n = self.num.sqrt()
            d = self.den.sqrt()
        except (DomainError, ValueError, ArithmeticError):
            return None
        if n is None or d is None:
            return None
        return UFrac(n, d)

    def evaluate(self, u):
        u = _q(u)
        return Fraction(str(self.num(u) / self.den(u)))

    def to_ratfunc(self) -> RatFunc:
        def conv(p):
            out = MultiPoly()
            for k, c in enumerate(p.coeffs()):
                if c != 0:
                    out = out + MultiPoly.monomial(Fraction(int(c.p), int(c.q)), u=k)
            return out

        return RatFunc(conv(self.num), conv(self.den))

    def __str__(self) -> str:
        return str(self.to_ratfunc())

    __repr__ = __str__
