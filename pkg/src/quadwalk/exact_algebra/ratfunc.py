"""Normalized rational functions in the fixed variable universe."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..errors import ZeroDenominator
from .poly import ONE, ZERO, MultiPoly, _quo, as_poly, gcd


class RatFunc:
    """Quotient ``num/den`` with ``gcd(num, den) = 1`` and ``den`` monic in graded-lex order."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=ONE, *, normalized: bool = False):
        num, den = as_poly(num), as_poly(den)
        if den.is_zero():
            raise ZeroDenominator("rational function with zero denominator")
        if not normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def of(cls, v) -> "RatFunc":
        if isinstance(v, RatFunc):
            return v
        if isinstance(v, MultiPoly):
            return cls(v, ONE, normalized=True)
        if isinstance(v, (int, Fraction)):
            return cls(MultiPoly.const(v), ONE, normalized=True)
        raise TypeError(f"cannot interpret {v!r} as a rational function")

    @classmethod
    def var(cls, name: str) -> "RatFunc":
        return cls(MultiPoly.var(name), ONE, normalized=True)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == ONE

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return Fraction(self.num.constant_value()) / self.den.constant_value()

    @property
    def variables(self) -> tuple[str, ...]:
        from .poly import VARS

        m = self.num.var_mask() | self.den.var_mask()
        return tuple(v for i, v in enumerate(VARS) if m >> i & 1)

    def depends_on(self, var: str) -> bool:
        return var in self.variables

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        if other.den == ONE:
            return RatFunc(self.num + other.num * self.den, self.den, normalized=True)
        if self.den == ONE:
            return RatFunc(other.num + self.num * other.den, other.den, normalized=True)
        g = gcd(self.den, other.den)
        d1 = _quo(self.den, g)
        d2 = _quo(other.den, g)
        num = self.num * d2 + other.num * d1
        den = self.den * d2
        if g == ONE:
            return RatFunc(num, den, normalized=not num.is_zero())
        return RatFunc(num, den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, normalized=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return RatFunc(ZERO, ONE, normalized=True)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        g1 = gcd(n1, d2)
        g2 = gcd(n2, d1)
        if g1 != ONE:
            n1, d2 = _quo(n1, g1), _quo(d2, g1)
        if g2 != ONE:
            n2, d1 = _quo(n2, g2), _quo(d1, g2)
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFunc(num, den, normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDenominator("inverse of zero")
        num, den = self.den, self.num
        lc = den.leading_coefficient()
        return RatFunc(num / lc, den / lc, normalized=True)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            return self.inverse() ** (-n)
        num, den = self.num ** n, self.den ** n
        return RatFunc(num, den, normalized=True)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- calculus and substitution ------------------------------------------

    def diff(self, var: str) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(n.diff(var) * d - n * d.diff(var), d * d)

    def subs(self, values: Mapping[str, object]):
        """Substitute exact or numeric values; returns whatever the arithmetic yields."""
        n = self.num.subs(values)
        d = self.den.subs(values)
        if isinstance(n, MultiPoly) and isinstance(d, MultiPoly):
            return RatFunc(n, d)
        if isinstance(n, (MultiPoly, int, Fraction)) and isinstance(d, (MultiPoly, int, Fraction)):
            return RatFunc(as_poly(n), as_poly(d))
        if d == 0:
            raise ZeroDenominator("denominator vanishes at the substituted point")
        return n / d

    def evaluate(self, values: Mapping[str, object], convert=None):
        n = self.num.evaluate(values, convert)
        d = self.den.evaluate(values, convert)
        if d == 0:
            raise ZeroDenominator("denominator vanishes at the evaluation point")
        return n / d

    # -- printing ---------------------------------------------------------

    def __str__(self) -> str:
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RatFunc({str(self)!r})"


def _coerce(v):
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, MultiPoly):
        return RatFunc(v, ONE, normalized=True)
    if isinstance(v, (int, Fraction)):
        return RatFunc(MultiPoly.const(v), ONE, normalized=True)
    return NotImplemented


def _normalize(num: MultiPoly, den: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    if num.is_zero():
        return ZERO, ONE
    if den.is_constant():
        return num / den.constant_value(), ONE
    g = gcd(num, den)
    if g != ONE:
        num, den = _quo(num, g), _quo(den, g)
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num / lc, den / lc
    return num, den


def ratfunc_normalize(num, den) -> RatFunc:
    return RatFunc(num, den)


def as_ratfunc(v) -> RatFunc:
    return RatFunc.of(v)
