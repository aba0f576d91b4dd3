"""Truncated Laurent series in ``t`` over an exact coefficient field."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence

from ..errors import NonInvertibleLeadingTerm, NonSquareLeadingTerm
from .poly import MultiPoly, frac_sqrt, poly_sqrt, var_index, _slot
from .ratfunc import RatFunc

DEFAULT_ORDER = 20


def _zero(c) -> bool:
    return c == 0


class TruncSeries:
    """``sum(coeffs[k] * t**(low + k)) + O(t**order)``.

    Orders are absolute.  A product carries ``min(a.order + val(b), b.order + val(a))``
    which is the exact precision of the result.
    """

    __slots__ = ("low", "order", "coeffs")

    def __init__(self, coeffs: Sequence, low: int = 0, order: int | None = None):
        coeffs = list(coeffs)
        if order is None:
            order = low + len(coeffs)
        n = order - low
        if n < 0:
            low, coeffs = order, []
            n = 0
        if len(coeffs) < n:
            coeffs = coeffs + [0] * (n - len(coeffs))
        elif len(coeffs) > n:
            coeffs = coeffs[:n]
        self.low = low
        self.order = order
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, order: int) -> "TruncSeries":
        return cls([], low=order, order=order)

    @classmethod
    def const(cls, c, order: int) -> "TruncSeries":
        return cls([c], 0, order)

    @classmethod
    def monomial(cls, c, power: int, order: int) -> "TruncSeries":
        return cls([c], power, order)

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, object], order: int) -> "TruncSeries":
        if not coeffs:
            return cls.zero(order)
        low = min(coeffs)
        return cls([coeffs.get(k, 0) for k in range(low, order)], low, order)

    # -- inspection -------------------------------------------------------

    def __getitem__(self, k: int):
        return self.coefficient(k)

    def coefficient(self, k: int):
        if k >= self.order:
            raise IndexError(f"coefficient t^{k} is beyond the truncation order {self.order}")
        if k < self.low:
            return 0
        return self.coeffs[k - self.low]

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if not _zero(c):
                return self.low + i
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def first_nonzero(self) -> int | None:
        return self.valuation()

    def items(self):
        for i, c in enumerate(self.coeffs):
            if not _zero(c):
                yield self.low + i, c

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(self.coeffs, self.low, min(order, self.order))

    def map(self, fn: Callable) -> "TruncSeries":
        return TruncSeries([fn(c) for c in self.coeffs], self.low, self.order)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by the exact monomial ``t**k``."""
        return TruncSeries(self.coeffs, self.low + k, self.order + k)

    def _normalized(self) -> "TruncSeries":
        v = self.valuation()
        if v is None:
            return TruncSeries.zero(self.order)
        return TruncSeries(self.coeffs[v - self.low:], v, self.order)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries([other], 0, max(self.order, 1))

    def add_exact(self, c, power: int = 0) -> "TruncSeries":
        """Add the exact term ``c*t**power`` (dropped if beyond the order)."""
        if _zero(c) or power >= self.order:
            return self
        low = min(self.low, power)
        coeffs = [self.coefficient(k) if k >= self.low else 0 for k in range(low, self.order)]
        coeffs[power - low] = coeffs[power - low] + c
        return TruncSeries(coeffs, low, self.order)

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return self.add_exact(other, 0)
        order = min(self.order, other.order)
        low = min(self.low, other.low)
        if low >= order:
            return TruncSeries.zero(order)
        coeffs = []
        for k in range(low, order):
            a = self.coeffs[k - self.low] if k >= self.low else 0
            b = other.coeffs[k - other.low] if k >= other.low else 0
            coeffs.append(a + b)
        return TruncSeries(coeffs, low, order)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs], self.low, self.order)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            return self.add_exact(-other, 0)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        return TruncSeries([x * c for x in self.coeffs], self.low, self.order)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        va = self.valuation()
        vb = other.valuation()
        ea = self.order if va is None else va
        eb = other.order if vb is None else vb
        order = min(self.order + eb, other.order + ea)
        if va is None or vb is None:
            return TruncSeries.zero(order)
        low = va + vb
        a = self.coeffs[va - self.low:]
        b = other.coeffs[vb - other.low:]
        n = order - low
        dot = _batched_dot(a, b)
        out = []
        for k in range(n):
            if dot is not None:
                out.append(dot([
                    (a[i], b[k - i])
                    for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1)
                    if not _zero(a[i]) and not _zero(b[k - i])
                ]))
                continue
            s = 0
            for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
                ai = a[i]
                if not _zero(ai):
                    bj = b[k - i]
                    if not _zero(bj):
                        s = s + ai * bj
            out.append(s)
        return TruncSeries(out, low, order)

    __rmul__ = __mul__

    def inverse(self) -> "TruncSeries":
        v = self.valuation()
        if v is None:
            raise NonInvertibleLeadingTerm("series is zero to its known order")
        a = self.coeffs[v - self.low:]
        c0 = a[0]
        try:
            inv0 = _field_inverse(c0)
        except (ZeroDivisionError, TypeError) as exc:
            raise NonInvertibleLeadingTerm(f"leading coefficient {c0} is not invertible") from exc
        n = len(a)
        out = [inv0]
        for k in range(1, n):
            s = 0
            for i in range(1, k + 1):
                ai = a[i]
                if not _zero(ai):
                    s = s + ai * out[k - i]
            out.append(-s * inv0)
        return TruncSeries(out, -v, self.order - 2 * v)

    def __truediv__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(_field_inverse(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            return TruncSeries.const(1, max(self.order - (self.valuation() or 0), 1))
        return result

    def sqrt(self) -> "TruncSeries":
        v = self.valuation()
        if v is None:
            raise NonSquareLeadingTerm("square root of a series that is zero to its known order")
        if v % 2:
            raise NonSquareLeadingTerm(f"odd valuation {v}")
        a = self.coeffs[v - self.low:]
        r0 = coefficient_sqrt(a[0])
        if r0 is None:
            raise NonSquareLeadingTerm(f"leading coefficient {a[0]} is not a square")
        inv2 = _field_inverse(2 * r0)
        out = [r0]
        for k in range(1, len(a)):
            s = a[k]
            for i in range(1, k):
                s = s - out[i] * out[k - i]
            out.append(s * inv2)
        return TruncSeries(out, v // 2, v // 2 + len(a))

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        d = self - other
        return d.is_zero() and self.order == other.order

    __hash__ = None

    def __repr__(self) -> str:
        terms = [f"({c})*t^{k}" for k, c in self.items()]
        body = " + ".join(terms[:6]) + (" + ..." if len(terms) > 6 else "")
        return f"TruncSeries({body or '0'} + O(t^{self.order}))"


def _batched_dot(a, b):
    """A coefficient type may supply ``dot(pairs)`` to sum products with a single normalization."""
    for c in a + b:
        dot = getattr(type(c), "dot", None)
        if dot is not None:
            return dot
    return None


def _field_inverse(c):
    if isinstance(c, int):
        return Fraction(1, c)
    if isinstance(c, Fraction):
        return 1 / c
    if isinstance(c, RatFunc):
        return c.inverse()
    if isinstance(c, MultiPoly):
        if c.is_constant():
            return Fraction(1) / c.constant_value()
        return RatFunc(c).inverse()
    return 1 / c


def coefficient_sqrt(c):
    if isinstance(c, (int, Fraction)):
        return frac_sqrt(Fraction(c))
    if isinstance(c, MultiPoly):
        return poly_sqrt(c)
    if isinstance(c, RatFunc):
        n = poly_sqrt(c.num)
        d = poly_sqrt(c.den)
        if n is None or d is None:
            return None
        return RatFunc(n, d)
    if hasattr(c, "sqrt"):
        return c.sqrt()
    return None


def series_arith(a: TruncSeries, b, kind: str):
    """Dispatch form of the series operations (``add``, ``sub``, ``mul``, ``div``, ``sqrt``)."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    if kind == "sqrt":
        return a.sqrt()
    if kind == "compose_poly":
        return compose_poly(b, {"y": a})
    raise ValueError(f"unknown series operation {kind!r}")


def compose_poly(
    poly: MultiPoly | RatFunc,
    assign: Mapping[str, object],
    order: int | None = None,
    series_var: str = "t",
) -> TruncSeries:
    """Evaluate ``poly`` with ``series_var`` as the series variable.

    ``assign`` maps other variables to series or to coefficient-field constants.
    A rational function is evaluated as a quotient of series.
    """
    if isinstance(poly, RatFunc):
        num = compose_poly(poly.num, assign, order, series_var)
        if poly.is_polynomial():
            return num
        return num / compose_poly(poly.den, assign, order, series_var)
    ti = var_index(series_var)
    series_vars = {var_index(v): s for v, s in assign.items() if isinstance(s, TruncSeries)}
    const_vars = {var_index(v): s for v, s in assign.items() if not isinstance(s, TruncSeries)}
    if order is None:
        orders = [s.order for s in series_vars.values()]
        order = min(orders) if orders else DEFAULT_ORDER
    for i in poly.var_indices():
        if i != ti and i not in series_vars and i not in const_vars:
            raise ValueError(f"variable {poly.variables} not assigned in series composition")
    pcache: dict[tuple[int, int], TruncSeries] = {}
    groups: dict[tuple, dict[int, object]] = {}
    for k, c in poly.items():
        skey = tuple((i, _slot(k, i)) for i in sorted(series_vars) if _slot(k, i))
        coeff = c
        for i, val in const_vars.items():
            e = _slot(k, i)
            if e:
                coeff = coeff * val ** e
        tp = _slot(k, ti)
        g = groups.setdefault(skey, {})
        g[tp] = g.get(tp, 0) + coeff
    total = TruncSeries.zero(order)
    for skey, tcoeffs in groups.items():
        tcoeffs = {p: c for p, c in tcoeffs.items() if not _zero(c)}
        if not tcoeffs:
            continue
        if not skey:
            for p, c in tcoeffs.items():
                total = total.add_exact(c, p)
            continue
        prod = None
        for i, e in skey:
            pw = pcache.get((i, e))
            if pw is None:
                pw = pcache[(i, e)] = series_vars[i] ** e
            prod = pw if prod is None else prod * pw
        for p, c in tcoeffs.items():
            total = total + prod.shift(p).scale(c)
    return total


def series_from_coeffs(coeffs: Sequence, order: int | None = None, low: int = 0) -> TruncSeries:
    return TruncSeries(coeffs, low, order)
