"""Sparse multivariate polynomials over the rationals.

The variable universe is fixed to ``t, x, y, u, lam``.  A monomial is packed
into a single Python integer, 16 bits per variable with ``lam`` in the most
significant slot, so that monomial multiplication is integer addition and the
lexicographic order ``lam > u > y > x > t`` is plain integer comparison.
Coefficients are ``int`` or ``fractions.Fraction``.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from functools import reduce
from math import gcd as _igcd, lcm as _ilcm
from typing import Iterable, Mapping

from ..errors import ZeroDenominator

VARS = ("t", "x", "y", "u", "lam")
ALIASES = {"λ": "lam", "lambda": "lam"}
NVARS = len(VARS)
_BITS = 16
_SLOT = (1 << _BITS) - 1
_MAXDEG = (1 << (_BITS - 1)) - 1
_GUARD = sum(1 << (_BITS * i + _BITS - 1) for i in range(NVARS))
_UNIT = tuple(1 << (_BITS * i) for i in range(NVARS))


def var_index(name: str) -> int:
    name = ALIASES.get(name, name)
    try:
        return VARS.index(name)
    except ValueError:
        raise ValueError(f"unknown variable {name!r}; expected one of {VARS}") from None


def pack(exps: Iterable[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MAXDEG:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def unpack(key: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _SLOT for i in range(NVARS))


def _slot(key: int, i: int) -> int:
    return (key >> (_BITS * i)) & _SLOT


def _divides(small: int, big: int) -> bool:
    return ((big | _GUARD) - small) & _GUARD == _GUARD


def _total(key: int) -> int:
    s = 0
    while key:
        s += key & _SLOT
        key >>= _BITS
    return s


def _grlex(key: int) -> tuple[int, int]:
    return (_total(key), key)


def cdiv(a, b):
    """Exact quotient of two rational coefficients."""
    if type(a) is int and type(b) is int:
        q, r = divmod(a, b)
        return q if r == 0 else Fraction(a, b)
    return a / b


def _clean(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class MultiPoly:
    """Immutable sparse polynomial; ``_t`` maps packed monomials to nonzero coefficients."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        self._t = {k: _clean(v) for k, v in (terms or {}).items() if v}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "MultiPoly":
        p = object.__new__(cls)
        p._t = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "MultiPoly":
        if isinstance(c, float):
            raise TypeError("floating point coefficients are not exact")
        c = _clean(Fraction(c)) if not isinstance(c, int) else c
        return cls._raw({0: c} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MultiPoly":
        return cls._raw({power * _UNIT[var_index(name)]: 1})

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, object], variables: Iterable[str] = VARS) -> "MultiPoly":
        idx = [var_index(v) for v in variables]
        out: dict[int, object] = {}
        for exps, c in terms.items():
            full = [0] * NVARS
            for i, e in zip(idx, exps):
                full[i] += e
            k = pack(full)
            out[k] = out.get(k, 0) + c
        return cls(out)

    @classmethod
    def monomial(cls, c=1, **exps: int) -> "MultiPoly":
        full = [0] * NVARS
        for name, e in exps.items():
            full[var_index(name)] = e
        return cls({pack(full): c})

    # -- inspection -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._t.get(0, 0)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def var_mask(self) -> int:
        m = 0
        for k in self._t:
            for i in range(NVARS):
                if _slot(k, i):
                    m |= 1 << i
        return m

    def var_indices(self) -> set[int]:
        m = self.var_mask()
        return {i for i in range(NVARS) if m >> i & 1}

    @property
    def variables(self) -> tuple[str, ...]:
        m = self.var_mask()
        return tuple(v for i, v in enumerate(VARS) if m >> i & 1)

    @property
    def terms(self) -> dict[tuple[int, ...], object]:
        """Exponent vectors over :attr:`variables` mapped to coefficients."""
        idx = [var_index(v) for v in self.variables]
        return {tuple(_slot(k, i) for i in idx): c for k, c in self._t.items()}

    def items(self):
        return self._t.items()

    def degree(self, var: str | None = None) -> int:
        if not self._t:
            return -1
        if var is None:
            return max(_total(k) for k in self._t)
        i = var_index(var)
        return max(_slot(k, i) for k in self._t)

    def min_degree(self, var: str) -> int:
        i = var_index(var)
        return min(_slot(k, i) for k in self._t) if self._t else 0

    def leading_key(self) -> int:
        return max(self._t, key=_grlex)

    def leading_coefficient(self):
        """Coefficient of the graded-lex leading monomial."""
        return self._t[self.leading_key()] if self._t else 0

    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators over lcm of denominators)."""
        if not self._t:
            return Fraction(0)
        nums = [Fraction(c).numerator for c in self._t.values()]
        dens = [Fraction(c).denominator for c in self._t.values()]
        return Fraction(reduce(_igcd, nums), reduce(_ilcm, dens))

    def coefficients_in(self, var: str) -> dict[int, "MultiPoly"]:
        return {d: c for d, c in _split(self, var_index(var)).items()}

    def coefficient(self, var: str, power: int) -> "MultiPoly":
        return _split(self, var_index(var)).get(power, ZERO)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._t:
            return self
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({k: -c for k, c in self._t.items()})

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
        a, b = self._t, other._t
        if not a or not b:
            return ZERO
        if len(b) == 1:
            (kb, cb), = b.items()
            return MultiPoly._raw({k + kb: c * cb for k, c in a.items()})
        if len(a) == 1:
            (ka, ca), = a.items()
            return MultiPoly._raw({k + ka: c * ca for k, c in b.items()})
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, object] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return MultiPoly._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "MultiPoly":
        if not c:
            return ZERO
        return MultiPoly._raw({k: v * c for k, v in self._t.items()})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDenominator("division by zero")
            return MultiPoly._raw({k: cdiv(v, other) for k, v in self._t.items()})
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # -- calculus and substitution ----------------------------------------

    def diff(self, var: str) -> "MultiPoly":
        i = var_index(var)
        u = _UNIT[i]
        out = {}
        for k, c in self._t.items():
            e = _slot(k, i)
            if e:
                out[k - u] = c * e
        return MultiPoly._raw(out)

    def subs(self, values: Mapping[str, object]):
        """Substitute values (numbers, polynomials, rational functions) for variables."""
        idx = {var_index(v): val for v, val in values.items()}
        clear = 0
        for i in idx:
            clear |= _SLOT << (_BITS * i)
        cache: dict[tuple[int, int], object] = {}
        groups: dict[int, dict[int, object]] = {}
        for k, c in self._t.items():
            sub_key = k & clear
            groups.setdefault(sub_key, {})[k & ~clear] = c
        total = None
        for sub_key, rest in groups.items():
            factor = None
            for i, val in idx.items():
                e = _slot(sub_key, i)
                if e:
                    pw = cache.get((i, e))
                    if pw is None:
                        pw = cache[(i, e)] = val ** e
                    factor = pw if factor is None else factor * pw
            part = MultiPoly._raw(rest)
            if part.is_constant():
                part = part.constant_value()
            term = part if factor is None else factor * part
            total = term if total is None else total + term
        if total is None:
            return ZERO
        return total

    def evaluate(self, values: Mapping[str, object], convert=None):
        """Numeric evaluation; every variable present must be assigned."""
        idx = [(var_index(v), val) for v, val in values.items()]
        missing = self.var_indices() - {i for i, _ in idx}
        if missing:
            raise ValueError(f"unassigned variables: {[VARS[i] for i in sorted(missing)]}")
        cache: dict[tuple[int, int], object] = {}
        total = 0
        for k, c in self._t.items():
            term = convert(c) if convert else c
            for i, val in idx:
                e = _slot(k, i)
                if e:
                    pw = cache.get((i, e))
                    if pw is None:
                        pw = cache[(i, e)] = val ** e
                    term = term * pw
            total = total + term
        return total

    def univariate_coeffs(self, var: str, convert=None) -> list:
        """Dense coefficient list ``[c0, c1, ...]`` of a polynomial in one variable."""
        i = var_index(var)
        if self.var_mask() & ~(1 << i):
            raise ValueError(f"polynomial is not univariate in {var}")
        n = self.degree(var)
        out = [0] * (n + 1)
        for k, c in self._t.items():
            out[_slot(k, i)] = convert(c) if convert else c
        return out

    # -- printing ---------------------------------------------------------

    def __str__(self) -> str:
        if not self._t:
            return "0"
        keys = sorted(self._t, key=_grlex, reverse=True)
        parts = []
        for n, k in enumerate(keys):
            c = self._t[k]
            neg = c < 0
            a = -c if neg else c
            mono = "*".join(
                (VARS[i] if e == 1 else f"{VARS[i]}^{e}")
                for i in range(NVARS)
                for e in [_slot(k, i)]
                if e
            )
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if n == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"


ZERO = MultiPoly._raw({})
ONE = MultiPoly._raw({0: 1})


def _coerce(v):
    if isinstance(v, MultiPoly):
        return v
    if isinstance(v, (int, Fraction)):
        return MultiPoly.const(v)
    return NotImplemented


def as_poly(v) -> MultiPoly:
    p = _coerce(v)
    if p is NotImplemented:
        raise TypeError(f"cannot interpret {v!r} as a polynomial")
    return p


def _split(p: MultiPoly, i: int) -> dict[int, MultiPoly]:
    shift = _BITS * i
    mask = ~(_SLOT << shift)
    out: dict[int, dict] = {}
    for k, c in p._t.items():
        out.setdefault((k >> shift) & _SLOT, {})[k & mask] = c
    return {d: MultiPoly._raw(t) for d, t in out.items()}


def _join(parts: Mapping[int, MultiPoly], i: int) -> MultiPoly:
    out = {}
    u = _UNIT[i]
    for d, c in parts.items():
        for k, v in c._t.items():
            out[k + d * u] = v
    return MultiPoly._raw(out)


def _deg(p: MultiPoly, i: int) -> int:
    return max(_slot(k, i) for k in p._t) if p._t else -1


def _lead_in(p: MultiPoly, i: int) -> MultiPoly:
    parts = _split(p, i)
    return parts[max(parts)]


def exact_divide(p: MultiPoly, k: MultiPoly) -> MultiPoly | None:
    """Return ``q`` with ``p == q*k`` or ``None`` when ``k`` does not divide ``p``."""
    p, k = as_poly(p), as_poly(k)
    if k.is_zero():
        raise ZeroDenominator("division by the zero polynomial")
    if p.is_zero():
        return ZERO
    if k.is_constant():
        return p / k.constant_value()
    kt = k._t
    lk = max(kt)
    ck = kt[lk]
    if len(kt) == 1:
        out = {}
        for m, c in p._t.items():
            if not _divides(lk, m):
                return None
            out[m - lk] = cdiv(c, ck)
        return MultiPoly._raw(out)
    r = dict(p._t)
    heap = [-m for m in r]
    heapq.heapify(heap)
    q: dict[int, object] = {}
    others = [(kk, cc) for kk, cc in kt.items() if kk != lk]
    while heap:
        m = -heapq.heappop(heap)
        c = r.pop(m, None)
        if c is None:
            continue
        if m < lk or not _divides(lk, m):
            return None
        qk = m - lk
        qc = cdiv(c, ck)
        q[qk] = qc
        for kk, cc in others:
            key = qk + kk
            old = r.get(key)
            v = (old or 0) - qc * cc
            if v:
                if old is None:
                    heapq.heappush(heap, -key)
                r[key] = v
            elif old is not None:
                del r[key]
    return MultiPoly._raw(q)


def divides(k: MultiPoly, p: MultiPoly) -> bool:
    return exact_divide(p, k) is not None


def _quo(p: MultiPoly, k: MultiPoly) -> MultiPoly:
    q = exact_divide(p, k)
    if q is None:
        raise ArithmeticError("internal error: expected exact division")
    return q


def primitive_rational(p: MultiPoly) -> MultiPoly:
    """Scale to integer coefficients with unit content and positive graded-lex leading coefficient."""
    if p.is_zero():
        return p
    c = p.content()
    if p.leading_coefficient() < 0:
        c = -c
    return p / c


def monic(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    return p / p.leading_coefficient()


def prem(a: MultiPoly, b: MultiPoly, var: str | int) -> MultiPoly:
    """Pseudo-remainder of ``a`` by ``b`` with respect to one variable."""
    i = var if isinstance(var, int) else var_index(var)
    n = _deg(b, i)
    if n < 0:
        raise ZeroDenominator("pseudo-division by zero")
    lcb = _lead_in(b, i)
    r = a
    e = _deg(a, i) - n + 1
    if e <= 0:
        return a
    u = _UNIT[i]
    while not r.is_zero():
        dr = _deg(r, i)
        if dr < n:
            break
        lr = _lead_in(r, i)
        shift = MultiPoly._raw({(dr - n) * u: 1})
        r = lcb * r - lr * shift * b
        e -= 1
    return lcb ** e * r if e > 0 else r


def content_in(p: MultiPoly, var: str | int) -> MultiPoly:
    """Polynomial gcd of the coefficients of ``p`` viewed as a polynomial in ``var``."""
    i = var if isinstance(var, int) else var_index(var)
    coeffs = sorted(_split(p, i).values(), key=len)
    g = ZERO
    for c in coeffs:
        g = gcd(g, c)
        if g.is_constant():
            return ONE
    return g


def _primitive_in(p: MultiPoly, i: int) -> MultiPoly:
    c = content_in(p, i)
    if not c.is_constant():
        p = _quo(p, c)
    return primitive_rational(p)


def _monomial_gcd(m: MultiPoly, p: MultiPoly) -> MultiPoly:
    (km, _), = m._t.items()
    low = list(unpack(km))
    for k in p._t:
        ex = unpack(k)
        low = [min(a, b) for a, b in zip(low, ex)]
    return MultiPoly._raw({pack(low): 1})


def gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Monic (graded-lex) greatest common divisor over the rationals."""
    p, q = as_poly(p), as_poly(q)
    if p.is_zero():
        return monic(q)
    if q.is_zero():
        return monic(p)
    if p.is_constant() or q.is_constant():
        return ONE
    if p == q:
        return monic(p)
    if p.is_monomial():
        return _monomial_gcd(p, q)
    if q.is_monomial():
        return _monomial_gcd(q, p)
    vp, vq = p.var_indices(), q.var_indices()
    common = vp & vq
    if not common:
        return ONE
    if vp != common or vq != common:
        for i in vp - common:
            p = content_in(p, i)
        for i in vq - common:
            q = content_in(q, i)
        return gcd(p, q)
    i = min(common, key=lambda j: max(_deg(p, j), _deg(q, j)))
    cp, cq = content_in(p, i), content_in(q, i)
    c = gcd(cp, cq)
    pp = primitive_rational(_quo(p, cp) if not cp.is_constant() else p)
    qq = primitive_rational(_quo(q, cq) if not cq.is_constant() else q)
    if _deg(pp, i) < _deg(qq, i):
        pp, qq = qq, pp
    while True:
        r = prem(pp, qq, i)
        if r.is_zero():
            g = qq
            break
        if _deg(r, i) == 0:
            g = ONE
            break
        pp, qq = qq, _primitive_in(r, i)
    return monic(c * g)


def lcm(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    g = gcd(p, q)
    return monic(_quo(p, g) * q)


def poly_sqrt(p: MultiPoly) -> MultiPoly | None:
    """Exact square root with positive graded-lex leading coefficient, or ``None``."""
    if p.is_zero():
        return ZERO
    lk = max(p._t)
    lc = p._t[lk]
    if lc < 0:
        return None
    exps = unpack(lk)
    if any(e % 2 for e in exps):
        return None
    r0 = frac_sqrt(Fraction(lc))
    if r0 is None:
        return None
    root_key = pack([e // 2 for e in exps])
    s = {root_key: r0}
    rest = p - MultiPoly._raw({root_key * 2: r0 * r0})
    two_lead = 2 * r0
    top = _total(root_key)
    while not rest.is_zero():
        m = max(rest._t)
        if m < root_key or not _divides(root_key, m):
            return None
        nk = m - root_key
        nc = cdiv(rest._t[m], two_lead)
        if nk >= root_key or _total(nk) > top:
            return None
        piece = MultiPoly._raw({nk: nc})
        cur = MultiPoly._raw(dict(s))
        rest = rest - piece * (cur * 2 + piece)
        s[nk] = nc
    root = MultiPoly._raw(s)
    if root.leading_coefficient() < 0:
        root = -root
    return root


def frac_sqrt(c: Fraction) -> Fraction | None:
    from math import isqrt

    c = Fraction(c)
    if c < 0:
        return None
    n, d = c.numerator, c.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return Fraction(rn, rd)


def univariate(p: MultiPoly, var: str) -> dict[int, MultiPoly]:
    """Coefficients of ``p`` in ``var`` (keys are degrees)."""
    return _split(p, var_index(var))


def from_univariate(parts: Mapping[int, MultiPoly], var: str) -> MultiPoly:
    return _join(parts, var_index(var))


def sum_polys(polys: Iterable[MultiPoly]) -> MultiPoly:
    out: dict[int, object] = {}
    for p in polys:
        for k, c in p._t.items():
            out[k] = out.get(k, 0) + c
    return MultiPoly._raw({k: v for k, v in out.items() if v})
