"""The group of a model: the involutions Phi, Psi and bounded orbit exploration.

Orbit elements are tracked through their values at random points modulo a large
prime.  Distinct values certify distinct rational maps, so a count above the bound
is a sound "not finite within" verdict.  Coincident values are only trusted after
the finite orbit has been rebuilt symbolically and checked closed under both maps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateKernel
from .exact_algebra import MultiPoly, RatFunc
from .exact_algebra.poly import VARS, unpack, var_index
from .model import StepModel

PRIME = (1 << 61) - 1
DEFAULT_BOUND = 400

_X = RatFunc.var("x")
_Y = RatFunc.var("y")


@dataclass(frozen=True)
class BirationalPair:
    fx: RatFunc
    fy: RatFunc

    def __call__(self, other: "BirationalPair") -> "BirationalPair":
        """Composition ``self o other``."""
        vals = {"x": other.fx, "y": other.fy}
        return BirationalPair(_subs(self.fx, vals), _subs(self.fy, vals))

    def __str__(self) -> str:
        return f"({self.fx}, {self.fy})"


IDENTITY = BirationalPair(_X, _Y)


def _subs(r: RatFunc, vals) -> RatFunc:
    out = r.subs(vals)
    return out if isinstance(out, RatFunc) else RatFunc.of(out)


def _check(m: StepModel):
    k = m.kernel
    for name in ("a", "c", "at", "ct"):
        if getattr(k, name).is_zero():
            raise DegenerateKernel(f"{m.name}: kernel coefficient {name} vanishes identically")
    return k


def phi(m: StepModel) -> BirationalPair:
    """``(x, y) -> (ct(y) / (at(y) x), y)``."""
    k = _check(m)
    return BirationalPair(RatFunc(k.ct, k.at * MultiPoly.var("x")), _Y)


def psi(m: StepModel) -> BirationalPair:
    """``(x, y) -> (x, c(x) / (a(x) y))``."""
    k = _check(m)
    return BirationalPair(_X, RatFunc(k.c, k.a * MultiPoly.var("y")))


def is_involution(g: BirationalPair) -> bool:
    return g(g) == IDENTITY


@dataclass(frozen=True)
class OrbitReport:
    verdict: str
    order: int | None
    bound: int
    explored: int
    elements: tuple[BirationalPair, ...] = field(default=(), repr=False)
    words: tuple[str, ...] = field(default=(), repr=False)

    @property
    def finite(self) -> bool:
        return self.verdict == "finite"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "bound": self.bound}
        if self.finite:
            out["order"] = self.order
            out["elements"] = [[str(e.fx), str(e.fy)] for e in self.elements]
        else:
            out["explored"] = self.explored
        return out


class _ModEval:
    """Evaluate polynomials modulo ``PRIME`` with fixed random values for ``t`` and ``lam``."""

    def __init__(self, rng: random.Random):
        self.params = {var_index("t"): rng.randrange(2, PRIME), var_index("lam"): rng.randrange(2, PRIME)}

    def poly(self, p: MultiPoly, var: str, value: int) -> int:
        vals = dict(self.params)
        vals[var_index(var)] = value
        total = 0
        for key, c in p.items():
            c = Fraction(c)
            term = c.numerator * pow(c.denominator, -1, PRIME)
            for i, e in enumerate(unpack(key)):
                if e:
                    term = term * pow(vals[i], e, PRIME)
            total = (total + term) % PRIME
        return total


def _inv(v: int) -> int:
    if v % PRIME == 0:
        raise ZeroDivisionError
    return pow(v, -1, PRIME)


def orbit(m: StepModel, bound: int = DEFAULT_BOUND, seed: int = 20240517, points: int = 2) -> OrbitReport:
    if bound < 2:
        raise ValueError("bound must be at least 2")
    k = _check(m)
    for attempt in range(8):
        rng = random.Random(seed + attempt)
        ev = _ModEval(rng)
        start = tuple((rng.randrange(2, PRIME), rng.randrange(2, PRIME)) for _ in range(points))
        try:
            result = _explore(k, ev, start, bound)
        except ZeroDivisionError:
            continue
        break
    else:
        raise ArithmeticError("could not find evaluation points avoiding every pole")
    seen_words, explored = result
    if explored > bound:
        return OrbitReport("not-finite-within", None, bound, explored)
    elements = _symbolic_closure(m, seen_words)
    if elements is None:
        return OrbitReport("not-finite-within", None, bound, explored)
    return OrbitReport("finite", len(elements), bound, explored, tuple(elements), tuple(seen_words))


def _explore(k, ev: _ModEval, start, bound: int):
    def apply(word_char, pts):
        out = []
        for X, Y in pts:
            if word_char == "P":
                X = ev.poly(k.ct, "y", Y) * _inv(ev.poly(k.at, "y", Y) * X % PRIME) % PRIME
            else:
                Y = ev.poly(k.c, "x", X) * _inv(ev.poly(k.a, "x", X) * Y % PRIME) % PRIME
            out.append((X, Y))
        return tuple(out)

    seen = {start: ""}
    frontier = [start]
    while frontier:
        nxt = []
        for pts in frontier:
            word = seen[pts]
            for ch in "PS":
                if word.startswith(ch):
                    continue
                img = apply(ch, pts)
                if img not in seen:
                    seen[img] = ch + word
                    nxt.append(img)
                    if len(seen) > bound:
                        return list(seen.values()), len(seen)
        frontier = nxt
    return list(seen.values()), len(seen)


def _symbolic_closure(m: StepModel, words: list[str]) -> list[BirationalPair] | None:
    gens = {"P": phi(m), "S": psi(m)}
    elements: dict[BirationalPair, str] = {}
    for w in sorted(words, key=len):
        g = IDENTITY
        for ch in reversed(w):
            g = gens[ch](g)
        elements[g] = w
    if len(elements) != len(words):
        return None
    for g in list(elements):
        for gen in gens.values():
            if gen(g) not in elements:
                return None
    return list(elements)


def group_generators(m: StepModel) -> dict[str, BirationalPair]:
    return {"phi": phi(m), "psi": psi(m)}


__all__ = ["BirationalPair", "OrbitReport", "phi", "psi", "orbit", "is_involution", "IDENTITY", "VARS"]
