"""Rational invariants and decoupling pairs: exact verification, search and the built-in tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import BranchPole, NotAnInvariant
from .exact_algebra import (
    ONE,
    MultiPoly,
    RatFunc,
    as_ratfunc,
    exact_divide,
    linsolve_over_Qt,
    parse_ratfunc,
    resultant,
    symmetrize,
)
from .exact_algebra.poly import univariate
from .model import StepModel, get_model, is_vertically_symmetric, vertically_symmetric_models

_PARAMS = {"t", "lam"}


def _free_of_other_variable(r: RatFunc, var: str) -> bool:
    return set(r.variables) <= _PARAMS | {var}


@dataclass(frozen=True)
class InvariantPair:
    I1: RatFunc
    I2: RatFunc

    def __post_init__(self):
        object.__setattr__(self, "I1", as_ratfunc(self.I1))
        object.__setattr__(self, "I2", as_ratfunc(self.I2))
        if not _free_of_other_variable(self.I1, "x") or not self.I1.depends_on("x"):
            raise ValueError(f"I1 must be a non-constant rational function of x: {self.I1}")
        if not _free_of_other_variable(self.I2, "y") or not self.I2.depends_on("y"):
            raise ValueError(f"I2 must be a non-constant rational function of y: {self.I2}")

    @classmethod
    def parse(cls, i1: str, i2: str) -> "InvariantPair":
        return cls(parse_ratfunc(i1), parse_ratfunc(i2))


@dataclass(frozen=True)
class DecouplingPair:
    F: RatFunc
    G: RatFunc

    def __post_init__(self):
        object.__setattr__(self, "F", as_ratfunc(self.F))
        object.__setattr__(self, "G", as_ratfunc(self.G))
        if not _free_of_other_variable(self.F, "x"):
            raise ValueError(f"F must be a rational function of x: {self.F}")
        if not _free_of_other_variable(self.G, "y"):
            raise ValueError(f"G must be a rational function of y: {self.G}")

    @classmethod
    def parse(cls, f: str, g: str) -> "DecouplingPair":
        return cls(parse_ratfunc(f), parse_ratfunc(g))


def _check_poles(m: StepModel, r: RatFunc, var: str):
    """A denominator sharing a factor with the kernel would blow up on a branch."""
    den = r.den
    if den.is_constant() or var not in den.variables:
        return
    if resultant(m.kernel.K, den, var).is_zero():
        raise BranchPole(f"denominator {den} shares a factor with the kernel of {m.name}")


def _vanishes_on_kernel(m: StepModel, r: RatFunc) -> bool:
    return r.is_zero() or exact_divide(r.num, m.kernel.K) is not None


def verify_invariant(m: StepModel, p: InvariantPair) -> bool:
    """``I1(x) - I2(y)`` vanishes on ``K = 0``: the kernel divides the cleared numerator."""
    _check_poles(m, p.I1, "x")
    _check_poles(m, p.I2, "y")
    return _vanishes_on_kernel(m, p.I1 - p.I2)


def verify_invariant_symmetric(m: StepModel, p: InvariantPair) -> bool:
    """Second route: ``I2(Y0) = I2(Y1)`` (zero discriminant) and their common value is ``I1``."""
    s, q = symmetrize(p.I2, m)
    if not (s * s - 4 * q).is_zero():
        return False
    return s == 2 * p.I1


def induced_x_invariant(m: StepModel, I2) -> RatFunc:
    I2 = as_ratfunc(I2)
    s, q = symmetrize(I2, m)
    if not (s * s - 4 * q).is_zero():
        raise NotAnInvariant(f"{I2} takes different values on the two kernel branches of {m.name}")
    return s / 2


def verify_decoupling(m: StepModel, p: DecouplingPair) -> bool:
    """``xy - F(x) - G(y)`` vanishes on ``K = 0``."""
    _check_poles(m, p.F, "x")
    _check_poles(m, p.G, "y")
    xy = RatFunc(MultiPoly.monomial(1, x=1, y=1))
    return _vanishes_on_kernel(m, xy - p.F - p.G)


def F_from_G(m: StepModel, G) -> RatFunc | None:
    """``F = (x (Y0 + Y1) - G(Y0) - G(Y1)) / 2``, kept only if the pair verifies."""
    G = as_ratfunc(G)
    F = _F_candidate(m, G)
    if not verify_decoupling(m, DecouplingPair(F, G)):
        return None
    return F


def _F_candidate(m: StepModel, G: RatFunc) -> RatFunc:
    k = m.kernel
    sG, _ = symmetrize(G, m)
    return (RatFunc.var("x") * RatFunc(-k.b, k.a) - sG) / 2


# -- search -----------------------------------------------------------------


@dataclass(frozen=True)
class Ansatz:
    """Span of ``y^k`` for ``k`` in ``laurent_range`` (constant excluded) and ``(y - p)^-e``."""

    laurent_range: tuple[int, int] = (-2, 2)
    pole_locations: tuple[tuple[Fraction, int], ...] = ()
    t_degree_bound: int | None = None

    def __post_init__(self):
        lo, hi = self.laurent_range
        if lo > 0 or hi < 0:
            raise ValueError("laurent_range must contain 0")
        poles = []
        for p, mult in self.pole_locations:
            p = Fraction(p)
            if p == 0:
                raise ValueError("a pole at 0 is expressed through laurent_range")
            if mult < 1:
                raise ValueError("pole multiplicities must be positive")
            poles.append((p, int(mult)))
        object.__setattr__(self, "pole_locations", tuple(poles))

    def basis(self) -> list[tuple[str, object, int]]:
        """Ordered basis: ``y^-1, y, y^-2, y^2, ...`` then poles by increasing multiplicity."""
        lo, hi = self.laurent_range
        out = []
        for k in range(1, max(-lo, hi) + 1):
            if k <= -lo:
                out.append(("laurent", 0, -k))
            if k <= hi:
                out.append(("laurent", 0, k))
        top = max((mult for _, mult in self.pole_locations), default=0)
        for e in range(1, top + 1):
            for p, mult in self.pole_locations:
                if e <= mult:
                    out.append(("pole", p, e))
        return out


def _basis_function(kind: str, p, e: int) -> RatFunc:
    y = MultiPoly.var("y")
    if kind == "laurent":
        return RatFunc(y ** e) if e > 0 else RatFunc(ONE, y ** (-e))
    return RatFunc(ONE, (y - MultiPoly.const(p)) ** e)


def _h_sequence(b: MultiPoly, ac: MultiPoly, n: int) -> list[MultiPoly]:
    """``H_0 = 1, H_1 = -b, H_k = -b H_{k-1} - ac H_{k-2}``; ``h_k(Y0, Y1) = H_k / a^k``."""
    hs = [ONE, -b]
    while len(hs) < n:
        hs.append(-b * hs[-1] - ac * hs[-2])
    return hs[:n]


def _divided_differences(m: StepModel, basis) -> tuple[list[MultiPoly], MultiPoly]:
    """Numerators ``N_k`` over a common denominator ``L`` of ``(phi_k(Y0) - phi_k(Y1)) / (Y0 - Y1)``."""
    k = m.kernel
    a, b, c = k.a, k.b, k.c
    pos = max([e for kind, _, e in basis if kind == "laurent" and e > 0], default=0)
    neg = max([-e for kind, _, e in basis if kind == "laurent" and e < 0], default=0)
    poles: dict[Fraction, int] = {}
    for kind, p, e in basis:
        if kind == "pole":
            poles[p] = max(poles.get(p, 0), e)
    shifted = {}
    for p in poles:
        pp = MultiPoly.const(p)
        shifted[p] = (b + 2 * a * pp, a * pp * pp + b * pp + c)
    L = a ** max(pos - 1, 0) * c ** neg
    for p, e in poles.items():
        L = L * shifted[p][1] ** e
    top = max([pos, neg] + list(poles.values()) + [1])
    H = _h_sequence(b, a * c, top)
    Hp = {p: _h_sequence(bp, a * cp, poles[p]) for p, (bp, cp) in shifted.items()}
    nums = []
    for kind, p, e in basis:
        if kind == "laurent" and e > 0:
            num, den = H[e - 1], a ** (e - 1)
        elif kind == "laurent":
            num, den = -a * H[-e - 1], c ** (-e)
        else:
            num, den = -a * Hp[p][e - 1], shifted[p][1] ** e
        q = exact_divide(L * num, den)
        if q is None:
            raise ArithmeticError("common denominator does not clear a divided difference")
        nums.append(q)
    return nums, L


def search_decoupling(m: StepModel, ansatz: Ansatz = Ansatz()) -> DecouplingPair | None:
    """Solve ``x = sum g_k (phi_k(Y0) - phi_k(Y1)) / (Y0 - Y1)`` for ``g_k`` in Q(t).

    Returns a verified pair, or ``None``: no certificate within this ansatz.
    """
    basis = ansatz.basis()
    if not basis:
        return None
    k = m.kernel
    if k.a.is_zero() or k.c.is_zero():
        return None
    nums, L = _divided_differences(m, basis)
    target = MultiPoly.var("x") * L
    cols = [univariate(n, "x") for n in nums]
    rhs = univariate(target, "x")
    degs = set(rhs)
    for col in cols:
        degs |= set(col)
    system, vec = [], []
    zero = MultiPoly()
    for d in sorted(degs):
        system.append([col.get(d, zero) for col in cols])
        vec.append(rhs.get(d, zero))
    sol = linsolve_over_Qt(system, vec)
    if sol is None:
        return None
    G = RatFunc(MultiPoly())
    for g, (kind, p, e) in zip(sol, basis):
        if not g.is_zero():
            G = G + g * _basis_function(kind, p, e)
    F = F_from_G(m, G)
    if F is None:
        return None
    return DecouplingPair(F, G)


def equivalent_up_to_constant(G1, G2) -> bool:
    """Decoupling functions are defined up to ``G -> G + c(t)``."""
    d = as_ratfunc(G1) - as_ratfunc(G2)
    return "x" not in d.variables and "y" not in d.variables


# -- reflections ---------------------------------------------------------------


def _swap_xy(r: RatFunc) -> RatFunc:
    return r.subs({"x": RatFunc.var("y"), "y": RatFunc.var("x")})


def _invert(r: RatFunc, var: str) -> RatFunc:
    return r.subs({var: RatFunc.var(var).inverse()})


def reflect_certificates(p: InvariantPair, kind: str) -> InvariantPair:
    """Invariants of the reflected model: diagonal swaps roles, vertical sends x to 1/x."""
    if kind == "diagonal":
        return InvariantPair(_swap_xy(p.I2), _swap_xy(p.I1))
    if kind == "vertical":
        return InvariantPair(_invert(p.I1, "x"), p.I2)
    if kind == "horizontal":
        return reflect_certificates(
            reflect_certificates(reflect_certificates(p, "diagonal"), "vertical"), "diagonal"
        )
    raise ValueError(f"unknown reflection {kind!r}")


# -- built-in tables -----------------------------------------------------------


def symmetric_pair(m: StepModel) -> InvariantPair:
    """For a vertically symmetric model: ``I1 = x + 1/x`` and ``I2 = -bt(y)/at(y)``."""
    if not is_vertically_symmetric(m):
        raise ValueError(f"{m.name} is not vertically symmetric")
    k = m.kernel
    x = RatFunc.var("x")
    return InvariantPair(x + x.inverse(), RatFunc(-k.bt, k.at))


_P = parse_ratfunc

# Invariants of the seven finite-group models without vertical symmetry.
TABLE3_INVARIANTS = {
    "t3-1": ("t/x^2 - 1/x - t*x", "t*y^2 - y - t/y"),
    "t3-2": ("t*x - t/x - (1+2*t)/(1+1/x)", "t/y - t*y - (1+2*t)/(1+y)"),
    "t3-3": ("t/x^2 - 1/x - t*x", "t/y^2 - 1/y - t*y"),
    "t3-4": ("t*x^2 - x - t/x", "t*y^2 - y - t/y"),
    "t3-5": ("t/x - t*x - (1+2*t)/(1+x)", "t/y - t*y - (1+2*t)/(1+y)"),
    "t3-6": ("x + 1/x - t*x^2 - t/x^2", "y/(t*(1+y)^2) + t*(1+y)^2/y - 2*t"),
    "t3-7": ("-t/x^2 + 1/x + 2*t + x - t*x^2", "1/(t*(1+y)*(1+1/y)) + t*(1+y)*(1+1/y)"),
}

WEIGHTED_INVARIANTS = {
    "weighted-1": (
        "t*(1+lam*t)*x + t/x - t^2/x^2 - t^2",
        "t^2*y + (1+lam*t)/(y+1) - ((1+lam*t)/(y+1))^2",
    ),
    "weighted-2": (
        "t^2/x^2 - (1+2*t)*t/x - (3*t+1)*t*x - (1+3*t)*(4*t+1)/(x+1) + (3*t+1)^2/(x+1)^2",
        "t^2/y^2 - (1+2*t)*t/y - (3*t+1)*t*y - (1+3*t)*(4*t+1)/(y+1) + (3*t+1)^2/(y+1)^2",
    ),
}

# Reflection recipes for the remaining weighted models, from weighted-2.
WEIGHTED_REFLECTIONS = {"weighted-3": ("vertical", "horizontal"), "weighted-4": ("vertical",)}

DECOUPLING_G = {
    "kreweras": "-1/y",
    "reversed-kreweras": "-1/y",
    "double-kreweras": "-1/y",
    "gessel": "-1/(t*(1+y))",
    "weighted-1": "-(1+lam*t)/(t*(1+y))",
    "weighted-2": "-y + 1/y - (1+3*t)/(t*(1+y))",
    "weighted-3": "-y^2 + y*(1+1/t) + (3+1/t)/y",
    "weighted-4": "-y - 1/y",
    "#1": "-1/y",
    "#2": "-y - 1/y",
    "#3": "-y - 1/y",
    "#4": "-y^2 + y/t + 1/y",
    "#5": "-(1+t)/(t*(y+1)) - y",
    "#6": "-1/y",
    "#7": "-y - 1/y",
    "#8": "-1/y - y",
    "#9": "-1/y^2 + 1/(t*y) + (t+1)*y/t - y^2",
}

KNOWN_F = {"gessel": "1/t - 1/x"}

# Table-3 model each finite-group catalog model shares its step set with.
_SAME_STEPS = {"kreweras": "t3-3", "reversed-kreweras": "t3-4", "double-kreweras": "t3-5", "gessel": "t3-7"}


@dataclass(frozen=True)
class CertificateEntry:
    model: StepModel
    invariant: InvariantPair | None
    decoupling: DecouplingPair | None
    source: str = field(default="table")


def _invariant_for(name: str) -> tuple[InvariantPair | None, str]:
    key = _SAME_STEPS.get(name, name)
    if key in TABLE3_INVARIANTS:
        return InvariantPair.parse(*TABLE3_INVARIANTS[key]), "table"
    if name in WEIGHTED_INVARIANTS:
        return InvariantPair.parse(*WEIGHTED_INVARIANTS[name]), "table"
    if name in WEIGHTED_REFLECTIONS:
        p = InvariantPair.parse(*WEIGHTED_INVARIANTS["weighted-2"])
        for kind in WEIGHTED_REFLECTIONS[name]:
            p = reflect_certificates(p, kind)
        return p, "reflection"
    return None, "table"


def builtin_certificate_table(check: bool = True) -> dict[str, CertificateEntry]:
    """Every stored certificate, verified on construction unless ``check`` is false."""
    names = list(DECOUPLING_G) + [n for n in TABLE3_INVARIANTS if n not in DECOUPLING_G]
    table: dict[str, CertificateEntry] = {}
    for name in names:
        m = get_model(name)
        inv, source = _invariant_for(name)
        dec = None
        if name in DECOUPLING_G:
            G = parse_ratfunc(DECOUPLING_G[name])
            F = parse_ratfunc(KNOWN_F[name]) if name in KNOWN_F else F_from_G(m, G)
            if F is None:
                raise AssertionError(f"{name}: stored G does not decouple")
            dec = DecouplingPair(F, G)
        table[name] = CertificateEntry(m, inv, dec, source)
    for m in vertically_symmetric_models():
        table[f"sym:{m.name}"] = CertificateEntry(m, symmetric_pair(m), None, "vertical-symmetry")
    if check:
        for name, entry in table.items():
            if entry.invariant is not None and not verify_invariant(entry.model, entry.invariant):
                raise AssertionError(f"{name}: stored invariant pair fails verification")
            if entry.decoupling is not None and not verify_decoupling(entry.model, entry.decoupling):
                raise AssertionError(f"{name}: stored decoupling pair fails verification")
    return table


def verify_entries(entries: Iterable[tuple[str, CertificateEntry]]) -> list[tuple[str, str, bool]]:
    out = []
    for name, e in entries:
        if e.invariant is not None:
            out.append((name, "invariant", verify_invariant(e.model, e.invariant)))
        if e.decoupling is not None:
            out.append((name, "decoupling", verify_decoupling(e.model, e.decoupling)))
    return out


# -- certificate files -------------------------------------------------------------


@dataclass(frozen=True)
class CertificateFile:
    model: StepModel
    invariant: InvariantPair | None
    decoupling: DecouplingPair | None


def parse_certificate_text(text: str) -> CertificateFile:
    """``key: value`` lines with keys ``model``, ``I1``, ``I2``, ``F``, ``G``.

    Lines starting with ``#`` are comments (model names such as ``#3`` are values, not comments).
    """
    from .model import load_model

    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"malformed certificate line {raw!r}")
        key, value = line.split(":", 1)
        fields[key.strip()] = value.strip()
    if "model" not in fields:
        raise ValueError("certificate file lacks a model field")
    m = load_model(fields["model"])
    inv = dec = None
    if "I1" in fields or "I2" in fields:
        inv = InvariantPair.parse(fields["I1"], fields["I2"])
    if "G" in fields:
        G = parse_ratfunc(fields["G"])
        F = parse_ratfunc(fields["F"]) if "F" in fields else _F_candidate(m, G)
        dec = DecouplingPair(F, G)
    return CertificateFile(m, inv, dec)


def format_certificate(name: str, inv: InvariantPair | None, dec: DecouplingPair | None) -> str:
    lines = [f"model: {name}"]
    if inv is not None:
        lines += [f"I1: {inv.I1}", f"I2: {inv.I2}"]
    if dec is not None:
        lines += [f"F: {dec.F}", f"G: {dec.G}"]
    return "\n".join(lines) + "\n"
