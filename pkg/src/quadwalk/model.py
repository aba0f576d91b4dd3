"""Step models, their kernels and the named catalog."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterator, Mapping

from .errors import InvalidModel
from .exact_algebra import MultiPoly, RatFunc, parse_ratfunc
from .exact_algebra.poly import VARS, univariate

STEPS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

_X = MultiPoly.var("x")
_Y = MultiPoly.var("y")
_T = MultiPoly.var("t")


def _as_weight(w):
    if isinstance(w, str):
        r = parse_ratfunc(w)
        if not r.is_polynomial():
            raise InvalidModel(f"weight {w!r} must be a number or a polynomial in its symbols")
        w = r.num
    if isinstance(w, MultiPoly):
        return w.constant_value() if w.is_constant() else w
    if isinstance(w, (int, Fraction)):
        return w
    raise InvalidModel(f"unsupported weight {w!r}")


class StepModel:
    """Weighted small-step set.  Symbolic weights may only use ``weight_symbols``."""

    def __init__(self, name: str, steps, weight_symbols: tuple[str, ...] = ()):
        if isinstance(steps, Mapping):
            items = steps.items()
        else:
            items = [(s, 1) for s in steps]
        clean = {}
        for (i, j), w in items:
            if (i, j) not in STEPS:
                raise InvalidModel(f"step {(i, j)} is not a small step")
            w = _as_weight(w)
            if isinstance(w, MultiPoly):
                extra = set(w.variables) - set(weight_symbols)
                if extra:
                    raise InvalidModel(f"weight uses undeclared symbols {sorted(extra)}")
            elif w <= 0:
                raise InvalidModel(f"weight of step {(i, j)} must be positive")
            clean[(i, j)] = w
        if not clean:
            raise InvalidModel("a model needs at least one step")
        self.name = name
        self.step_items = tuple(sorted(clean.items()))
        self.weight_symbols = tuple(weight_symbols)

    @property
    def steps(self) -> dict[tuple[int, int], object]:
        return dict(self.step_items)

    def weight(self, i: int, j: int):
        return self.steps.get((i, j), 0)

    def key(self) -> tuple:
        return tuple((s, str(w)) for s, w in self.step_items)

    def __eq__(self, other):
        if not isinstance(other, StepModel):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __len__(self) -> int:
        return len(self.step_items)

    def is_weighted(self) -> bool:
        return any(w != 1 for _, w in self.step_items)

    def specialize(self, **values) -> "StepModel":
        """Instantiate symbolic weights, e.g. ``specialize(lam=Fraction(3, 2))``."""
        steps = {}
        for s, w in self.step_items:
            if isinstance(w, MultiPoly):
                w = w.subs(values)
                if isinstance(w, MultiPoly) and w.is_constant():
                    w = w.constant_value()
            steps[s] = w
        left = tuple(v for v in self.weight_symbols if v not in values)
        return StepModel(self.name, steps, left)

    def total_weight(self):
        return sum(w for _, w in self.step_items)

    def reflect(self, kind: str) -> "StepModel":
        if kind == "diagonal":
            f = lambda i, j: (j, i)
        elif kind == "vertical":
            f = lambda i, j: (-i, j)
        elif kind == "horizontal":
            f = lambda i, j: (i, -j)
        else:
            raise ValueError(f"unknown reflection {kind!r}")
        return StepModel(f"{self.name}/{kind}", {f(*s): w for s, w in self.step_items}, self.weight_symbols)

    @cached_property
    def kernel(self) -> "Kernel":
        return build_kernel(self)

    def to_json(self) -> str:
        return json.dumps(
            {"name": self.name, "steps": [[i, j, str(w)] for (i, j), w in self.step_items]}
        )

    def __str__(self) -> str:
        parts = [f"({i},{j})" + ("" if w == 1 else f":{w}") for (i, j), w in self.step_items]
        return f"{self.name} {{{', '.join(parts)}}}"


@dataclass(frozen=True)
class Kernel:
    K: MultiPoly
    a: MultiPoly
    b: MultiPoly
    c: MultiPoly
    at: MultiPoly
    bt: MultiPoly
    ct: MultiPoly
    d: MultiPoly
    dt: MultiPoly

    def in_y(self) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        return self.a, self.b, self.c

    def in_x(self) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
        return self.at, self.bt, self.ct


def build_kernel(m: StepModel) -> Kernel:
    """``K = x*y*(t*sum(w x^i y^j) - 1)`` with both quadratic decompositions."""
    K = -_X * _Y
    for (i, j), w in m.step_items:
        K = K + _T * w * MultiPoly.monomial(1, x=i + 1, y=j + 1)
    by_y = univariate(K, "y")
    by_x = univariate(K, "x")
    zero = MultiPoly()
    a, b, c = (by_y.get(k, zero) for k in (2, 1, 0))
    at, bt, ct = (by_x.get(k, zero) for k in (2, 1, 0))
    y, x = _Y, _X
    if a * y * y + b * y + c != K or at * x * x + bt * x + ct != K:
        raise AssertionError("kernel decompositions disagree")
    return Kernel(K, a, b, c, at, bt, ct, b * b - 4 * a * c, bt * bt - 4 * at * ct)


def is_singular(m: StepModel) -> bool:
    return all(i + j >= 0 for (i, j), _ in m.step_items)


def is_vertically_symmetric(m: StepModel) -> bool:
    s = m.steps
    return all(s.get((-i, j)) == w for (i, j), w in s.items())


def all_step_sets() -> Iterator[StepModel]:
    """Every nonempty unweighted subset of the eight small steps (255 models)."""
    for r in range(1, len(STEPS) + 1):
        for combo in combinations(STEPS, r):
            yield StepModel("{" + ",".join(f"({i},{j})" for i, j in combo) + "}", combo)


def vertically_symmetric_models() -> list[StepModel]:
    """Unweighted vertically symmetric models with a genuine 2D walk structure.

    Kept: models with an up step, a down step and some horizontal movement.
    The two sets exchanged by the diagonal reflection are identified, leaving 16.
    """
    out = []
    seen = set()
    for m in all_step_sets():
        s = set(m.steps)
        if not is_vertically_symmetric(m):
            continue
        if not any(j == 1 for _, j in s) or not any(j == -1 for _, j in s):
            continue
        if not any(i != 0 for i, _ in s):
            continue
        if frozenset((j, i) for i, j in s) in seen:
            continue
        seen.add(frozenset(s))
        out.append(m)
    return out


_LAM = MultiPoly.var("lam")

_CATALOG_SPEC: list[tuple[str, dict | list, tuple]] = [
    ("kreweras", [(1, 1), (-1, 0), (0, -1)], ()),
    ("reversed-kreweras", [(-1, -1), (1, 0), (0, 1)], ()),
    ("double-kreweras", [(1, 1), (-1, 0), (0, -1), (-1, -1), (1, 0), (0, 1)], ()),
    ("gessel", [(1, 0), (1, 1), (-1, 0), (-1, -1)], ()),
    (
        "weighted-1",
        {(-1, 0): 1, (-1, -1): 1, (0, -1): _LAM, (1, -1): 1, (1, 0): 2, (1, 1): 1},
        ("lam",),
    ),
    (
        "weighted-2",
        {(-1, 0): 1, (-1, 1): 1, (0, 1): 2, (1, 1): 1, (1, 0): 2, (1, -1): 1, (0, -1): 1},
        (),
    ),
    (
        "weighted-3",
        {(-1, 0): 2, (-1, 1): 1, (0, 1): 1, (-1, -1): 1, (1, 0): 1, (1, -1): 1, (0, -1): 2},
        (),
    ),
    (
        "weighted-4",
        {(-1, 0): 2, (-1, 1): 1, (0, 1): 2, (1, 1): 1, (1, 0): 1, (0, -1): 1, (-1, -1): 1},
        (),
    ),
    ("#1", [(0, 1), (1, 0), (-1, 0), (-1, -1)], ()),
    ("#2", [(0, 1), (1, 0), (-1, 1), (-1, -1)], ()),
    ("#3", [(0, 1), (1, 1), (0, -1), (-1, 0)], ()),
    ("#4", [(0, 1), (1, 0), (1, -1), (-1, 0)], ()),
    ("#5", [(0, 1), (1, 0), (1, 1), (-1, -1), (-1, 0)], ()),
    ("#6", [(0, 1), (0, -1), (1, 1), (-1, -1), (-1, 0)], ()),
    ("#7", [(-1, 1), (-1, 0), (1, 0), (-1, -1), (0, 1)], ()),
    ("#8", [(1, 1), (0, -1), (1, 0), (-1, 0), (0, 1)], ()),
    ("#9", [(1, 0), (0, -1), (0, 1), (-1, 1), (1, -1)], ()),
    # finite-group models without a vertical symmetry, one column each in the invariant table
    ("t3-1", [(1, -1), (-1, 0), (0, 1)], ()),
    ("t3-2", [(1, -1), (-1, 1), (-1, 0), (1, 0), (0, -1), (0, 1)], ()),
    ("t3-3", [(1, 1), (-1, 0), (0, -1)], ()),
    ("t3-4", [(-1, -1), (1, 0), (0, 1)], ()),
    ("t3-5", [(1, 1), (-1, 0), (0, -1), (-1, -1), (1, 0), (0, 1)], ()),
    ("t3-6", [(-1, 1), (1, -1), (-1, 0), (1, 0)], ()),
    ("t3-7", [(1, 1), (-1, -1), (-1, 0), (1, 0)], ()),
    ("sec6-1", [(-1, 0), (0, 1), (1, -1), (1, 0), (0, -1)], ()),
    ("sec6-2", [(-1, 0), (0, 1), (-1, -1), (1, 0), (0, -1)], ()),
    ("sec6-3", [(-1, 1), (0, 1), (-1, -1), (1, 0), (1, -1)], ()),
    ("sec6-4", [(-1, 0), (-1, 1), (0, 1), (-1, -1), (1, 0), (1, -1)], ()),
    ("sec6-5", [(-1, 0), (-1, 1), (0, 1), (-1, -1), (1, 0), (1, -1), (0, -1)], ()),
    ("sec6-6", [(0, 1), (-1, -1), (1, 0), (1, 1)], ()),
]

TABLE1 = ("kreweras", "reversed-kreweras", "double-kreweras", "gessel",
          "weighted-1", "weighted-2", "weighted-3", "weighted-4")
TABLE2 = tuple(f"#{k}" for k in range(1, 10))
TABLE3 = tuple(f"t3-{k}" for k in range(1, 8))
SECTION6 = tuple(f"sec6-{k}" for k in range(1, 7))


def _build_catalog() -> dict[str, StepModel]:
    return {name: StepModel(name, steps, syms) for name, steps, syms in _CATALOG_SPEC}


_CATALOG = _build_catalog()


def catalog() -> list[StepModel]:
    return list(_CATALOG.values())


def get_model(name: str) -> StepModel:
    try:
        return _CATALOG[name]
    except KeyError:
        raise InvalidModel(f"no catalog model named {name!r}") from None


def load_model(selector: str) -> StepModel:
    """Catalog name, or path to a JSON model file ``{"name", "steps": [[i, j, "w"], ...]}``."""
    if selector in _CATALOG:
        return _CATALOG[selector]
    path = Path(selector)
    if path.exists():
        return parse_model_text(path.read_text())
    raise InvalidModel(f"{selector!r} is neither a catalog name nor a model file")


def parse_model_text(text: str) -> StepModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidModel(f"model file is not valid JSON: {exc}") from None
    steps = {}
    for entry in data.get("steps", []):
        if len(entry) == 2:
            i, j = entry
            w = 1
        else:
            i, j, w = entry
        steps[(int(i), int(j))] = w if not isinstance(w, (int, float)) else str(w)
    syms = set()
    for w in steps.values():
        if isinstance(w, str):
            syms |= set(parse_ratfunc(w).variables)
    bad = syms - {"lam", "u"}
    if bad:
        raise InvalidModel(f"weights may not use the walk variables {sorted(bad)}")
    return StepModel(data.get("name", "custom"), steps, tuple(v for v in VARS if v in syms))


def ratfunc_in(var: str, r: RatFunc) -> bool:
    return set(r.variables) <= {var, "t", "lam"}
