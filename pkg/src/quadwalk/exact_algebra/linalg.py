"""Fraction-free linear algebra over polynomial rings and their fraction fields."""

from __future__ import annotations

from typing import Sequence

from .poly import ONE, ZERO, MultiPoly, _quo, as_poly, lcm, univariate
from .ratfunc import RatFunc, as_ratfunc


def bareiss_det(matrix: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant by Bareiss' fraction-free elimination (all divisions exact)."""
    a = [[as_poly(v) for v in row] for row in matrix]
    n = len(a)
    if n == 0:
        return ONE
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k].is_zero():
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return ZERO
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                v = piv * a[i][j] - aik * a[k][j]
                a[i][j] = v if prev == ONE else _quo(v, prev)
            a[i][k] = ZERO
        prev = piv
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester(p: MultiPoly, q: MultiPoly, var: str) -> list[list[MultiPoly]]:
    pc = univariate(p, var)
    qc = univariate(q, var)
    m = max(pc) if pc else 0
    n = max(qc) if qc else 0
    size = m + n
    rows = []
    for i in range(n):
        row = [ZERO] * size
        for d, c in pc.items():
            row[i + m - d] = c
        rows.append(row)
    for i in range(m):
        row = [ZERO] * size
        for d, c in qc.items():
            row[i + n - d] = c
        rows.append(row)
    return rows


def resultant(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Sylvester resultant of ``p`` and ``q`` with respect to ``var``."""
    p, q = as_poly(p), as_poly(q)
    if p.is_zero() or q.is_zero():
        return ZERO
    if p.degree(var) == 0:
        return p ** q.degree(var)
    if q.degree(var) == 0:
        return q ** p.degree(var)
    return bareiss_det(sylvester(p, q, var))


def linsolve_over_Qt(system: Sequence[Sequence], rhs: Sequence) -> list[RatFunc] | None:
    """One solution of ``system * v = rhs`` over the rational function field, or ``None``.

    Rows are cleared to polynomials, then eliminated with Bareiss' fraction-free
    scheme.  Columns without a pivot are free and set to zero.
    """
    m = len(system)
    if m != len(rhs):
        raise ValueError("row count of system and rhs differ")
    n = len(system[0]) if m else 0
    rows = []
    for row, b in zip(system, rhs):
        if len(row) != n:
            raise ValueError("ragged system matrix")
        entries = [as_ratfunc(v) for v in row] + [as_ratfunc(b)]
        den = ONE
        for e in entries:
            if e.den != ONE:
                den = lcm(den, e.den)
        rows.append([_quo(e.num * den, e.den) if e.den != ONE else e.num * den for e in entries])
    pivots: list[tuple[int, int]] = []
    r = 0
    prev = ONE
    for col in range(n):
        if r >= m:
            break
        p = next((i for i in range(r, m) if not rows[i][col].is_zero()), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][col]
        for i in range(r + 1, m):
            aic = rows[i][col]
            if aic.is_zero() and piv == prev:
                continue
            for j in range(col + 1, n + 1):
                v = piv * rows[i][j] - aic * rows[r][j]
                rows[i][j] = v if prev == ONE else _quo(v, prev)
            rows[i][col] = ZERO
        prev = piv
        pivots.append((r, col))
        r += 1
    for i in range(r, m):
        if not rows[i][n].is_zero():
            return None
    sol = [RatFunc(ZERO)] * n
    for row_i, col in reversed(pivots):
        acc = RatFunc(rows[row_i][n])
        for j in range(col + 1, n):
            if not rows[row_i][j].is_zero() and not sol[j].is_zero():
                acc = acc - sol[j] * rows[row_i][j]
        sol[col] = acc / RatFunc(rows[row_i][col])
    return sol
