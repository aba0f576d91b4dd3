from fractions import Fraction
from itertools import product

import pytest

from quadwalk.enumeration import (
    check_functional_equation,
    count_walks,
    gessel_closed_form,
    q_series,
    q00_coefficients,
    tail_bound,
    tq0y_truncation,
)
from quadwalk.exact_algebra import parse_poly
from quadwalk.model import StepModel, catalog, get_model

SIMPLE = StepModel("simple", [(1, 0), (-1, 0), (0, 1), (0, -1)])


def brute_force(m, n, start=(0, 0)):
    """Enumerate every step word of length ``n`` and keep those staying in the quadrant."""
    out = {}
    steps = m.step_items
    for word in product(steps, repeat=n):
        i, j = start
        w = 1
        for (a, b), wt in word:
            i, j = i + a, j + b
            w *= wt
            if i < 0 or j < 0:
                break
        else:
            out[(i, j)] = out.get((i, j), 0) + w
    return out


@pytest.mark.parametrize("name", ["kreweras", "gessel", "#3", "weighted-2", "#9"])
def test_dp_matches_brute_force(name):
    m = get_model(name)
    table = count_walks(m, 6)
    for n in range(7):
        assert table.layer(n) == brute_force(m, n)


def test_shifted_start_matches_brute_force():
    m = get_model("kreweras")
    table = count_walks(m, 5, start=(2, 1))
    assert table.layer(5) == brute_force(m, 5, (2, 1))


def test_known_counts():
    assert count_walks(get_model("kreweras"), 3).q(0, 0, 3) == 2
    g = count_walks(get_model("gessel"), 4)
    assert (g.q(0, 0, 2), g.q(0, 0, 4)) == (2, 11)
    t0 = count_walks(get_model("#5"), 0)
    assert t0.layer(0) == {(0, 0): 1}


def test_count_table_invariants():
    m = get_model("double-kreweras")
    table = count_walks(m, 8)
    for n in range(9):
        # the (1,1) step reaches i + j = 2n, so the reachable box is max(i, j) <= n
        assert all(max(i, j) <= n and v > 0 for (i, j), v in table.layer(n).items())
        assert table.total(n) <= len(m) ** n


def test_total_without_boundary_equals_power():
    m = StepModel("ne", [(1, 0), (0, 1)])
    table = count_walks(m, 6)
    assert [table.total(n) for n in range(7)] == [2 ** n for n in range(7)]


def test_parity_obstruction():
    # every Gessel step changes i by one, so i has the parity of n
    table = count_walks(get_model("gessel"), 9)
    for n in range(10):
        assert all((i - n) % 2 == 0 for i, _ in table.layer(n))


@pytest.mark.parametrize("n", range(9))
def test_gessel_closed_form(n):
    assert gessel_closed_form(n) == count_walks(get_model("gessel"), 2 * n).q(0, 0, 2 * n)


def test_gessel_closed_form_small():
    assert gessel_closed_form(0) == 1 and gessel_closed_form(1) == 2
    with pytest.raises(ValueError):
        gessel_closed_form(-1)


def test_simple_walk_first_order():
    qs = q_series(SIMPLE, 2)
    assert qs.coeffs[1] == parse_poly("x + y")


def test_gessel_S_definition():
    qs = q_series(get_model("gessel"), 6)
    Q0y = qs.section("x")
    S = qs.S()
    for n in range(6):
        expected = parse_poly("1 + y") * Q0y[n - 1] if n else parse_poly("0")
        assert S[n] == expected


@pytest.mark.parametrize("m", catalog(), ids=lambda m: m.name)
def test_functional_equation_catalog(m):
    assert check_functional_equation(m, 12).ok


def test_functional_equation_weighted_instance():
    m = get_model("weighted-1").specialize(lam=Fraction(3, 2))
    assert check_functional_equation(m, 10).ok


def test_corrupted_table_is_flagged():
    m = get_model("kreweras")
    table = count_walks(m, 6).with_entry(1, 1, 4, 7)
    report = check_functional_equation(m, 6, table)
    assert not report.ok
    assert report.nonzero[0][0] <= 5


def test_truncation_and_tail():
    m = get_model("kreweras")
    coeffs = q00_coefficients(m, 9)
    assert coeffs[:10] == [1, 0, 0, 2, 0, 0, 16, 0, 0, 192]
    t = Fraction(1, 10)
    table = count_walks(m, 10)
    assert tq0y_truncation(table, t, 0) == sum(t ** (n + 1) * c for n, c in enumerate(q00_coefficients(m, 10)))
    assert tail_bound(m, t, 10) == pytest.approx(0.3 ** 11 / 0.7)
    assert tail_bound(m, Fraction(1, 2), 10) == float("inf")


def test_errors():
    with pytest.raises(ValueError):
        count_walks(SIMPLE, -1)
    with pytest.raises(ValueError):
        count_walks(SIMPLE, 2, start=(-1, 0))
    with pytest.raises(ValueError):
        q_series(SIMPLE, 0)
