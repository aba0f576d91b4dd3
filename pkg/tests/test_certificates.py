import random
from fractions import Fraction

import pytest

from quadwalk.certificates import (
    DECOUPLING_G,
    TABLE3_INVARIANTS,
    Ansatz,
    DecouplingPair,
    F_from_G,
    InvariantPair,
    builtin_certificate_table,
    equivalent_up_to_constant,
    format_certificate,
    induced_x_invariant,
    parse_certificate_text,
    reflect_certificates,
    search_decoupling,
    symmetric_pair,
    verify_decoupling,
    verify_entries,
    verify_invariant,
    verify_invariant_symmetric,
)
from quadwalk.errors import BranchPole, NotAnInvariant
from quadwalk.exact_algebra import RatFunc, parse_ratfunc
from quadwalk.model import StepModel, get_model, vertically_symmetric_models

GESSEL_I2 = "1/(t*(1+y)*(1+1/y)) + t*(1+y)*(1+1/y)"
GESSEL_I1 = "-t/x^2 + 1/x + 2*t + x - t*x^2"


def test_invariant_examples():
    kre = get_model("kreweras")
    assert verify_invariant(kre, InvariantPair.parse(*TABLE3_INVARIANTS["t3-3"]))
    assert verify_invariant(get_model("gessel"), InvariantPair.parse(GESSEL_I1, GESSEL_I2))
    assert not verify_invariant(kre, InvariantPair.parse("x", "y"))


def test_induced_x_invariant():
    assert induced_x_invariant(get_model("gessel"), parse_ratfunc(GESSEL_I2)) == parse_ratfunc(GESSEL_I1)
    kre = get_model("kreweras")
    assert induced_x_invariant(kre, parse_ratfunc("t/y^2 - 1/y - t*y")) == parse_ratfunc("t/x^2 - 1/x - t*x")
    rev = get_model("reversed-kreweras")
    assert induced_x_invariant(rev, parse_ratfunc("t*y^2 - y - t/y")) == parse_ratfunc("t*x^2 - x - t/x")
    with pytest.raises(NotAnInvariant):
        induced_x_invariant(kre, RatFunc.var("y"))


def test_symmetric_pair_x_part():
    m = StepModel("simple", [(1, 0), (-1, 0), (0, 1), (0, -1)])
    p = symmetric_pair(m)
    assert p.I1 == parse_ratfunc("x + 1/x")
    assert induced_x_invariant(m, p.I2) == p.I1


def test_decoupling_examples():
    g = get_model("gessel")
    assert verify_decoupling(g, DecouplingPair.parse("1/t - 1/x", "-1/(t*(1+y))"))
    assert F_from_G(g, parse_ratfunc("-1/(t*(1+y))")) == parse_ratfunc("1/t - 1/x")
    m4 = get_model("#4")
    G4 = parse_ratfunc(DECOUPLING_G["#4"])
    assert verify_decoupling(m4, DecouplingPair(F_from_G(m4, G4), G4))
    assert F_from_G(get_model("#1"), parse_ratfunc("-1/y")) is not None
    kre = get_model("kreweras")
    assert not verify_decoupling(kre, DecouplingPair.parse("0", "0"))
    assert F_from_G(kre, RatFunc.var("y")) is None


def test_branch_pole():
    # 1/(x*y - t*...) shares a factor with the kernel of the simple walk
    m = StepModel("ne", [(1, 1)])
    with pytest.raises(BranchPole):
        verify_decoupling(m, DecouplingPair(RatFunc.of(0), RatFunc(1, m.kernel.K.subs({"x": 1}))))


def test_invariant_pair_rejects_constants():
    with pytest.raises(ValueError):
        InvariantPair.parse("t", "y")
    with pytest.raises(ValueError):
        InvariantPair.parse("x*y", "y")


def test_builtin_table_contents():
    table = builtin_certificate_table()
    g = table["gessel"]
    assert g.invariant is not None and g.decoupling is not None
    w1 = table["weighted-1"]
    assert w1.invariant.I2 == parse_ratfunc("t^2*y + (1+lam*t)/(y+1) - ((1+lam*t)/(y+1))^2")
    assert w1.decoupling.G == parse_ratfunc("-(1+lam*t)/(t*(1+y))")
    assert table["#5"].invariant is None
    assert table["#5"].decoupling.G == parse_ratfunc("-(1+t)/(t*(y+1)) - y")
    assert sum(1 for k in table if k.startswith("sym:")) == 16
    assert all(ok for _, _, ok in verify_entries(table.items()))


def test_finite_group_models_have_both_pairs():
    table = builtin_certificate_table(check=False)
    for name in ("kreweras", "reversed-kreweras", "double-kreweras", "gessel",
                 "weighted-1", "weighted-2", "weighted-3", "weighted-4"):
        assert table[name].invariant is not None and table[name].decoupling is not None


def test_reflections():
    kre = InvariantPair.parse(*TABLE3_INVARIANTS["t3-3"])
    swapped = reflect_certificates(kre, "diagonal")
    assert verify_invariant(get_model("kreweras"), swapped)
    p1 = InvariantPair.parse(*TABLE3_INVARIANTS["t3-1"])
    rev = reflect_certificates(p1, "vertical")
    assert verify_invariant(get_model("t3-1").reflect("vertical"), rev)
    assert set(get_model("t3-1").reflect("vertical").steps) == set(get_model("reversed-kreweras").steps)
    for kind in ("diagonal", "vertical", "horizontal"):
        assert reflect_certificates(reflect_certificates(p1, kind), kind) == p1


def test_invariant_routes_agree_on_candidates():
    """Kernel divisibility and the discriminant route agree on 50 random candidates."""
    rng = random.Random(7)
    table = builtin_certificate_table(check=False)
    names = [n for n, e in table.items() if e.invariant is not None and not e.model.weight_symbols]
    pieces = ["x", "1/x", "t*x^2", "t/x^2"]
    for k in range(50):
        e = table[rng.choice(names)]
        if k % 2:
            p = e.invariant
        else:
            i1 = e.invariant.I1 + parse_ratfunc(rng.choice(pieces))
            p = InvariantPair(i1, e.invariant.I2)
        assert verify_invariant(e.model, p) == verify_invariant_symmetric(e.model, p)


@pytest.mark.parametrize("name,rng,poles", [("#2", (-1, 1), ()), ("#9", (-2, 2), ())])
def test_search_examples(name, rng, poles):
    pair = search_decoupling(get_model(name), Ansatz(rng, poles))
    assert pair is not None
    assert equivalent_up_to_constant(pair.G, parse_ratfunc(DECOUPLING_G[name]))


@pytest.mark.parametrize("name", [f"#{k}" for k in range(1, 10)])
def test_search_rediscovers_table2(name):
    pair = search_decoupling(get_model(name), Ansatz((-2, 2), ((Fraction(-1), 1),)))
    assert pair is not None and verify_decoupling(get_model(name), pair)
    assert equivalent_up_to_constant(pair.G, parse_ratfunc(DECOUPLING_G[name]))


def test_search_absent_on_symmetric_models():
    rng = random.Random(3)
    for m in rng.sample(vertically_symmetric_models(), 10):
        assert search_decoupling(m, Ansatz((-2, 2), ((Fraction(-1), 2),))) is None


def test_ansatz_validation():
    with pytest.raises(ValueError):
        Ansatz((1, 2))
    with pytest.raises(ValueError):
        Ansatz((-1, 1), ((Fraction(0), 1),))
    with pytest.raises(ValueError):
        Ansatz((-1, 1), ((Fraction(-1), 0),))


def test_gauge():
    assert equivalent_up_to_constant(parse_ratfunc("-1/y + 1/t"), parse_ratfunc("-1/y"))
    assert not equivalent_up_to_constant(parse_ratfunc("-1/y + y"), parse_ratfunc("-1/y"))


def test_certificate_file_round_trip():
    table = builtin_certificate_table(check=False)
    e = table["gessel"]
    text = format_certificate("gessel", e.invariant, e.decoupling)
    cert = parse_certificate_text("# a comment\n" + text)
    assert cert.model == e.model
    assert cert.invariant == e.invariant and cert.decoupling == e.decoupling
    with pytest.raises(ValueError):
        parse_certificate_text("I1: x\n")
    with pytest.raises(ValueError):
        parse_certificate_text("model: gessel\nnonsense\n")


def test_certificate_file_without_F():
    cert = parse_certificate_text("model: #3\nG: -y - 1/y\n")
    assert verify_decoupling(cert.model, cert.decoupling)
