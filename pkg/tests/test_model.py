import json
from fractions import Fraction

import pytest

from quadwalk.errors import InvalidModel
from quadwalk.exact_algebra import MultiPoly, parse_poly
from quadwalk.model import (
    TABLE1,
    TABLE2,
    all_step_sets,
    build_kernel,
    catalog,
    get_model,
    is_singular,
    is_vertically_symmetric,
    load_model,
    parse_model_text,
    StepModel,
    vertically_symmetric_models,
)

X, Y = MultiPoly.var("x"), MultiPoly.var("y")


def test_kreweras_kernel():
    assert get_model("kreweras").kernel.K == parse_poly("t*(x^2*y^2 + x + y) - x*y")


def test_gessel_kernel():
    assert get_model("gessel").kernel.K == parse_poly("t*(y + x^2*y + x^2*y^2 + 1) - x*y")


def test_single_step_kernel():
    assert build_kernel(StepModel("ne", [(1, 1)])).K == parse_poly("t*x^2*y^2 - x*y")


@pytest.mark.parametrize("m", catalog(), ids=lambda m: m.name)
def test_decompositions_agree(m):
    k = m.kernel
    assert k.a * Y * Y + k.b * Y + k.c == k.K
    assert k.at * X * X + k.bt * X + k.ct == k.K
    assert k.d == k.b * k.b - 4 * k.a * k.c
    assert k.K.degree("x") <= 2 and k.K.degree("y") <= 2


@pytest.mark.parametrize("name", TABLE1[:4] + TABLE2)
def test_discriminant_degree(name):
    k = get_model(name).kernel
    assert k.d.degree("x") in (3, 4)
    assert k.dt.degree("y") in (3, 4)


def test_kernel_stable_under_step_order():
    steps = [(1, 0), (1, 1), (-1, 0), (-1, -1)]
    assert StepModel("a", steps).kernel.K == StepModel("b", steps[::-1]).kernel.K


def test_singular():
    assert not is_singular(get_model("kreweras"))
    assert is_singular(StepModel("s", [(1, 1), (1, -1), (-1, 1)]))
    assert not is_singular(StepModel("all", [s for s in all_step_sets()][-1].steps))


def test_vertical_symmetry():
    assert is_vertically_symmetric(StepModel("simple", [(1, 0), (-1, 0), (0, 1), (0, -1)]))
    assert not is_vertically_symmetric(get_model("gessel"))
    assert not is_vertically_symmetric(get_model("kreweras"))


def test_catalog_entries():
    assert set(get_model("#3").steps) == {(0, 1), (1, 1), (0, -1), (-1, 0)}
    w2 = get_model("weighted-2").steps
    assert w2 == {(-1, 0): 1, (-1, 1): 1, (0, 1): 2, (1, 1): 1, (1, 0): 2, (1, -1): 1, (0, -1): 1}
    assert get_model("weighted-1").weight_symbols == ("lam",)
    assert len(list(all_step_sets())) == 255
    assert len(vertically_symmetric_models()) == 16


def test_specialize():
    m = get_model("weighted-1").specialize(lam=Fraction(3, 2))
    assert m.weight(0, -1) == Fraction(3, 2)
    assert not m.weight_symbols


def test_invalid_models():
    with pytest.raises(InvalidModel):
        StepModel("e", [])
    with pytest.raises(InvalidModel):
        StepModel("big", [(2, 0)])
    with pytest.raises(InvalidModel):
        StepModel("neg", {(1, 0): -1})
    with pytest.raises(InvalidModel):
        get_model("nope")
    with pytest.raises(InvalidModel):
        parse_model_text("{not json")
    with pytest.raises(InvalidModel):
        parse_model_text(json.dumps({"steps": [[1, 0, "x"]]}))


def test_model_file_round_trip(tmp_path):
    m = get_model("weighted-2")
    path = tmp_path / "m.json"
    path.write_text(m.to_json())
    assert load_model(str(path)) == m
