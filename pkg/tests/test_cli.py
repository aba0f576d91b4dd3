import csv
import io
import json
import subprocess
import sys

import pytest

from quadwalk.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from quadwalk.enumeration import count_walks
from quadwalk.model import get_model


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_group_gessel(capsys):
    code, out, _ = run(capsys, "group", "gessel")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["verdict"] == "finite" and d["order"] == 8
    assert d["config"]["model"] == "gessel"


def test_group_infinite(capsys):
    code, out, _ = run(capsys, "group", "#3", "--bound", "60")
    d = json.loads(out)
    assert code == EXIT_OK and d["verdict"] == "not-finite-within"


def test_enumerate_csv_matches_library(capsys):
    code, out, _ = run(capsys, "enumerate", "kreweras", "-n", "6")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    table = count_walks(get_model("kreweras"), 6)
    assert len(rows) == sum(len(table.layer(n)) for n in range(7))
    for r in rows:
        assert int(r["count"]) == table.q(int(r["i"]), int(r["j"]), int(r["n"]))


def test_enumerate_json(capsys):
    code, out, _ = run(capsys, "enumerate", "kreweras", "-n", "6", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["q00"] == ["1", "0", "0", "2", "0", "0", "16"]


def test_reruns_are_bit_identical(capsys):
    args = ("group", "kreweras", "--seed", "5")
    first = run(capsys, *args)
    assert run(capsys, *args) == first


def test_verify_cert_good_and_bad(capsys, tmp_path):
    good = tmp_path / "good.txt"
    good.write_text("model: #3\nG: -y - 1/y\n")
    code, out, err = run(capsys, "verify-cert", str(good))
    assert code == EXIT_OK and json.loads(out)["ok"] and err == ""
    bad = tmp_path / "bad.txt"
    bad.write_text("model: #3\nG: -y\n")
    code, out, err = run(capsys, "verify-cert", str(bad))
    assert code == EXIT_FAILED
    assert not json.loads(out)["ok"]
    assert "FAILED #3:decoupling" in err


def test_verify_cert_usage_errors(capsys, tmp_path):
    assert run(capsys, "verify-cert", str(tmp_path / "missing.txt"))[0] == EXIT_USAGE
    junk = tmp_path / "junk.txt"
    junk.write_text("model: #3\nG: sin(y)\n")
    assert run(capsys, "verify-cert", str(junk))[0] == EXIT_USAGE


def test_search_decoupling(capsys):
    code, out, _ = run(capsys, "search-decoupling", "#2", "--poles=-1:1")
    d = json.loads(out)
    assert code == EXIT_OK and d["found"]
    code, out, _ = run(capsys, "search-decoupling", "kreweras", "--format", "text")
    assert code == EXIT_OK and out.startswith("model:")


def test_evaluate_q(capsys):
    code, out, _ = run(capsys, "evaluate-q", "#3", "-t", "1/20", "-y", "1/4", "-n", "20")
    d = json.loads(out)
    assert code == EXIT_OK and d["ok"]
    assert abs(d["value"]["float"] - d["oracle"]["value"]["float"]) < 1e-6
    assert d["config"]["t"] == "1/20"


def test_curve_csv(capsys):
    code, out, _ = run(capsys, "curve", "#3", "-t", "1/10", "-n", "12")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 12
    for r in rows:
        assert abs(float(r["re_y0"]) - float(r["re_y1"])) < 1e-20
        assert abs(float(r["im_y0"]) + float(r["im_y1"])) < 1e-20


@pytest.mark.parametrize(
    "argv",
    [
        ("group", "no-such-model"),
        ("gluing", "#3", "-t", "2"),
        ("gluing", "#3", "-t", "1/10", "--precision", "5"),
        ("enumerate", "gessel", "-n", "-1"),
        ("frobnicate",),
        ("evaluate-q", "#3", "-t", "1/10"),
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "quadwalk.cli", "group", "gessel"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["order"] == 8
