import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from typicality.cli import run

SCHEMA = json.loads(resources.files("typicality").joinpath("report.schema.json").read_text())


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    text = out.getvalue()
    report = json.loads(text) if text else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
    return code, report


def comparable(report):
    return json.dumps({k: v for k, v in report.items() if k != "timing"}, sort_keys=True)


def test_typical_p3(tmp_path):
    path = tmp_path / "p3.struct"
    path.write_text("universe 3\nrelation E 2: (0,1) (1,0) (1,2) (2,1)\n")
    code, report = call("typical", "--structure", str(path))
    assert code == 0
    assert report["results"]["typical_set"] == [0, 2]
    assert [c["certificate"] for c in report["certificates"]] == ["2*2 >= 3", "2*1 < 3", "2*2 >= 3"]


def test_corpus_name_with_suffix():
    assert call("typical", "--structure", "p3.struct")[1]["results"]["typical_set"] == [0, 2]


def test_schnorr_measure():
    code, report = call("schnorr", "--level", "3", "--measure")
    assert code == 0 and report["results"]["measure"] == "1/16"


def test_dlo_typical_elements():
    code, report = call("dlo", "--params", "a1<a2", "--typical-elements")
    assert report["results"]["typical_elements"] == ["(-inf,a1)", "(a1,a2)", "(a2,+inf)"]


def test_dlo_formula_and_dichotomy():
    _, r = call("dlo", "--params", "a1", "--formula", "exists y (lt(a1, y) & lt(y, x))")
    assert r["results"]["qf"] == "lt(a1, x)" and r["results"]["verdict"] == "non-typical"
    _, r = call("dlo", "--formula", "lt(x, x)", "--dichotomy")
    assert r["results"]["dichotomy"]["typical"] == "not phi"


@pytest.mark.parametrize("argv", [
    ("eval", "--structure", "p3", "--formula", "exists y E(x, y)", "--assign", "x=1"),
    ("extension", "--structure", "c4", "--formula", "x != p", "--param", "p=0"),
    ("orbits", "--structure", "c4", "--fixed", "0", "--list"),
    ("witness", "--structure", "chain3", "--element", "1"),
    ("typical", "--structure", "p3", "--witness"),
    ("filter-closure", "--structure", "pq6", "--mode", "definable"),
    ("cantor", "--op", "join", "--a", "{0,2}", "--b", "{1}"),
    ("cantor", "--op", "split", "--a", "{0,3,4}"),
    ("cantor", "--op", "approx", "--a", "evens", "--b", "odds"),
    ("cantor", "--op", "tailset", "--a", "{}", "--bound", "2"),
    ("cantor", "--op", "code", "--sets", "{1};{0}"),
    ("cantor", "--op", "project", "--a", "{1,2}", "--index", "0"),
    ("cantor", "--op", "capture", "--a", "ones"),
    ("schnorr", "--level", "1", "--words", "--capture", "ones"),
])
def test_commands_succeed_and_are_deterministic(argv):
    code, first = call(*argv)
    assert code == 0
    assert comparable(first) == comparable(call(*argv)[1])


def test_specific_results():
    assert call("eval", "--structure", "p3", "--formula", "exists y E(x, y)", "--assign", "x=1")[1][
        "results"]["value"] is True
    assert call("extension", "--structure", "c4", "--formula", "x != p", "--param", "p=0")[1][
        "results"]["extension"] == [1, 2, 3]
    assert call("orbits", "--structure", "c4", "--fixed", "0")[1]["results"]["orbits"] == [[0], [1, 3], [2]]
    assert call("cantor", "--op", "code", "--sets", "{1};{0}")[1]["results"]["code"] == [1, 2]
    assert call("schnorr", "--level", "0", "--words")[1]["results"]["words"] == ["00", "10"]


def test_axioms_exit_codes(tmp_path):
    code, report = call("axioms", "--structure", "p3", "--axiom", "T2", "--axiom", "T3")
    assert code == 0 and report["violations"] == []
    code, report = call("axioms", "--structure", "empty2", "--axiom", "T4")
    assert code == 1 and report["violations"][0] == {"axiom": "T4", "a": 0, "b": 0}
    formulas = tmp_path / "t6.txt"
    formulas.write_text("# one per line\nexists y E(x, y)\na1 :: E(x, a1)\n")
    code, report = call("axioms", "--structure", "c4", "--axiom", "T6", "--formulas", str(formulas))
    assert report["results"]["T6"]["verdict"] in ("fails", "holds-with-caveat")


def test_search_reports_and_parallel_determinism():
    argv = ("search", "--axiom", "T4", "--family", "empty:1-3")
    code, report = call(*argv)
    assert code == 1 and report["results"]["verdict"] == "witness"
    code, serial = call("search", "--axiom", "T5", "--family", "graph:1-4", "--arity", "2")
    _, parallel = call("search", "--axiom", "T5", "--family", "graph:1-4", "--arity", "2", "--jobs", "2")
    assert code == 0 and comparable(serial) == comparable(parallel)
    assert serial["results"]["verdict"] == "none up to bound"


@pytest.mark.parametrize("argv", [
    ("eval", "--structure", "p3", "--formula", "E(x"),
    ("eval", "--structure", "nope", "--formula", "x = x"),
    ("typical", "--structure", "p3", "--fixed", "a"),
    ("dlo",),
    ("cantor", "--op", "join", "--a", "{0}"),
    ("schnorr", "--level", "-1"),
    ("search", "--axiom", "T5", "--family", "hyper:3"),
])
def test_usage_errors_exit_2(argv, capsys):
    assert run(list(argv)) == 2
    assert "error" in capsys.readouterr().err


def test_syntax_error_shows_position_and_grammar(capsys):
    run(["eval", "--structure", "p3", "--formula", "E(x, y, z)"])
    err = capsys.readouterr().err
    assert "position" in err and "grammar:" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "typicality", "schnorr", "--level", "3", "--measure"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["results"]["measure"] == "1/16"
