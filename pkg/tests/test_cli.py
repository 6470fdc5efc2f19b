"""Command-line front end."""

import io
import json
from pathlib import Path

import jsonschema
import pytest

from ltt.budget import Budget
from ltt.cli import main, verdict_schema
from ltt.fixtures import even_b
from ltt.io import automaton_to_doc, dumps, load_automaton
from ltt.tameness import is_k_tame
from ltt.testability import decide_lt, is_kappa_testable
from ltt.unranked.fixtures import exactly_one_b_child
from ltt.unranked.testability import decide_ilt

DATA = Path(__file__).resolve().parent.parent / "data"


def load(path):
    return load_automaton(path.read_text())


def run(capsys, *argv):
    code = main([str(x) for x in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, verdict_schema())
    return code, doc


def test_testable_universal(capsys):
    code, doc = run_json(capsys, "testable", "--automaton", DATA / "univ.dfta", "--kappa", 0)
    assert code == 0 and doc["status"] == "Holds"


def test_decide_lt_even_b(capsys):
    code, doc = run_json(capsys, "decide-lt", "--automaton", DATA / "evenb.dfta", "--max-kappa", 3)
    assert code == 0
    assert (doc["status"], doc["reason"]) == ("NotLT", "NotTame")
    assert len(doc["witnesses"]) == 2


def test_budget_gives_unknown(capsys):
    code, doc = run_json(capsys, "tame", "--automaton", DATA / "tame_not_lt.dfta", "--k", 5, "--budget", 10)
    assert code == 2 and doc["status"] == "Unknown"
    assert "budget" in doc["note"]


def test_text_format(capsys):
    code, out, _ = run(capsys, "testable", "--automaton", DATA / "univ.dfta", "--kappa", 0)
    assert code == 0
    lines = out.splitlines()
    assert "status: Holds" in lines
    assert lines == sorted(lines)


@pytest.mark.parametrize(
    "argv",
    [
        ["decide-lt", "--automaton", DATA / "evenb.dfta"],
        ["testable", "--automaton", DATA / "tame_not_lt.dfta", "--kappa", 1],
        ["decide-ilt", "--automaton", DATA / "one_b_child.cdfta"],
        ["random", "--kind", "counting", "--seed", 4],
    ],
)
def test_byte_stable(capsys, argv):
    first = run(capsys, *argv, "--format", "json")
    second = run(capsys, *argv, "--format", "json")
    assert first == second


def test_timing_is_opt_in(capsys):
    _, doc = run_json(capsys, "validate", "--automaton", DATA / "univ.dfta")
    assert "timing_ms" not in doc
    _, doc = run_json(capsys, "validate", "--automaton", DATA / "univ.dfta", "--timing")
    assert doc["timing_ms"] >= 0


def test_golden_ranked(capsys):
    path = DATA / "tame_not_lt.dfta"
    _, doc = run_json(capsys, "testable", "--automaton", path, "--kappa", 1)
    v = is_kappa_testable(load(path), 1, Budget())
    assert doc["status"] == str(v.status)
    assert doc["witnesses"] == v.witness.terms()
    _, doc = run_json(capsys, "tame", "--automaton", path, "--k", 0)
    assert doc["status"] == str(is_k_tame(load(path), 0, Budget()).status)
    _, doc = run_json(capsys, "decide-lt", "--automaton", DATA / "evenb.dfta")
    v = decide_lt(even_b(), max_kappa=3, budget=Budget())
    assert doc["witnesses"] == v.witness.terms()


def test_golden_unranked(capsys):
    _, doc = run_json(capsys, "decide-ilt", "--automaton", DATA / "one_b_child.cdfta")
    v = decide_ilt(exactly_one_b_child(), budget=Budget(), max_kappa=2)
    assert (doc["status"], doc["reason"]) == (str(v.status), v.to_dict()["reason"])
    assert doc["witnesses"] == v.witness.terms()


def test_word_input_is_encoded(capsys):
    _, doc = run_json(capsys, "decide-lt", "--automaton", DATA / "ab_star.word")
    assert doc["status"] == "LT"
    _, doc = run_json(capsys, "decide-lt", "--automaton", DATA / "aa_star.word")
    assert doc["status"] == "NotLT"


def test_semigroup_oracle(capsys):
    _, doc = run_json(capsys, "oracle", "semigroup", "--automaton", DATA / "aa_star.word")
    assert doc["status"] == "Violated"
    assert doc["result"]["elements"] == 2


def test_closure_oracle(capsys):
    _, doc = run_json(capsys, "oracle", "closure", "--automaton", DATA / "evenb.dfta", "--op", "htransfer", "--max-nodes", 11)
    assert doc["status"] == "Violated"
    _, doc = run_json(capsys, "oracle", "closure", "--automaton", DATA / "one_b_child.cdfta", "--op", "hstutter", "--max-nodes", 5)
    assert doc["status"] == "Violated"


def test_tree_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("a(b,a(b,b))\n"))
    code, doc = run_json(capsys, "run", "--automaton", DATA / "evenb.dfta", "--tree", "-")
    assert code == 0 and doc["status"] == "Rejected"
    assert doc["result"] == {"state": "odd", "accepted": False}


def test_ktype_and_apply_op(capsys, tmp_path):
    tree = tmp_path / "t.term"
    tree.write_text("a(a(b,b),a(b,b))")
    _, doc = run_json(capsys, "ktype", "--automaton", DATA / "evenb.dfta", "--tree", tree, "--k", 1, "--path", "0")
    assert doc["result"]["type"] == "a(b,b)"
    _, doc = run_json(
        capsys, "apply-op", "--automaton", DATA / "evenb.dfta", "--tree", tree, "--op", "hswap", "--nodes", "0", "1"
    )
    assert doc["status"] == "Preserved"


def test_unranked_ktype(capsys, tmp_path):
    tree = tmp_path / "t.uterm"
    tree.write_text("a{b,b,b}")
    _, doc = run_json(capsys, "ktype", "--automaton", DATA / "one_b_child.cdfta", "--tree", tree, "--k", 1, "--l", 2)
    assert doc["result"]["type"] == "a{b:>=2}"


def test_minimize_round_trips(capsys, tmp_path):
    _, doc = run_json(capsys, "minimize", "--automaton", DATA / "evenb.dfta")
    path = tmp_path / "m.dfta"
    path.write_text(dumps(doc["result"]))
    _, doc2 = run_json(capsys, "validate", "--automaton", path)
    assert doc2["result"]["states"] == 2


def test_random_is_loadable(capsys, tmp_path):
    _, doc = run_json(capsys, "random", "--seed", 3, "--states", 4)
    path = tmp_path / "r.dfta"
    path.write_text(dumps(doc["result"]))
    assert run_json(capsys, "validate", "--automaton", path)[0] == 0


def test_complete_with_sink_flag(capsys, tmp_path):
    doc = automaton_to_doc(even_b())
    doc["delta"] = [d for d in doc["delta"] if d["symbol"] != "c"]
    path = tmp_path / "partial.dfta"
    path.write_text(dumps(doc))
    code, _, err = run(capsys, "validate", "--automaton", path)
    assert code == 1 and "ltt: error" in err
    code, doc = run_json(capsys, "validate", "--automaton", path, "--complete-with-sink")
    assert code == 0 and doc["result"]["states"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["testable", "--automaton", "missing.dfta", "--kappa", "0"],
        ["testable", "--automaton", str(DATA / "univ.dfta")],
        ["testable", "--automaton", str(DATA / "univ.dfta"), "--kappa", "x"],
        ["decide-ilt", "--automaton", str(DATA / "univ.dfta")],
        ["tame", "--automaton", str(DATA / "one_b_child.cdfta"), "--k", "1"],
    ],
)
def test_errors_exit_one(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == "" and "ltt: error" in err


def test_bad_tree_exits_one(capsys, tmp_path):
    tree = tmp_path / "bad.term"
    tree.write_text("a(b")
    code, _, err = run(capsys, "run", "--automaton", DATA / "evenb.dfta", "--tree", tree)
    assert code == 1 and "ltt: error" in err
