import json
import os
import subprocess
import sys

import pytest

from ctgraph.cli import Report, main

DATA = os.path.join(os.path.dirname(__file__), "data")


def data(name):
    return os.path.join(DATA, name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_analyze_examples(capsys):
    code, rep = run_json(capsys, "analyze", data("loop.graph"))
    assert (code, rep["answer"]) == (0, "yes")
    code, rep = run_json(capsys, "analyze", data("uhf2.bratteli"))
    assert rep["answer"] == "no"
    assert rep["certificate"]["finite_ancestry"]["certificate"]["type"] == "pumping"
    code, rep = run_json(capsys, "analyze", data("torus.kgraph"))
    assert rep["answer"] == "unknown"
    assert {"tight", "strong_finite_ancestry", "strictly_aperiodic"} <= set(rep["certificate"])


def test_ancestry_examples(capsys):
    _, rep = run_json(capsys, "ancestry", data("loop.graph"), "v", "v")
    assert rep["certificate"]["pairs"] == [["v", "v"]]
    _, rep = run_json(capsys, "ancestry", data("uhf2.bratteli"), "v1", "v1")
    assert rep["answer"] == "no" and rep["certificate"]["type"] == "pumping"
    _, rep = run_json(capsys, "ancestry", data("line.bratteli"), "v1", "v1")
    assert len(rep["certificate"]["pairs"]) == 1


def test_desingularize_then_analyze(capsys, tmp_path):
    out = str(tmp_path / "out.graph")
    code, _ = run(capsys, "desingularize", data("omega.graph"), "-o", out)
    assert code == 0
    _, before = run_json(capsys, "analyze", data("omega.graph"))
    _, after = run_json(capsys, "analyze", out)
    assert before["answer"] == after["answer"]
    assert "redirect b -> b~g" in open(out).read()


def test_oracle_examples(capsys):
    code, rep = run_json(capsys, "oracle", data("loop.graph"), "--check", "lemma1", "--depth", "6")
    assert code == 0 and rep["answer"] == "yes"
    code, rep = run_json(capsys, "oracle", data("uhf2.bratteli"), "--check", "cover")
    assert code == 0
    assert "infinite" in json.dumps(rep["certificate"]).lower()
    code, rep = run_json(capsys, "oracle", data("torus.kgraph"), "--check", "axioms")
    assert code == 0


@pytest.mark.parametrize("argv, code", [
    (["analyze", "loop.graph"], 0),
    (["analyze", "omega.graph", "--verify"], 0),
    (["analyze", "uhf2.bratteli", "--verify"], 0),
    (["analyze", "twoblue.kgraph", "--verify"], 0),
    (["analyze", "line2.kgraph"], 0),
    (["ancestry", "loop.graph", "v", "nope"], 2),
    (["analyze", "missing.graph"], 2),
    (["analyze", "bad.graph"], 2),
    (["analyze", "badsquare.kgraph"], 2),
    (["oracle", "loop.graph", "--check", "lemma2"], 0),
    (["oracle", "twoblue.kgraph", "--check", "lemma1"], 2),
    (["oracle", "badsquare.kgraph", "--check", "axioms"], 1),
])
def test_exit_codes(capsys, tmp_path, argv, code):
    (tmp_path / "bad.graph").write_text("vertex v\nedge e : v -> nowhere\n")
    (tmp_path / "badsquare.kgraph").write_text(
        "vertex v\nblue b1 : v -> v\nblue b2 : v -> v\nred r : v -> v\n"
        "square b1 r ~ r b1\nsquare b2 r ~ r b1\n")
    resolved = []
    for a in argv:
        if a in ("bad.graph", "badsquare.kgraph", "missing.graph"):
            resolved.append(str(tmp_path / a))
        elif a.endswith((".graph", ".bratteli", ".kgraph")):
            resolved.append(data(a))
        else:
            resolved.append(a)
    assert main(resolved) == code
    capsys.readouterr()


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["analyze", "loop.graph"],
    ["analyze", "uhf2.bratteli"],
    ["analyze", "torus.kgraph"],
    ["ancestry", "omega.graph", "v", "v"],
    ["oracle", "source.graph", "--check", "lemma2"],
])
def test_json_roundtrip(capsys, argv):
    argv = [data(a) if "." in a else a for a in argv]
    _, out = run(capsys, *argv, "--json")
    rep = Report.from_json(json.loads(out))
    assert json.loads(rep.dumps()) == json.loads(out)


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "ctgraph.cli", "analyze", data("loop.graph")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "continuous_trace: yes" in r.stdout
