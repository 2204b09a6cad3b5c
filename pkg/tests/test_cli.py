import json
import subprocess
import sys

import pytest

from conftest import KET00_TEXT, BELL_TEXT
from taqv import cli
from taqv.automaton import equivalent, single_basis_state
from taqv.frontend import parse_automaton, parse_circuit, serialize_automaton

EPR = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n'


@pytest.fixture
def files(tmp_path):
    (tmp_path / "pre.ta").write_text(KET00_TEXT)
    (tmp_path / "post.ta").write_text(BELL_TEXT)
    (tmp_path / "zero.ta").write_text(serialize_automaton(single_basis_state("00")))
    (tmp_path / "epr.qasm").write_text(EPR)
    return tmp_path


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_verify_equal(files, capsys):
    code = run("verify", "--pre", files / "pre.ta", "--circuit", files / "epr.qasm", "--post", files / "post.ta")
    assert code == 0
    assert capsys.readouterr().out.startswith("equal\n")


def test_verify_violation_json(files, capsys):
    code = run("verify", "--pre", files / "pre.ta", "--circuit", files / "epr.qasm",
               "--post", files / "zero.ta", "--mode", "composition", "--json")
    assert code == 1
    body = json.loads(capsys.readouterr().out)
    assert body["outcome"] == "violation"
    assert body["witness"]["side"] == "result-only"
    assert [b["basis"] for b in body["witness"]["basis"]] == ["00", "11"]
    assert body["stats"]["mode"] == "composition"


def test_verify_inclusion(files, capsys):
    (files / "id.qasm").write_text("qreg q[2];\n")
    code = run("verify", "--pre", files / "zero.ta", "--circuit", files / "id.qasm",
               "--post", files / "zero.ta", "--check", "incl")
    assert code == 0
    assert capsys.readouterr().out.startswith("included")


def test_usage_errors(files, capsys):
    assert run("verify", "--pre", files / "missing.ta", "--circuit", files / "epr.qasm",
               "--post", files / "post.ta") == 2
    (files / "bad.qasm").write_text("qreg q[2];\nfoo q[0];\n")
    assert run("verify", "--pre", files / "pre.ta", "--circuit", files / "bad.qasm",
               "--post", files / "post.ta") == 2
    err = capsys.readouterr().err
    assert "cannot read" in err and "line 2, col 1: unknown gate 'foo'" in err
    (files / "three.ta").write_text(serialize_automaton(single_basis_state("000")))
    assert run("verify", "--pre", files / "three.ta", "--circuit", files / "epr.qasm",
               "--post", files / "post.ta") == 2
    with pytest.raises(SystemExit) as exc:
        run("verify", "--pre", "x")
    assert exc.value.code == 2


def test_internal_error(files, monkeypatch, capsys):
    def boom(job):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "verify", boom)
    assert run("verify", "--pre", files / "pre.ta", "--circuit", files / "epr.qasm",
               "--post", files / "post.ta") == 3
    assert "internal error" in capsys.readouterr().err


def test_run_writes_result(files):
    out = files / "out.ta"
    assert run("run", "--pre", files / "pre.ta", "--circuit", files / "epr.qasm", "--out", out) == 0
    assert equivalent(parse_automaton(out.read_text()), parse_automaton(BELL_TEXT))


@pytest.mark.parametrize(
    "family, args, post",
    [
        ("bv", ["--hidden", "0110"], "post.ta"),
        ("mctoffoli", ["--m", "3"], "post.ta"),
        ("grover-single", ["--m", "2", "--iters", "1"], "post-shape.json"),
        ("grover-all", ["--m", "2", "--iters", "1"], "post-shape.json"),
    ],
)
def test_gen_families(tmp_path, capsys, family, args, post):
    assert run("gen", family, *args, "--out-dir", tmp_path) == 0
    pre = parse_automaton((tmp_path / "pre.ta").read_text())
    circuit = parse_circuit((tmp_path / "circuit.qasm").read_text())
    assert pre.num_qubits == circuit.num_qubits
    text = (tmp_path / post).read_text()
    if post == "post.ta":
        code = run("verify", "--pre", tmp_path / "pre.ta", "--circuit", tmp_path / "circuit.qasm",
                   "--post", tmp_path / "post.ta")
        assert code == 0
    else:
        shape = json.loads(text)
        assert shape["kind"] == "dominant-basis" and shape["num_qubits"] == circuit.num_qubits


def test_gen_rejects_bad_params(tmp_path, capsys):
    assert run("gen", "mctoffoli", "--m", "2", "--out-dir", tmp_path) == 2
    assert run("gen", "bv", "--hidden", "01x", "--out-dir", tmp_path) == 2


def test_gen_random_and_bughunt(tmp_path, capsys):
    assert run("gen", "random", "--n", "5", "--seed", "3", "--bug-seed", "9", "--out-dir", tmp_path) == 0
    a, b = tmp_path / "circuit.qasm", tmp_path / "buggy.qasm"
    assert len(parse_circuit(b.read_text())) == len(parse_circuit(a.read_text())) + 1 == 16
    capsys.readouterr()
    assert run("bughunt", "--circuit-a", a, "--circuit-b", a, "--max-iters", "2") == 0
    assert "iterations: 2" in capsys.readouterr().out
    code = run("bughunt", "--circuit-a", a, "--circuit-b", b, "--seed", "1", "--json")
    body = json.loads(capsys.readouterr().out)
    assert code == (1 if body["outcome"] == "violation" else 0)
    assert body["stats"]["seed"] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "taqv", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("taqv ")
