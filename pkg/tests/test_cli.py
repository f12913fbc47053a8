import json
import subprocess
import sys
from fractions import Fraction

import pytest

from painted_operad.cli import main
from painted_operad.lalgebra import LAlgebra
from painted_operad.series import Series, identity, unit_matrix


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def lines(text):
    return [json.loads(x) for x in text.strip().split("\n")]


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_betti_examples(capsys):
    assert run(capsys, "betti", "--whites", "5", "--blacks", "0")[:2] == (0, '{"dims":[1,5,1]}\n')
    assert run(capsys, "betti", "--whites", "2", "--blacks", "2")[:2] == (0, '{"dims":[1,1]}\n')
    assert run(capsys, "betti", "--whites", "6")[1] == '{"dims":[1,16,16,1]}\n'


def test_trees_and_partitions(capsys):
    assert run(capsys, "trees", "--whites", "5", "--blacks", "0", "--edges", "2", "--count")[:2] == (0, "15\n")
    code, out, _ = run(capsys, "trees", "--whites", "5")
    assert code == 0 and lines(out)[-1] == {"summary": "trees", "total": 26, "by_edges": [1, 10, 15]}
    code, out, _ = run(capsys, "trees", "--whites", "2", "--blacks", "2")
    assert lines(out)[-1]["by_edges"] == [1, 2]
    assert run(capsys, "partitions", "--whites", "5", "--count")[1] == "10\n"


def test_normalform_and_multiply(capsys, tmp_path):
    x = {"monomial": [{"part": ["w1", "w2"]}]}
    code, out, _ = run(capsys, "multiply", "--whites", "5", "--in", write(tmp_path, "m.json", {"x": x, "y": x}))
    assert code == 0
    sq = lines(out)[0]
    y = {"monomial": [{"part": ["w1", "w2"]}, {"part": ["w3", "w4"]}]}
    code, out, _ = run(capsys, "normalform", "--whites", "5", "--in", write(tmp_path, "n.json", y))
    chain = lines(out)[0]
    assert sq["grade"] == chain["grade"] == 2
    assert _coeffs(sq) == {k: -v for k, v in _coeffs(chain).items()}


def _coeffs(rec):
    return {json.dumps(t["tree"]): Fraction(t["coeff"]) for t in rec["terms"]}


def test_relations_and_pairing(capsys):
    code, out, _ = run(capsys, "relations", "--whites", "5", "--degree", "1")
    assert code == 0 and lines(out)[-1]["summary"] == "relations"
    code, out, _ = run(capsys, "pairing", "--whites", "5", "--degree", "1")
    rows = out.strip().split("\n")
    assert code == 0 and len(rows) == 5
    assert run(capsys, "pairing", "--whites", "5", "--degree", "7")[0] == 1


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--whites", "5", "--seed", "3", "--count", "30")
    assert code == 0 and lines(out)[-1] == {"summary": "sweep", "cases": 30, "failures": 0, "seed": 3}


def test_comm_check_pass_and_fail(capsys, tmp_path):
    B = Series(("x",), 5, {(1,): identity(2)}, (2, 2))
    code, out, _ = run(capsys, "comm-check", "--in", write(tmp_path, "b.json", B.to_json()))
    assert code == 0 and lines(out) == [{"status": "pass", "verified_order": 3}]
    bad = Series(("x1", "x2"), 3, {(1, 0): unit_matrix(2, 0, 0), (0, 1): unit_matrix(2, 0, 1)})
    code, out, _ = run(capsys, "comm-check", "--in", write(tmp_path, "bad.json", bad.to_json()))
    assert code == 2
    rec = lines(out)[0]
    assert rec["status"] == "fail" and rec["witness"]["matrix"] == [["0", "1"], ["0", "0"]]


def test_lalg_pipeline(capsys, tmp_path, monkeypatch):
    code, out, _ = run(capsys, "gen-lalg", "--dimT", "1", "--dimF", "2", "--order", "4", "--seed", "5")
    assert code == 0
    L = lines(out)[0]
    code, out, _ = run(capsys, "lalg-verify", "--in", write(tmp_path, "L.json", L))
    assert code == 0 and lines(out)[-1]["status"] == "pass"
    code, out, _ = run(capsys, "comm-fromlalg", stdin=json.dumps(L), monkeypatch=monkeypatch)
    B = lines(out)[0]
    code, out, _ = run(capsys, "comm-check", stdin=json.dumps(B), monkeypatch=monkeypatch)
    assert code == 0 and lines(out)[0]["status"] == "pass"
    code, out, _ = run(capsys, "comm-tolalg", "--dimT", "1", stdin=json.dumps(B), monkeypatch=monkeypatch)
    assert LAlgebra.from_json(lines(out)[0]) == LAlgebra.from_json(L)


def test_lalg_verify_failure(capsys, tmp_path):
    bad = {"dimT": 0, "dimF": 2, "order": 3, "correlators": [
        {"indices": ["f1"], "matrix": [["1", "0"], ["0", "0"]]},
        {"indices": ["f2"], "matrix": [["0", "1"], ["0", "0"]]},
    ]}
    code, out, _ = run(capsys, "lalg-verify", "--in", write(tmp_path, "bad.json", bad))
    recs = lines(out)
    assert code == 2 and recs[0]["kind"] == "commutator" and recs[-1]["status"] == "fail"


def test_lalg_eval(capsys, tmp_path):
    L = {"dimT": 0, "dimF": 1, "order": 3, "correlators": [{"indices": ["f1"], "matrix": [["3"]]}, {"indices": ["f1", "f1"], "matrix": [["-2/5"]]}]}
    job = {"lalgebra": L, "whites": 5, "tree": [{"part": ["w1", "w2"]}], "root": "w1", "inputs": {f"w{k}": [k] for k in range(2, 6)}}
    code, out, _ = run(capsys, "lalg-eval", "--in", write(tmp_path, "e.json", job))
    assert code == 0 and lines(out) == [{"output": ["-144"]}]


def test_assoc_commands(capsys, tmp_path):
    A = {"vars": ["t0", "t1"], "order": 6, "components": [
        [{"exp": {"t0": 2}, "coeff": "1/2"}, {"exp": {"t1": 3}, "coeff": "1/6"}],
        [{"exp": {"t0": 1, "t1": 1}, "coeff": "1"}],
    ]}
    path = write(tmp_path, "a.json", A)
    code, out, _ = run(capsys, "assoc-check", "--in", path)
    assert code == 0 and lines(out)[0] == {"status": "pass", "verified_order": 3, "flat_identity": True}
    code, out, _ = run(capsys, "assoc-tocomm", "--in", path)
    B = lines(out)[0]
    code, out, _ = run(capsys, "comm-check", "--in", write(tmp_path, "b.json", B))
    assert code == 0
    code, out, _ = run(capsys, "comm-toassoc", "--in", write(tmp_path, "bh.json", {"B": B, "h": [1, 0]}))
    assert code == 0 and lines(out)[0]["vars"] == ["t0", "t1"]
    code, out, _ = run(capsys, "comm-toassoc", "--in", write(tmp_path, "bh2.json", {"B": B, "h": [0, 1]}))
    assert code == 2 and "primitive" in lines(out)[0]["reason"]


def test_glue_project_maximality(capsys, tmp_path):
    B1 = Series(("t",), 4, {(1,): identity(1)}, (1, 1)).to_json()
    B2 = {"vars": ["th"], "order": 4, "dimF": 1, "terms": [{"exp": {"th": 1}, "matrix": [["1"]]}, {"exp": {"th": 2}, "matrix": [["1/2"]]}]}
    code, out, _ = run(capsys, "glue", "--in", write(tmp_path, "g.json", {"B1": B1, "B2": B2, "h": [1]}))
    G = lines(out)[0]
    assert code == 0 and G["vars"] == ["t", "th"]
    base = Series(("t",), 5, {(1,): identity(1)}, (1, 1)).to_json()
    total = {"vars": ["t", "th"], "order": 5, "dimF": 1, "terms": [
        {"exp": {"t": 1}, "matrix": [["1"]]}, {"exp": {"th": 1}, "matrix": [["1"]]}, {"exp": {"t": 1, "th": 1}, "matrix": [["1"]]}]}
    code, out, _ = run(capsys, "project", "--base", write(tmp_path, "base.json", base), "--total", write(tmp_path, "tot.json", total))
    rec = lines(out)[0]
    assert code == 0 and rec["table"] == {"λ1": "1+t"} and rec["unique"] is True
    bad_total = Series(("x1", "x2", "th"), 4, {(1, 0, 0): unit_matrix(2, 0, 0), (0, 1, 0): unit_matrix(2, 1, 1), (0, 0, 1): unit_matrix(2, 0, 1)})
    diag = Series(("x1", "x2"), 4, {(1, 0): unit_matrix(2, 0, 0), (0, 1): unit_matrix(2, 1, 1)})
    code, out, _ = run(capsys, "project", "--base", write(tmp_path, "d.json", diag.to_json()), "--total", write(tmp_path, "bt.json", bad_total.to_json()))
    assert code == 2 and lines(out)[0]["status"] == "fail"
    code, out, _ = run(capsys, "maximality", "--in", write(tmp_path, "dg.json", diag.to_json()))
    assert lines(out)[0]["verdict"] == "strict"


def test_tensor_command(capsys, tmp_path):
    U = {"dimT": 1, "dimF": 1, "order": 3, "correlators": [{"indices": ["t1"], "matrix": [["1"]]}, {"indices": ["f1"], "matrix": [["1"]]}]}
    L = LAlgebra(1, 1, 3, {(0, 1): [[2]]}).to_json()
    code, out, _ = run(capsys, "tensor", "--in", write(tmp_path, "t.json", {"L1": L, "L2": U}))
    assert code == 0 and LAlgebra.from_json(lines(out)[0]) == LAlgebra.from_json(L)


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "betti", "--whites", "9")[0] == 1
    assert run(capsys, "betti", "--whites", "1", "--blacks", "3")[0] == 1
    assert run(capsys, "relations", "--whites", "5")[0] == 1
    assert run(capsys, "comm-check", "--in", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "gen-lalg", "--order", "9")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["betti", "--whites", "x"])
    assert exc.value.code == 1


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("PAINTED_OPERAD_THREADS", "4")
    assert run(capsys, "betti", "--whites", "4")[:2] == (0, '{"dims":[1,1]}\n')
    monkeypatch.setenv("PAINTED_OPERAD_THREADS", "zero")
    assert run(capsys, "betti", "--whites", "4")[0] == 1


def test_out_file(capsys, tmp_path):
    target = tmp_path / "dims.json"
    assert run(capsys, "betti", "--whites", "5", "--out", str(target))[:2] == (0, "")
    assert target.read_text() == '{"dims":[1,5,1]}\n'


def _proc(*argv, stdin=None):
    return subprocess.run([sys.executable, "-m", "painted_operad", *argv], input=stdin, capture_output=True, text=True)


def test_subprocess_pipeline_and_determinism():
    first = _proc("gen-lalg", "--dimT", "1", "--dimF", "2", "--order", "4", "--seed", "11")
    second = _proc("gen-lalg", "--dimT", "1", "--dimF", "2", "--order", "4", "--seed", "11")
    assert first.returncode == 0 and first.stdout == second.stdout
    B = _proc("comm-fromlalg", stdin=first.stdout)
    chk = _proc("comm-check", stdin=B.stdout)
    assert chk.returncode == 0 and json.loads(chk.stdout)["status"] == "pass"
    a = _proc("trees", "--whites", "3", "--blacks", "2")
    b = _proc("trees", "--whites", "3", "--blacks", "2")
    assert a.stdout == b.stdout and a.stdout.endswith("\n")
    assert _proc("bogus").returncode == 1


def test_exit_code_two_propagates_from_process():
    bad = Series(("x1", "x2"), 3, {(1, 0): unit_matrix(2, 0, 0), (0, 1): unit_matrix(2, 0, 1)})
    r = _proc("comm-check", stdin=json.dumps(bad.to_json()))
    assert r.returncode == 2
