import io
import json
import subprocess
import sys

import pytest

from uhgraphs.ccd import Ccd
from uhgraphs.cli import run
from uhgraphs.families import directed_cycle, gen


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def graph_file(tmp_path):
    def write(g, name="g.json"):
        p = tmp_path / name
        p.write_text(g.to_dot() if name.endswith(".dot") else g.dumps())
        return str(p)

    return write


def test_check_exit_codes(graph_file):
    code, out, _ = call("check", graph_file(gen("H0")))
    assert code == 0 and json.loads(out)["is_uh"] is True
    code, out, _ = call("check", graph_file(directed_cycle(5)), "--format", "summary")
    assert code == 1 and "does not extend" in out


def test_check_reads_dot(graph_file):
    code, out, _ = call("check", graph_file(gen("C4"), "c4.dot"), "--format", "summary")
    assert code == 0 and out.startswith("ultrahomogeneous")


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 3,\n  "chi": [0, 0, 0]\n  "zeta": []}')
    code, _, err = call("check", str(p))
    assert code == 2
    assert "line 3, column 3" in err


def test_missing_file():
    code, _, err = call("check", "/nonexistent/graph.json")
    assert code == 2 and "cannot read" in err


def test_budget_exceeded(graph_file):
    path = graph_file(gen("union(H0, tri(t=2))"))
    code, _, err = call("check", path)
    assert code == 2 and "budget" in err
    code, _, _ = call("check", path, "--budget", "0")
    assert code == 0


def test_gen_formats():
    code, out, _ = call("gen", "C3", "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    assert Ccd.from_dot(out) == directed_cycle(3)
    code, out, _ = call("gen", "tri(t=2)")
    assert Ccd.loads(out) == gen("tri(t=2)")
    code, _, err = call("gen", "C5")
    assert code == 2 and "cycles" in err


def test_aut_summary(graph_file):
    code, out, _ = call("aut", graph_file(gen("H0")), "--format", "summary")
    assert code == 0
    assert "|Aut| = 24" in out and "Alt(4)" in out
    code, out, _ = call("aut", graph_file(gen("H0")))
    data = json.loads(out)
    [bs] = data["classes"][0]["block_systems"]
    assert bs["induced_order"] == 12 and len(bs["blocks"]) == 4


def test_extend(graph_file):
    path = graph_file(gen("fig4(left)"))
    code, out, _ = call("extend", path, "--red", "0", "--blue", "1")
    assert code == 0 and json.loads(out)["holds"] is True
    code, _, err = call("extend", path, "--red", "0", "--blue", "0")
    assert code == 2
    code, _, err = call("extend", path, "--red", "0", "--blue", "5")
    assert code == 2 and "no vertex color" in err


def test_classify_outcomes(graph_file):
    code, out, _ = call("classify", graph_file(gen("fig4(right)")))
    assert code == 0 and json.loads(out)["spec"].startswith("chain")
    code, out, _ = call("classify", graph_file(directed_cycle(5)))
    assert code == 1 and json.loads(out)["outcome"] == "not-ultrahomogeneous"
    undirected = Ccd.from_function(5, [0] * 5, lambda u, v: int((u - v) % 5 in (1, 4)))
    code, out, _ = call("classify", graph_file(undirected))
    assert code == 2 and json.loads(out)["outcome"] == "out-of-scope"


def test_equiv(graph_file):
    a = graph_file(gen("union(E1, E1)"), "a.json")
    b = graph_file(gen("chain(n=1,t=2)"), "b.json")
    c = graph_file(gen("E2"), "c.json")
    assert call("equiv", a, b)[0] == 0
    assert call("equiv", a, c)[0] == 1


def test_verify_lachlan_output_is_deterministic():
    code1, out1, _ = call("verify", "lachlan", "--max-n", "5")
    code2, out2, _ = call("verify", "lachlan", "--max-n", "5", "--jobs", "2")
    assert code1 == code2 == 0
    assert out1 == out2
    data = json.loads(out1)
    assert data["ok"] and "seconds" not in data


def test_verify_timing_flag():
    code, out, _ = call("verify", "bichromatic", "--max-total", "4", "--timing")
    assert code == 0 and "seconds" in json.loads(out)


def test_verify_over_limit():
    code, _, err = call("verify", "lachlan", "--max-n", "9")
    assert code == 2 and "budget" in err


def test_usage_errors():
    assert call()[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("check", "--help")[0] == 0


def test_module_entry_point(tmp_path):
    p = tmp_path / "c3.json"
    p.write_text(directed_cycle(3).dumps())
    proc = subprocess.run([sys.executable, "-m", "uhgraphs", "check", str(p)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["is_uh"] is True
