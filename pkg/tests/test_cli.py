import io
import json
import re
import subprocess
import sys

import pytest

from amasnet import global_net, load_model
from amasnet.cli import run_command
from amasnet.dot import lts_to_dot, marking_graph_to_dot, net_to_dot
from amasnet.mas import compose_iis
from amasnet.net import marking_graph

ID = r'(?:[A-Za-z_][A-Za-z0-9_]*|"(?:[^"\\]|\\.)*")'
ATTRS = rf"\[(?:\s*{ID}\s*=\s*{ID}\s*,?)*\s*\]"
STATEMENT = re.compile(rf"^\s*(?:{ID}(?:\s*->\s*{ID})?\s*(?:{ATTRS})?|{ID}\s*=\s*{ID})\s*;\s*$")


def lint_dot(text):
    """A small checker for the DOT subset the exporters emit; a file may hold several graphs."""
    graphs = [g for g in re.split(r"(?m)^\}$", text) if g.strip()]
    assert graphs
    for g in graphs:
        lint_graph(g.strip() + "\n}")


def lint_graph(text):
    lines = text.splitlines()
    assert re.match(rf"^digraph {ID} \{{$", lines[0]), lines[0]
    assert lines[-1] == "}"
    nodes, edges = set(), []
    for line in lines[1:-1]:
        assert STATEMENT.match(line), line
        edge = re.match(rf"^\s*({ID})\s*->\s*({ID})", line)
        node = re.match(rf"^\s*({ID})\s*\[", line)
        if edge:
            edges.append((edge.group(1), edge.group(2)))
        elif node:
            nodes.add(node.group(1))
    for a, b in edges:
        assert a in nodes and b in nodes, (a, b)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_verify_prop1_tgc():
    code, out, _ = run("verify-prop1", "tgc")
    assert code == 0
    assert out.splitlines()[0] == "isomorphic: true"


def test_liveness_dead_zero_zero_labels_dead():
    code, out, _ = run("liveness", "dead_zero", "--label", "0", "--all", "--json")
    assert code == 0
    report = json.loads(out)
    g = global_net(load_model("dead_zero"))
    assert sorted(report["dead"]) == sorted(str(t) for t in g.transitions_labelled("0"))
    assert report["checked"] == 4
    assert all(not r["live"] for r in report["results"])
    code, _, _ = run("liveness", "dead_zero", "--label", "0", "--fail-on-dead")
    assert code == 1


def test_liveness_single_transition_and_verbose():
    code, out, _ = run("liveness", "fewest_agents", "--transition", "d[1:ag1.p1->ag1.p2]", "-v")
    assert code == 0
    assert "via b c d" in out
    assert "subsystem {ag1,ag3}" in out
    code, _, err = run("liveness", "fewest_agents", "--transition", "nope")
    assert code == 2 and "nope" in err


def test_liveness_json_keys():
    code, out, _ = run("liveness", "fewest_agents", "--label", "d", "--json", "--heuristic", "short")
    report = json.loads(out)
    assert set(report) == {"command", "heuristic", "checked", "dead", "results"}
    (r,) = report["results"]
    assert set(r) == {"transition", "label", "components", "live", "witness", "subsystems"}
    assert r["witness"]["labels"] == ["a", "d"]
    assert set(r["subsystems"][0]) == {"agents", "labels", "markings", "arcs"}


@pytest.mark.parametrize("cmd", ["iis", "synth", "compose", "mg"])
def test_graph_commands_write_valid_dot(cmd, tmp_path):
    path = tmp_path / f"{cmd}.dot"
    code, out, _ = run(cmd, "fewest_agents", "--dot", str(path), "--json")
    assert code == 0
    assert json.loads(out)["command"] == cmd
    lint_dot(path.read_text())


def test_dot_exporters_are_lintable():
    amas = load_model("dead_zero")
    g = global_net(amas)
    lint_dot(net_to_dot(g))
    lint_dot(marking_graph_to_dot(marking_graph(g), with_transitions=True))
    lint_dot(lts_to_dot(compose_iis(amas)))
    text = net_to_dot(g)
    assert "p0 [shape=circle" in text and "t0 [shape=box" in text
    assert "m0 [shape=doublecircle" in marking_graph_to_dot(marking_graph(g))


def test_mg_subsystem_and_regions():
    code, out, _ = run("mg", "fewest_agents", "--labels", "b,c,d", "--json")
    small = json.loads(out)
    _, out, _ = run("mg", "fewest_agents", "--labels", "a,d", "--json")
    big = json.loads(out)
    assert len(small["markings"]) < len(big["markings"])
    code, out, _ = run("regions", "dead_zero", "--agent", "middle", "--json")
    (rep,) = json.loads(out)["agents"]
    assert len(rep["regions"]) == 2 and rep["ssp"]["ok"] is False


def test_synth_exact_failure_is_reported():
    code, out, _ = run("synth", "dead_zero", "--exact", "--agent", "middle", "--json")
    assert code == 1
    (rep,) = json.loads(out)["agents"]
    assert rep["ok"] is False and rep["failure"] == "SSP"


def test_gen_is_deterministic(tmp_path):
    a = run("gen", "--seed", "7", "--agents", "3")
    b = run("gen", "--seed", "7", "--agents", "3")
    assert a == b and a[0] == 0
    path = tmp_path / "m.amas"
    run("gen", "--seed", "7", "--agents", "3", "-o", str(path))
    assert path.read_text() == a[1]
    code, out, _ = run("verify-prop1", str(path))
    assert code == 0 and "isomorphic: true" in out


def test_commands_are_deterministic():
    for argv in (["iis", "dead_zero", "--json"], ["liveness", "false_path", "--json"], ["compose", "tgc"]):
        assert run(*argv) == run(*argv)


def test_usage_errors():
    code, _, err = run("frobnicate")
    assert code == 2 and "usage" in err
    code, _, err = run("liveness", "dead_zero", "--bogus")
    assert code == 2 and "usage" in err
    code, _, err = run("iis", "/no/such/file.amas")
    assert code == 2 and "no such model file" in err
    code, _, err = run("liveness", "dead_zero", "--label", "zz")
    assert code == 2


def test_stdin_and_no_color(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "amasnet.cli", "liveness", "-"],
        input="agent A\nstates s0 s1\ninit s0\narc s0 a s1\n",
        capture_output=True, text=True, env={"NO_COLOR": "1", "PATH": ""}, cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert "\033[" not in proc.stdout
    assert "live  a[0:A.s0->A.s1]" in proc.stdout
