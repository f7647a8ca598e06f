"""Graphviz DOT rendering of nets, marking graphs and transition systems.

Node names are positional so the output never depends on identifier
syntax: places are ``p0, p1, ...`` in sorted place order, transitions are
``t0, t1, ...`` in the net's canonical transition order, marking-graph
nodes are ``m0, m1, ...`` in breadth-first discovery order (``m0`` is the
initial marking) and LTS states are ``s0, s1, ...`` in sorted order.
Human-readable names go into ``label`` attributes.
"""

from __future__ import annotations

from .mas import Lts, _sorted
from .net import LabelledNet, MarkingGraph


def quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def net_to_dot(net: LabelledNet, name: str = "net") -> str:
    places = _sorted(net.places)
    pid = {p: f"p{i}" for i, p in enumerate(places)}
    lines = [f"digraph {quote(name)} {{", "  rankdir=LR;"]
    for p in places:
        marked = ', style=filled, fillcolor="gray80"' if p in net.initial else ""
        lines.append(f"  {pid[p]} [shape=circle, label={quote(p)}{marked}];")
    for i, t in enumerate(net.transitions):
        text = f"{net.label[t]}\n{t}"
        lines.append(f"  t{i} [shape=box, label={quote(text)}];")
    for i, t in enumerate(net.transitions):
        for p in _sorted(net.pre[t]):
            lines.append(f"  {pid[p]} -> t{i};")
        for p in _sorted(net.post[t]):
            lines.append(f"  t{i} -> {pid[p]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def marking_graph_to_dot(mg: MarkingGraph, name: str = "marking_graph", with_transitions: bool = False) -> str:
    mid = {m: f"m{i}" for i, m in enumerate(mg.nodes)}
    lines = [f"digraph {quote(name)} {{"]
    for m in mg.nodes:
        shape = "doublecircle" if m == mg.initial else "ellipse"
        lines.append(f"  {mid[m]} [shape={shape}, label={quote(','.join(map(str, _sorted(m))))}];")
    for m, t, lab, m2 in mg.arcs:
        text = f"{lab}\n{t}" if with_transitions else lab
        lines.append(f"  {mid[m]} -> {mid[m2]} [label={quote(text)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def lts_to_dot(lts: Lts, name: str = "lts", render=str) -> str:
    states = lts.sorted_states()
    sid = {s: f"s{i}" for i, s in enumerate(states)}
    lines = [f"digraph {quote(name)} {{"]
    for s in states:
        shape = "doublecircle" if s == lts.initial else "ellipse"
        lines.append(f"  {sid[s]} [shape={shape}, label={quote(render(s))}];")
    for s, e, t in lts.arcs():
        lines.append(f"  {sid[s]} -> {sid[t]} [label={quote(e)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
