"""Command-line interface.

Exit codes: 0 success, 1 a checked property does not hold, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from pathlib import Path

from . import dot
from .compose import global_net, subsystem, verify_proposition1
from .generate import random_amas
from .liveness import DEFAULT_FRONTIER, HEURISTICS, check_1liveness, check_all, global_transitions
from .mas import ModelError, compose_iis, reachable_prune, render_global
from .modelfile import load_model, render_model
from .net import NetError, marking_graph
from .synthesis import (
    DEFAULT_BOUND,
    SynthesisError,
    agent_to_net,
    check_essp,
    check_ssp,
    enumerate_regions,
    minimal_regions,
    synthesize,
)

OK, VIOLATION, INPUT_ERROR = 0, 1, 2


class _Out:
    def __init__(self, stream, color: bool):
        self.stream = stream
        self.color = color

    def __call__(self, text: str = ""):
        print(text, file=self.stream)

    def verdict(self, live: bool) -> str:
        word = "live" if live else "dead"
        if not self.color:
            return word
        return f"\033[32m{word}\033[0m" if live else f"\033[31m{word}\033[0m"


def _states(xs) -> list:
    return sorted(str(x) for x in xs)


def _write_dot(path, text: str):
    if path:
        Path(path).write_text(text, encoding="utf-8")


def _emit_json(out: _Out, payload: dict):
    out(json.dumps(payload, indent=2, sort_keys=True))


def _agent_indices(amas, names):
    if not names:
        return list(range(len(amas)))
    idx = []
    for n in names:
        if n not in amas.names:
            raise ModelError(f"unknown agent {n!r}")
        idx.append(amas.names.index(n))
    return idx


def _net_payload(net) -> dict:
    return {
        "places": _states(net.places),
        "initial": _states(net.initial),
        "transitions": [
            {"id": str(t), "label": net.label[t], "pre": _states(net.pre[t]), "post": _states(net.post[t])}
            for t in net.transitions
        ],
    }


def _print_net(out: _Out, net, title: str):
    out(f"{title}: {len(net.places)} places, {len(net.transitions)} transitions")
    out(f"  initial: {{{', '.join(_states(net.initial))}}}")
    for t in net.transitions:
        out(f"  {net.label[t]:<6} {str(t):<40} {','.join(_states(net.pre[t]))} -> {','.join(_states(net.post[t]))}")


def cmd_iis(args, out):
    amas = load_model(args.model)
    lts = compose_iis(amas, eager=args.eager)
    if args.eager:
        full = len(lts.states)
        lts = reachable_prune(lts)
    _write_dot(args.dot, dot.lts_to_dot(lts, "iis", render_global))
    arcs = [(render_global(s), e, render_global(t)) for s, e, t in lts.arcs()]
    if args.json:
        payload = {"command": "iis", "initial": render_global(lts.initial),
                   "states": sorted(render_global(s) for s in lts.states), "arcs": [list(a) for a in arcs]}
        if args.eager:
            payload["product_states"] = full
        _emit_json(out, payload)
        return OK
    if args.eager:
        out(f"product states: {full}")
    out(f"reachable global states: {len(lts.states)}")
    out(f"arcs: {len(arcs)}")
    out(f"initial: {render_global(lts.initial)}")
    for s, e, t in arcs:
        out(f"  {s} --{e}--> {t}")
    return OK


def cmd_synth(args, out):
    amas = load_model(args.model)
    status = OK
    payload = []
    dots = []
    for i in _agent_indices(amas, args.agent):
        name = amas.names[i]
        if args.exact:
            try:
                net = synthesize(amas.agents[i], args.bound)
            except SynthesisError as err:
                status = VIOLATION
                payload.append({"agent": name, "ok": False, "failure": err.kind,
                                "witness": [str(w) for w in err.witness] if isinstance(err.witness, tuple) else str(err.witness)})
                if not args.json:
                    out(f"agent {name}: not synthesizable: {err}")
                continue
        else:
            net = agent_to_net(amas.agents[i], i)
        dots.append(dot.net_to_dot(net, name))
        payload.append({"agent": name, "ok": True, **_net_payload(net)})
        if not args.json:
            _print_net(out, net, f"agent {name}")
    _write_dot(args.dot, "".join(dots))
    if args.json:
        _emit_json(out, {"command": "synth", "exact": args.exact, "agents": payload})
    return status


def cmd_compose(args, out):
    amas = load_model(args.model)
    net = global_net(amas)
    _write_dot(args.dot, dot.net_to_dot(net, "global"))
    if args.json:
        _emit_json(out, {"command": "compose", **_net_payload(net)})
    else:
        _print_net(out, net, "global net")
    return OK


def cmd_mg(args, out):
    amas = load_model(args.model)
    if args.labels:
        sub = subsystem(amas, [agent_to_net(a, i) for i, a in enumerate(amas.agents)], args.labels.split(","))
        net, agents = sub.net, sorted(sub.agents)
    else:
        net, agents = global_net(amas), list(range(len(amas)))
    mg = marking_graph(net)
    _write_dot(args.dot, dot.marking_graph_to_dot(mg))
    names = [amas.names[i] for i in agents]
    index = {m: i for i, m in enumerate(mg.nodes)}
    if args.json:
        _emit_json(out, {
            "command": "mg", "agents": names,
            "markings": [_states(m) for m in mg.nodes],
            "arcs": [[index[m], str(t), lab, index[m2]] for m, t, lab, m2 in mg.arcs],
        })
        return OK
    out(f"agents: {', '.join(names)}")
    out(f"markings: {len(mg.nodes)}")
    out(f"arcs: {len(mg.arcs)}")
    for m in mg.nodes:
        out(f"  m{index[m]} = {{{', '.join(_states(m))}}}")
    for m, t, lab, m2 in mg.arcs:
        out(f"  m{index[m]} --{lab}--> m{index[m2]}")
    return OK


def cmd_regions(args, out):
    amas = load_model(args.model)
    payload = []
    for i in _agent_indices(amas, args.agent):
        a, name = amas.agents[i], amas.names[i]
        regions = enumerate_regions(a, args.bound)
        minimal = minimal_regions(regions)
        order = sorted(minimal, key=lambda r: (len(r), _states(r)))
        ssp, essp = check_ssp(a, order), check_essp(a, order)
        entry = {
            "agent": name,
            "regions": sorted((_states(r) for r in regions), key=lambda r: (len(r), r)),
            "minimal": [_states(r) for r in order],
            "ssp": {"ok": ssp.ok, "witness": None if ssp else [str(w) for w in ssp.witness]},
            "essp": {"ok": essp.ok, "witness": None if essp else [str(w) for w in essp.witness]},
        }
        payload.append(entry)
        if args.json:
            continue
        out(f"agent {name}: {len(regions)} regions, {len(minimal)} minimal")
        for r in entry["regions"]:
            mark = "*" if r in entry["minimal"] else " "
            out(f"  {mark} {{{', '.join(r)}}}")
        out(f"  SSP: {'yes' if ssp else 'no, unseparated ' + ' / '.join(entry['ssp']['witness'])}")
        out(f"  ESSP: {'yes' if essp else 'no, ' + entry['essp']['witness'][1] + ' disabled at ' + entry['essp']['witness'][0]}")
    if args.json:
        _emit_json(out, {"command": "regions", "agents": payload})
    return OK


def _result_payload(amas, r) -> dict:
    t = r.transition
    return {
        "transition": str(t),
        "label": t.label,
        "components": {amas.names[i]: str(c) for i, c in t.components},
        "live": r.live,
        "witness": None if r.path is None else {
            "labels": list(r.path.labels),
            "transitions": [str(s) for s in r.path.steps],
        },
        "subsystems": [
            {"agents": [amas.names[i] for i in v.agents], "labels": list(v.labels),
             "markings": v.markings, "arcs": v.arcs}
            for v in r.visits
        ],
    }


def cmd_liveness(args, out):
    amas = load_model(args.model)
    nets = [agent_to_net(a, i) for i, a in enumerate(amas.agents)]
    labels = args.label or None
    if labels:
        unknown = set(labels) - amas.events
        if unknown:
            raise ModelError(f"unknown labels {sorted(unknown)}")
    if args.transition:
        matches = [t for t in global_transitions(amas, nets, labels) if str(t) == args.transition]
        if not matches:
            raise ModelError(f"no global transition {args.transition!r}")
        results = [check_1liveness(matches[0], amas, nets, heuristic=args.heuristic, frontier=args.frontier)]
    else:
        results = check_all(amas, nets, labels, args.heuristic, args.frontier)
    dead = [r for r in results if not r.live]
    shown = dead if args.all else results
    if args.json:
        _emit_json(out, {
            "command": "liveness", "heuristic": args.heuristic,
            "checked": len(results),
            "dead": [str(r.transition) for r in dead],
            "results": [_result_payload(amas, r) for r in shown],
        })
    else:
        out(f"checked {len(results)} global transitions, {len(dead)} dead (heuristic: {args.heuristic})")
        for r in shown:
            line = f"  {out.verdict(r.live)}  {r.transition}"
            if r.path is not None:
                line += f"  via {' '.join(r.path.labels)}"
            out(line)
            if args.verbose:
                for v in r.visits:
                    names = ",".join(amas.names[i] for i in v.agents)
                    out(f"      subsystem {{{names}}} from labels {{{','.join(v.labels)}}}: {v.markings} markings, {v.arcs} arcs")
    return VIOLATION if (dead and args.fail_on_dead) else OK


def cmd_verify_prop1(args, out):
    amas = load_model(args.model)
    ok = verify_proposition1(amas)
    mg = marking_graph(global_net(amas))
    iis = compose_iis(amas)
    if args.json:
        _emit_json(out, {"command": "verify-prop1", "isomorphic": ok,
                         "markings": len(mg.nodes), "iis_states": len(iis.states)})
    else:
        out(f"isomorphic: {str(ok).lower()}")
        out(f"marking graph: {len(mg.nodes)} markings, {len(mg.arcs)} arcs")
        out(f"reachable IIS: {len(iis.states)} states, {len(iis.trans)} arcs")
    return OK if ok else VIOLATION


def cmd_gen(args, out):
    amas = random_amas(args.seed, args.agents, args.states, args.labels, args.density)
    text = render_model(amas)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.stream.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amasnet", description="Multi-agent systems as 1-safe Petri nets.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def model_cmd(name, func, help_, dot_=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("model", help="model file, '-' for stdin, or a bundled model name")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if dot_:
            sp.add_argument("--dot", metavar="PATH", help="write a Graphviz rendering")
        sp.set_defaults(func=func)
        return sp

    sp = model_cmd("iis", cmd_iis, "reachable interleaved composition of the agents")
    sp.add_argument("--eager", action="store_true", help="build the full product first, then prune")

    sp = model_cmd("synth", cmd_synth, "translate agents into nets")
    sp.add_argument("--exact", action="store_true", help="region-based synthesis instead of states-as-places")
    sp.add_argument("--agent", action="append", help="restrict to this agent (repeatable)")
    sp.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="max states for region enumeration")

    model_cmd("compose", cmd_compose, "global net by transition fusion")

    sp = model_cmd("mg", cmd_mg, "marking graph of the global net or of a subsystem")
    sp.add_argument("--labels", help="comma-separated labels selecting a subsystem")

    sp = model_cmd("regions", cmd_regions, "regions and separation properties per agent", dot_=False)
    sp.add_argument("--agent", action="append", help="restrict to this agent (repeatable)")
    sp.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="max states for region enumeration")

    sp = model_cmd("liveness", cmd_liveness, "1-liveness of global transitions", dot_=False)
    sp.add_argument("--label", action="append", help="restrict to transitions with this label (repeatable)")
    sp.add_argument("--transition", help="check a single global transition, given as printed")
    sp.add_argument("--all", action="store_true", help="report only the dead transitions")
    sp.add_argument("--heuristic", choices=HEURISTICS, default="agents")
    sp.add_argument("--frontier", type=int, default=DEFAULT_FRONTIER, help="candidate paths kept for selection")
    sp.add_argument("--fail-on-dead", action="store_true", help="exit 1 if a dead transition is found")
    sp.add_argument("-v", "--verbose", action="store_true", help="list the subsystems explored")

    model_cmd("verify-prop1", cmd_verify_prop1, "compare fused-net marking graph with the interleaved composition",
              dot_=False)

    sp = sub.add_parser("gen", help="print a seeded random model")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--agents", type=int, default=3, help="maximum number of agents")
    sp.add_argument("--states", type=int, default=4, help="maximum states per agent")
    sp.add_argument("--labels", type=int, default=5, help="size of the label pool")
    sp.add_argument("--density", type=float, default=0.35, help="probability of an arc per state and label")
    sp.add_argument("-o", "--output", metavar="PATH")
    sp.set_defaults(func=cmd_gen)
    return p


def run_command(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    color = "NO_COLOR" not in os.environ and hasattr(stdout, "isatty") and stdout.isatty()
    out = _Out(stdout, color)
    try:
        return args.func(args, out)
    except (ModelError, NetError, FileNotFoundError, ValueError) as err:
        print(f"amasnet: error: {err}", file=stderr)
        return INPUT_ERROR


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
