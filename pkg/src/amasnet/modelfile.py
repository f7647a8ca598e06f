"""Plain-text AMAS model files.

Grammar, one directive per line, ``#`` starts a comment::

    agent <name>
    states <state> [<state> ...]     # may repeat
    init <state>
    events <label> [<label> ...]     # optional: labels owned without arcs
    arc <source> <label> <target>

Tokens are whitespace-free. Every ``agent`` line opens a new agent; the
other directives apply to the most recent one. Agent names must be unique
and may not contain ``.`` because states are namespaced as ``name.state``.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from .mas import Amas, Lts, ModelError, _sorted


class ModelFileError(ModelError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class _Decl:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.states: dict = {}
        self.init: str | None = None
        self.events: set = set()
        self.arcs: dict = {}


def parse_model(text: str) -> Amas:
    decls: list[_Decl] = []
    for no, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        kw, args = words[0], words[1:]
        if kw == "agent":
            if len(args) != 1:
                raise ModelFileError(no, "expected 'agent <name>'")
            name = args[0]
            if "." in name:
                raise ModelFileError(no, f"agent name {name!r} may not contain '.'")
            if any(d.name == name for d in decls):
                raise ModelFileError(no, f"duplicate agent {name!r}")
            decls.append(_Decl(name, no))
            continue
        if not decls:
            raise ModelFileError(no, f"'{kw}' before any 'agent' line")
        d = decls[-1]
        if kw == "states":
            if not args:
                raise ModelFileError(no, "expected at least one state")
            for s in args:
                d.states.setdefault(s, no)
        elif kw == "init":
            if len(args) != 1:
                raise ModelFileError(no, "expected 'init <state>'")
            if d.init is not None:
                raise ModelFileError(no, f"agent {d.name!r} already has an initial state")
            if args[0] not in d.states:
                raise ModelFileError(no, f"unknown state {args[0]!r} in agent {d.name!r}")
            d.init = args[0]
        elif kw == "events":
            d.events.update(args)
        elif kw == "arc":
            if len(args) != 3:
                raise ModelFileError(no, "expected 'arc <source> <label> <target>'")
            src, lab, dst = args
            for s in (src, dst):
                if s not in d.states:
                    raise ModelFileError(no, f"unknown state {s!r} in agent {d.name!r}")
            if (src, lab) in d.arcs:
                raise ModelFileError(no, f"duplicate arc from {src!r} on {lab!r} (first on line {d.arcs[src, lab][1]})")
            d.arcs[src, lab] = (dst, no)
        else:
            raise ModelFileError(no, f"unknown directive {kw!r}")
    if not decls:
        raise ModelFileError(1, "no agents declared")
    agents = []
    for d in decls:
        if d.init is None:
            raise ModelFileError(d.line, f"agent {d.name!r} has no 'init' line")
        events = d.events | {lab for _, lab in d.arcs}
        agents.append(Lts(frozenset(d.states), frozenset(events), {k: v[0] for k, v in d.arcs.items()}, d.init))
    return Amas.from_agents(agents, [d.name for d in decls])


def _local(name: str, state) -> str:
    s = str(state)
    prefix = name + "."
    return s[len(prefix):] if s.startswith(prefix) else s


def render_model(amas: Amas) -> str:
    """Canonical text: sorted states and arcs, blank line between agents."""
    blocks = []
    for name, a in zip(amas.names, amas.agents):
        lines = [f"agent {name}", "states " + " ".join(_sorted(_local(name, s) for s in a.states))]
        lines.append(f"init {_local(name, a.initial)}")
        silent = a.events - {e for (_, e) in a.trans}
        if silent:
            lines.append("events " + " ".join(_sorted(silent)))
        for s, e, t in _sorted((_local(name, s), e, _local(name, t)) for s, e, t in a.arcs()):
            lines.append(f"arc {s} {e} {t}")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def builtin_models() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("amasnet").joinpath("models").iterdir() if p.name.endswith(".amas"))


def builtin_text(name: str) -> str:
    return resources.files("amasnet").joinpath("models").joinpath(f"{name}.amas").read_text(encoding="utf-8")


def load_model(source: str) -> Amas:
    """Read a model from a path, ``-`` for stdin, or the name of a bundled model."""
    if source == "-":
        return parse_model(sys.stdin.read())
    path = Path(source)
    if path.exists():
        return parse_model(path.read_text(encoding="utf-8"))
    if source in builtin_models():
        return parse_model(builtin_text(source))
    raise FileNotFoundError(f"no such model file: {source}")
