"""Agents as deterministic labelled transition systems and their interleaved composition."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

State = Hashable
GlobalState = tuple  # one local state per agent, in agent order

#: separator used when a global state has to be rendered as a single name
GLOBAL_SEP = "|"


class ModelError(ValueError):
    """Raised for malformed transition systems or agent collections."""


def _sorted(items: Iterable) -> list:
    try:
        return sorted(items)
    except TypeError:
        return sorted(items, key=repr)


@dataclass(frozen=True, eq=False)
class Lts:
    """A deterministic, initialized labelled transition system.

    ``trans`` maps ``(state, label)`` to the successor state; a state's
    protocol is read off the keys of this mapping.
    """

    states: frozenset
    events: frozenset
    trans: Mapping[tuple, State]
    initial: State
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "events", frozenset(self.events))
        object.__setattr__(self, "trans", dict(self.trans))
        if self.initial not in self.states:
            raise ModelError(f"initial state {self.initial!r} is not a state")
        out: dict = {s: {} for s in self.states}
        for (s, e), t in self.trans.items():
            if s not in self.states:
                raise ModelError(f"arc source {s!r} is not a state")
            if t not in self.states:
                raise ModelError(f"arc target {t!r} is not a state")
            if e not in self.events:
                raise ModelError(f"arc label {e!r} is not an event")
            out[s][e] = t
        object.__setattr__(self, "_out", out)

    @classmethod
    def from_arcs(cls, arcs: Iterable[tuple], initial: State, states: Iterable = (), events: Iterable = ()) -> "Lts":
        """Build from ``(source, label, target)`` triples; states and events are inferred."""
        trans: dict = {}
        st = set(states) | {initial}
        ev = set(events)
        for s, e, t in arcs:
            if (s, e) in trans and trans[s, e] != t:
                raise ModelError(f"nondeterministic arcs from {s!r} on {e!r}")
            trans[s, e] = t
            st.update((s, t))
            ev.add(e)
        return cls(frozenset(st), frozenset(ev), trans, initial)

    def arcs(self) -> list[tuple]:
        """All arcs as sorted ``(source, label, target)`` triples."""
        return _sorted((s, e, t) for (s, e), t in self.trans.items())

    def successors(self, state: State) -> dict:
        """``label -> successor`` for the arcs leaving ``state``."""
        return self._out[state]

    def sorted_states(self) -> list:
        return _sorted(self.states)

    def __eq__(self, other):
        if not isinstance(other, Lts):
            return NotImplemented
        return (
            self.states == other.states
            and self.events == other.events
            and self.trans == other.trans
            and self.initial == other.initial
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"Lts(states={len(self.states)}, events={_sorted(self.events)}, arcs={len(self.trans)}, initial={self.initial!r})"


@dataclass(frozen=True)
class Amas:
    """An ordered collection of agents synchronizing on shared event labels.

    Agents are indexed from 0. Their state sets must be pairwise disjoint;
    use :meth:`from_agents` to namespace them automatically.
    """

    agents: tuple
    names: tuple = ()

    def __post_init__(self):
        agents = tuple(self.agents)
        names = tuple(self.names) or tuple(f"agent{i}" for i in range(len(agents)))
        if len(names) != len(agents):
            raise ModelError("one name per agent is required")
        if len(set(names)) != len(names):
            raise ModelError("agent names must be unique")
        seen: dict = {}
        for i, a in enumerate(agents):
            for s in a.states:
                if s in seen:
                    raise ModelError(f"state {s!r} is shared by agents {seen[s]} and {i}")
                seen[s] = i
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "names", names)

    @classmethod
    def from_agents(cls, agents: Sequence[Lts], names: Sequence[str] | None = None) -> "Amas":
        """Namespace every agent's states as ``name.state`` and wrap them."""
        names = tuple(names) if names else tuple(f"agent{i}" for i in range(len(agents)))
        wrapped = []
        for name, a in zip(names, agents):
            ren = {s: f"{name}.{s}" for s in a.states}
            wrapped.append(Lts(
                frozenset(ren.values()),
                a.events,
                {(ren[s], e): ren[t] for (s, e), t in a.trans.items()},
                ren[a.initial],
            ))
        return cls(tuple(wrapped), names)

    def __len__(self):
        return len(self.agents)

    def __iter__(self) -> Iterator[Lts]:
        return iter(self.agents)

    @property
    def events(self) -> frozenset:
        return frozenset().union(*(a.events for a in self.agents))


def protocol(agent: Lts, state: State) -> frozenset:
    """The labels enabled in ``state``."""
    if state not in agent.states:
        raise ModelError(f"unknown state {state!r}")
    return frozenset(agent.successors(state))


def agents_sharing(amas: Amas, label) -> frozenset:
    """Indices of the agents whose alphabet contains ``label``."""
    return frozenset(i for i, a in enumerate(amas.agents) if label in a.events)


def _global_step(amas: Amas, owners: Mapping, g: tuple, label) -> tuple | None:
    nxt = list(g)
    for i in owners[label]:
        t = amas.agents[i].successors(g[i]).get(label)
        if t is None:
            return None
        nxt[i] = t
    return tuple(nxt)


def compose_iis(amas: Amas, eager: bool = False) -> Lts:
    """Interleaved composition of all agents.

    A label fires only if every agent owning it enables it; agents that do
    not own it stay put. By default only the part reachable from the
    initial global state is built. With ``eager=True`` every tuple of the
    product of local state sets is materialized (unreachable ones included).
    """
    if not amas.agents:
        raise ModelError("cannot compose an empty agent list")
    labels = _sorted(amas.events)
    owners = {e: _sorted(agents_sharing(amas, e)) for e in labels}
    init = tuple(a.initial for a in amas.agents)
    trans: dict = {}
    if eager:
        states = set(itertools.product(*(a.sorted_states() for a in amas.agents)))
        for g in states:
            for e in labels:
                nxt = _global_step(amas, owners, g, e)
                if nxt is not None:
                    trans[g, e] = nxt
        return Lts(frozenset(states), frozenset(labels), trans, init)

    seen = {init}
    queue = deque([init])
    while queue:
        g = queue.popleft()
        for e in labels:
            nxt = _global_step(amas, owners, g, e)
            if nxt is None:
                continue
            trans[g, e] = nxt
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Lts(frozenset(seen), frozenset(labels), trans, init)


def reachable_states(lts: Lts) -> set:
    seen = {lts.initial}
    queue = deque([lts.initial])
    while queue:
        s = queue.popleft()
        for t in lts.successors(s).values():
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def reachable_prune(lts: Lts) -> Lts:
    """Restrict ``lts`` to the states reachable from its initial state."""
    keep = reachable_states(lts)
    if len(keep) == len(lts.states):
        return lts
    trans = {(s, e): t for (s, e), t in lts.trans.items() if s in keep}
    return Lts(frozenset(keep), lts.events, trans, lts.initial)


def iso_check(a: Lts, b: Lts) -> bool:
    """Decide whether two reachable deterministic LTSs are isomorphic.

    Determinism means the only candidate bijection is the one induced by
    walking both systems in lockstep from their initial states. Event sets
    are not compared, only the labelled arcs.
    """
    for x in (a, b):
        if len(reachable_states(x)) != len(x.states):
            raise ModelError("iso_check expects reachable-pruned systems")
    if len(a.states) != len(b.states) or len(a.trans) != len(b.trans):
        return False
    fwd = {a.initial: b.initial}
    bwd = {b.initial: a.initial}
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        t = fwd[s]
        out_a, out_b = a.successors(s), b.successors(t)
        if out_a.keys() != out_b.keys():
            return False
        for e, s2 in out_a.items():
            t2 = out_b[e]
            if s2 in fwd:
                if fwd[s2] != t2:
                    return False
            elif t2 in bwd:
                return False
            else:
                fwd[s2] = t2
                bwd[t2] = s2
                queue.append(s2)
    return True


def render_global(state: tuple) -> str:
    return GLOBAL_SEP.join(str(s) for s in state)
