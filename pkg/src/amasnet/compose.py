"""Transition fusion of agent nets, and label-selected subsystems."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .mas import Amas, ModelError, _sorted, agents_sharing, compose_iis, iso_check, reachable_prune
from .net import LabelledNet, marking_graph
from .synthesis import agent_to_net


@dataclass(frozen=True, order=True)
class GlobalTransition:
    """A fused transition: one same-labelled component per participating agent.

    ``components`` is a tuple of ``(agent_index, component_transition)``
    sorted by agent index, so equal fusions compare and hash equal across
    every subsystem they appear in.
    """

    label: str
    components: tuple

    @property
    def agents(self) -> frozenset:
        return frozenset(i for i, _ in self.components)

    def component(self, agent: int):
        return dict(self.components)[agent]

    def __str__(self):
        parts = ",".join(f"{i}:{c.source}->{c.target}" if hasattr(c, "source") else f"{i}:{c}"
                         for i, c in self.components)
        return f"{self.label}[{parts}]"


@dataclass(frozen=True)
class Subsystem:
    agents: frozenset
    net: LabelledNet
    labels: frozenset


def _indexed(agent_nets) -> list[tuple[int, LabelledNet]]:
    if isinstance(agent_nets, Mapping):
        return sorted(agent_nets.items())
    return list(enumerate(agent_nets))


def fused_transitions(agent_nets, label) -> Iterator[GlobalTransition]:
    """Lazily enumerate the cartesian product of ``label``-transitions over its owners."""
    members = [(i, n) for i, n in _indexed(agent_nets) if label in n.alphabet]
    if not members:
        return
    pools = [[(i, t) for t in n.transitions_labelled(label)] for i, n in members]
    for combo in itertools.product(*pools):
        yield GlobalTransition(label, tuple(combo))


def compose_nets(agent_nets: Sequence[LabelledNet] | Mapping[int, LabelledNet]) -> LabelledNet:
    """Fuse agent nets on shared labels.

    ``agent_nets`` is a sequence (indexed by position) or a mapping from
    agent index to net. A label owned by k agents yields the product of
    their same-labelled transitions; fused transitions that can never fire
    are kept.
    """
    members = _indexed(agent_nets)
    places: set = set()
    for i, n in members:
        clash = places & n.places
        if clash:
            raise ModelError(f"agent {i} reuses places {sorted(clash)}")
        places |= n.places
    nets = dict(members)
    pre, post, label = {}, {}, {}
    alphabet = frozenset().union(*(n.alphabet for _, n in members))
    for a in _sorted(alphabet):
        for gt in fused_transitions(nets, a):
            pre[gt] = frozenset().union(*(nets[i].pre[t] for i, t in gt.components))
            post[gt] = frozenset().union(*(nets[i].post[t] for i, t in gt.components))
            label[gt] = a
    initial = frozenset().union(*(n.initial for _, n in members))
    return LabelledNet(frozenset(places), pre, post, initial, label, alphabet)


def agents_for(amas: Amas, labels: Iterable) -> frozenset:
    """Agents whose alphabet meets ``labels``."""
    return frozenset().union(*(agents_sharing(amas, a) for a in labels))


def subsystem(amas: Amas, agent_nets: Sequence[LabelledNet], labels: Iterable) -> Subsystem:
    """Compose exactly the agents owning at least one label in ``labels``.

    Labels also owned by excluded agents synchronize only among the
    included ones.
    """
    labels = frozenset(labels)
    if not labels:
        raise ModelError("label set must be non-empty")
    chosen = agents_for(amas, labels)
    if not chosen:
        raise ModelError(f"no agent owns any of {sorted(labels)}")
    return Subsystem(chosen, compose_nets({i: agent_nets[i] for i in chosen}), labels)


def project_transition(t: GlobalTransition, sub: Subsystem, amas: Amas | None = None):
    """The copy of ``t`` inside ``sub``, or None if some owner of its label is missing.

    Without ``amas`` the owners are taken to be ``t``'s own components,
    which is exact for transitions of the global net.
    """
    owners = agents_sharing(amas, t.label) if amas is not None else t.agents
    if not owners <= sub.agents:
        return None
    return t if t in sub.net.pre else None


def global_net(amas: Amas) -> LabelledNet:
    return compose_nets([agent_to_net(a, i) for i, a in enumerate(amas.agents)])


def verify_proposition1(amas: Amas) -> bool:
    """Marking graph of the fused net vs. the reachable interleaved composition."""
    mg = marking_graph(global_net(amas)).to_lts()
    return iso_check(mg, reachable_prune(compose_iis(amas)))
