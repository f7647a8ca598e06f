"""1-safe labelled Petri nets: token game, marking graph and related predicates.

Markings are frozensets of places. A firing that would put a second token
on a place is treated as a modelling error, never saturated silently.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .mas import Lts, ModelError, _sorted

Marking = frozenset


class NetError(ValueError):
    """Malformed net or illegal firing."""


class SafetyViolation(NetError):
    """A firing would place a second token on an already marked place."""

    def __init__(self, marking, transition, places):
        self.marking = marking
        self.transition = transition
        self.places = places
        super().__init__(
            f"1-safety violation: firing {transition} at {sorted(marking)} "
            f"double-marks {sorted(places)}"
        )


@dataclass(frozen=True)
class Check:
    """Outcome of a yes/no analysis, with a witness when the answer is no."""

    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class LabelledNet:
    """A plain net with initial marking and transition labelling.

    The flow relation is stored as per-transition presets and postsets.
    ``alphabet`` defaults to the set of labels in use; agent nets may
    declare extra labels they own but never fire, which still matters for
    synchronization.
    """

    places: frozenset
    pre: Mapping[Hashable, frozenset]
    post: Mapping[Hashable, frozenset]
    initial: frozenset
    label: Mapping[Hashable, Hashable]
    alphabet: frozenset = None  # type: ignore[assignment]
    _order: tuple = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "places", frozenset(self.places))
        object.__setattr__(self, "initial", frozenset(self.initial))
        pre = {t: frozenset(ps) for t, ps in self.pre.items()}
        post = {t: frozenset(ps) for t, ps in self.post.items()}
        label = dict(self.label)
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "post", post)
        object.__setattr__(self, "label", label)
        if pre.keys() != post.keys() or pre.keys() != label.keys():
            raise NetError("pre, post and label must cover the same transitions")
        for t in pre:
            if not pre[t] or not post[t]:
                raise NetError(f"transition {t} has an empty preset or postset")
            stray = (pre[t] | post[t]) - self.places
            if stray:
                raise NetError(f"transition {t} touches unknown places {sorted(stray)}")
        if not self.initial <= self.places:
            raise NetError("initial marking is not a set of places")
        used = frozenset(label.values())
        alphabet = used if self.alphabet is None else frozenset(self.alphabet) | used
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "_order", tuple(_sorted(pre)))

    @classmethod
    def from_flow(cls, places, flow: Iterable[tuple], initial, label: Mapping, alphabet=None) -> "LabelledNet":
        """Build from a flow relation given as ``(source, target)`` pairs."""
        places = frozenset(places)
        pre = {t: set() for t in label}
        post = {t: set() for t in label}
        for x, y in flow:
            if x in places and y in pre:
                pre[y].add(x)
            elif x in post and y in places:
                post[x].add(y)
            else:
                raise NetError(f"flow arc ({x!r}, {y!r}) is not place/transition")
        return cls(places, pre, post, initial, label, alphabet)

    @property
    def transitions(self) -> tuple:
        """Transition identifiers in canonical order."""
        return self._order

    @property
    def flow(self) -> frozenset:
        arcs = {(p, t) for t, ps in self.pre.items() for p in ps}
        arcs |= {(t, p) for t, ps in self.post.items() for p in ps}
        return frozenset(arcs)

    def transitions_labelled(self, label) -> list:
        return [t for t in self._order if self.label[t] == label]

    def __repr__(self):
        return f"LabelledNet(places={len(self.places)}, transitions={len(self.pre)}, initial={sorted(self.initial)})"


def _require(net: LabelledNet, t) -> None:
    if t not in net.pre:
        raise NetError(f"unknown transition {t!r}")


def enabled(net: LabelledNet, m: Marking, t) -> bool:
    _require(net, t)
    return net.pre[t] <= m


def fire(net: LabelledNet, m: Marking, t) -> Marking:
    """Fire ``t`` at ``m``; self-loop places keep their token."""
    if not enabled(net, m, t):
        raise NetError(f"transition {t} is not enabled at {sorted(m)}")
    pre, post = net.pre[t], net.post[t]
    clash = (post - pre) & m
    if clash:
        raise SafetyViolation(m, t, clash)
    return (m - pre) | post


@dataclass(frozen=True)
class MarkingGraph:
    """Reachable markings, in BFS discovery order, and the firings between them.

    Arcs are ``(marking, transition, label, marking')`` tuples; ``out`` maps
    each marking to its ``(transition, label, marking')`` successors.
    """

    initial: Marking
    nodes: tuple
    arcs: tuple
    out: Mapping = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.out is None:
            out: dict = {m: [] for m in self.nodes}
            for m, t, lab, m2 in self.arcs:
                out[m].append((t, lab, m2))
            object.__setattr__(self, "out", out)

    def fired(self) -> frozenset:
        """Transitions occurring on some arc."""
        return frozenset(t for _, t, _, _ in self.arcs)

    def to_lts(self) -> Lts:
        """Label-only projection, with markings rendered as sorted place tuples."""
        key = marking_key
        trans: dict = {}
        for m, _, lab, m2 in self.arcs:
            k = (key(m), lab)
            if k in trans and trans[k] != key(m2):
                raise ModelError(f"label {lab!r} is nondeterministic at {key(m)}")
            trans[k] = key(m2)
        return Lts(
            frozenset(key(m) for m in self.nodes),
            frozenset(lab for _, _, lab, _ in self.arcs),
            trans,
            key(self.initial),
        )


def marking_key(m: Marking) -> tuple:
    """Canonical encoding of a marking: the sorted tuple of its places."""
    return tuple(_sorted(m))


def marking_graph(net: LabelledNet, limit: int | None = None) -> MarkingGraph:
    """Breadth-first exploration of the reachable markings of ``net``.

    Raises :class:`SafetyViolation` on the first firing that breaks
    1-safety and :class:`NetError` when more than ``limit`` markings are found.
    """
    m0 = net.initial
    nodes = [m0]
    seen = {m0}
    arcs = []
    out: dict = {m0: []}
    queue = deque([m0])
    order = net.transitions
    while queue:
        m = queue.popleft()
        succ = out[m]
        for t in order:
            if not net.pre[t] <= m:
                continue
            m2 = fire(net, m, t)
            arcs.append((m, t, net.label[t], m2))
            succ.append((t, net.label[t], m2))
            if m2 not in seen:
                seen.add(m2)
                nodes.append(m2)
                out[m2] = []
                queue.append(m2)
                if limit is not None and len(nodes) > limit:
                    raise NetError(f"marking graph exceeds {limit} markings")
    return MarkingGraph(m0, tuple(nodes), tuple(arcs), out)


def is_one_live_bruteforce(net: LabelledNet, t) -> bool:
    """Whether ``t`` is enabled at some reachable marking (full exploration)."""
    _require(net, t)
    return any(net.pre[t] <= m for m in marking_graph(net).nodes)


def classify_pair(net: LabelledNet, m: Marking, t1, t2) -> str:
    """``"conflict"``, ``"concurrent"`` or ``"neither"`` for two transitions enabled at ``m``."""
    if t1 == t2:
        raise NetError("classify_pair needs two distinct transitions")
    for t in (t1, t2):
        if not enabled(net, m, t):
            raise NetError(f"transition {t} is not enabled at {sorted(m)}")
    if net.pre[t1] & net.pre[t2]:
        return "conflict"
    if not net.post[t1] & net.post[t2]:
        return "concurrent"
    return "neither"


def check_one_safe(net: LabelledNet) -> Check:
    """Explore the token game; on a violation the witness is the firing sequence reaching it."""
    parent: dict = {net.initial: None}
    queue = deque([net.initial])
    while queue:
        m = queue.popleft()
        for t in net.transitions:
            pre, post = net.pre[t], net.post[t]
            if not pre <= m:
                continue
            if (post - pre) & m:
                trace = [t]
                cur = m
                while parent[cur] is not None:
                    prev, via = parent[cur]
                    trace.append(via)
                    cur = prev
                return Check(False, tuple(reversed(trace)))
            m2 = (m - pre) | post
            if m2 not in parent:
                parent[m2] = (m, t)
                queue.append(m2)
    return Check(True)
