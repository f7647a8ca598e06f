"""Deciding 1-liveness of fused transitions from label-selected subsystems.

Starting from the agents owning the target's label, the checker looks for
minimal firing sequences ending with the target. A sequence whose labels
select exactly the current agent set is executable in the global net; any
other sequence sends the search to the subsystem its labels select.

Recursion is keyed on agent sets. A set already on the recursion stack,
or one that already failed for this target, is not explored again, so the
search always terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .compose import (
    GlobalTransition,
    Subsystem,
    compose_nets,
    fused_transitions,
    project_transition,
)
from .mas import Amas, ModelError, _sorted, agents_sharing
from .net import MarkingGraph, NetError, marking_graph

HEURISTICS = ("agents", "short", "fifo")
DEFAULT_FRONTIER = 256
PRUNE_LIMIT = 4096


class LivenessError(RuntimeError):
    """A witness path failed to replay on the global net."""


@dataclass(frozen=True)
class MinimalPath:
    """A firing sequence whose markings before the last step are pairwise distinct."""

    steps: tuple
    labels: tuple
    markings: tuple

    def __len__(self):
        return len(self.steps)

    @property
    def label_set(self) -> frozenset:
        return frozenset(self.labels)


def _index(mg: MarkingGraph) -> tuple:
    """Integer view of ``mg``: marking ids in node order and per-id successor lists."""
    cached = mg.__dict__.get("_int_index")
    if cached is None:
        ids = {m: i for i, m in enumerate(mg.nodes)}
        adj = [[(t, lab, ids[m2]) for t, lab, m2 in mg.out[m]] for m in mg.nodes]
        cached = (ids, adj)
        object.__setattr__(mg, "_int_index", cached)
    return cached


def comp_min_paths(mg: MarkingGraph, target, prune: Callable | None = None) -> Iterator[MinimalPath]:
    """All minimal firing sequences from the initial marking ending with ``target``.

    Depth-first over the marking graph with an on-path visited set; arcs
    are tried in the graph's canonical order. A branch is entered only if
    some ``target`` occurrence is still reachable from it without touching
    the current path, which skips dead ends and changes no output.

    ``prune(prefix_labels, ahead_labels)`` may veto descending into a
    marking; ``ahead_labels`` are all labels still firable on the way to a
    target occurrence from there. Callers use it to skip branches whose
    paths they would discard anyway.
    """
    ids, adj = _index(mg)
    n = len(adj)
    back: list = [[] for _ in range(n)]
    is_source = [False] * n
    for i, succ in enumerate(adj):
        for t, _, j in succ:
            back[j].append(i)
            if t == target:
                is_source[i] = True
    # markings from which some target occurrence is reachable at all
    useful = [False] * n
    todo = [i for i in range(n) if is_source[i]]
    for i in todo:
        useful[i] = True
    while todo:
        i = todo.pop()
        for p in back[i]:
            if not useful[p]:
                useful[p] = True
                todo.append(p)
    root = ids[mg.initial]
    if not useful[root]:
        return
    ahead = _labels_ahead(adj, useful) if prune is not None else None
    succ_useful = [[(t, lab, j, t == target) for t, lab, j in adj[i]] if useful[i] else [] for i in range(n)]

    on_path = [False] * n

    def still_reaches(start: int) -> bool:
        seen = {start}
        frontier = [start]
        while frontier:
            i = frontier.pop()
            if is_source[i]:
                return True
            for _, _, j, _ in succ_useful[i]:
                if useful[j] and not on_path[j] and j not in seen:
                    seen.add(j)
                    frontier.append(j)
        return False

    nodes = mg.nodes
    path = [root]
    on_path[root] = True
    steps: list = []
    labels: list = []
    stack = [iter(succ_useful[root])]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path[path.pop()] = False
            if steps:
                steps.pop()
                labels.pop()
            continue
        t, lab, j, hit = nxt
        if hit:
            yield MinimalPath((*steps, t), (*labels, lab), tuple(nodes[i] for i in path) + (nodes[j],))
        if not useful[j] or on_path[j] or not still_reaches(j):
            continue
        if prune is not None and prune(frozenset(labels).union((lab,)), ahead[j]):
            continue
        path.append(j)
        on_path[j] = True
        steps.append(t)
        labels.append(lab)
        stack.append(iter(succ_useful[j]))


def _labels_ahead(adj: list, useful: list) -> list:
    """For each useful marking id, the labels of arcs reachable from it inside the useful part."""
    n = len(adj)
    ahead = [set() for _ in range(n)]
    preds: list = [[] for _ in range(n)]
    for i in range(n):
        if not useful[i]:
            continue
        for _, lab, j in adj[i]:
            ahead[i].add(lab)
            if useful[j]:
                preds[j].append(i)
    todo = [i for i in range(n) if useful[i]]
    while todo:
        i = todo.pop()
        for p in preds[i]:
            if not ahead[i] <= ahead[p]:
                ahead[p] |= ahead[i]
                todo.append(p)
    return [frozenset(a) for a in ahead]


def _sort_key(heuristic: str, cost: Callable | None):
    if heuristic == "agents":
        return lambda p: (cost(p), len(p), p.labels, p.steps)
    if heuristic == "short":
        return lambda p: (len(p), p.labels, p.steps)
    raise ValueError(f"unknown heuristic {heuristic!r}; expected one of {HEURISTICS}")


def select_path(paths: list, heuristic: str = "agents", cost: Callable | None = None) -> MinimalPath:
    """Remove and return the preferred path from ``paths``.

    ``agents`` prefers the path whose labels pull in the fewest agents not
    yet composed (``cost`` computes that number), then the shorter path,
    then the lexicographically smaller label sequence. ``short`` drops the
    agent criterion and ``fifo`` takes the first path.
    """
    if not paths:
        raise ValueError("cannot select from an empty path collection")
    if heuristic == "fifo" or len(paths) == 1:
        return paths.pop(0)
    if heuristic == "agents" and cost is None:
        raise ValueError("the 'agents' heuristic needs a cost function")
    key = _sort_key(heuristic, cost)
    best = min(range(len(paths)), key=lambda i: key(paths[i]))
    return paths.pop(best)


def _ordered(stream: Iterator[MinimalPath], heuristic: str, cost, frontier: int) -> Iterator[MinimalPath]:
    """Consume ``stream`` lazily, picking from a bounded window of candidates."""
    if heuristic == "fifo":
        yield from stream
        return
    _sort_key(heuristic, cost)  # validate early
    buf: list = []
    exhausted = False
    while True:
        while not exhausted and len(buf) < frontier:
            p = next(stream, None)
            if p is None:
                exhausted = True
            else:
                buf.append(p)
        if not buf:
            return
        yield select_path(buf, heuristic, cost)


@dataclass(frozen=True)
class Visit:
    """One subsystem composed during a check."""

    agents: tuple
    labels: tuple
    markings: int
    arcs: int


@dataclass(frozen=True)
class LivenessResult:
    transition: GlobalTransition
    live: bool
    path: MinimalPath | None
    visits: tuple = ()
    heuristic: str = "agents"

    def __iter__(self):
        return iter((self.live, self.path))

    @property
    def max_agents(self) -> int:
        return max((len(v.agents) for v in self.visits), default=0)


class SubsystemCache:
    """Memoizes composed subsystem nets and their marking graphs by agent set.

    Holds only pure derived data, so one cache can serve many targets.
    """

    def __init__(self, amas: Amas, agent_nets: Sequence):
        self.amas = amas
        self.agent_nets = agent_nets
        self._store: dict = {}
        self._owners: dict = {}
        self._selected: dict = {}

    def owners(self, label) -> frozenset:
        if label not in self._owners:
            self._owners[label] = agents_sharing(self.amas, label)
        return self._owners[label]

    def select(self, labels: frozenset) -> frozenset:
        """Agents owning some label in ``labels``."""
        if labels not in self._selected:
            self._selected[labels] = frozenset().union(*(self.owners(a) for a in labels))
        return self._selected[labels]

    def get(self, agents: frozenset) -> tuple:
        if agents not in self._store:
            net = compose_nets({i: self.agent_nets[i] for i in agents})
            self._store[agents] = (net, marking_graph(net))
        return self._store[agents]


def _replay_global(amas: Amas, agent_nets: Sequence, path: MinimalPath) -> None:
    marking = frozenset().union(*(n.initial for n in agent_nets))
    for t in path.steps:
        if t.agents != agents_sharing(amas, t.label):
            raise LivenessError(f"{t} is not a transition of the global net")
        pre = frozenset().union(*(agent_nets[i].pre[c] for i, c in t.components))
        post = frozenset().union(*(agent_nets[i].post[c] for i, c in t.components))
        if not pre <= marking:
            raise LivenessError(f"{t} is not enabled during global replay")
        if (post - pre) & marking:
            raise LivenessError(f"{t} breaks 1-safety during global replay")
        marking = (marking - pre) | post


def check_1liveness(
    target: GlobalTransition,
    amas: Amas,
    agent_nets: Sequence,
    labels: Iterable | None = None,
    heuristic: str = "agents",
    frontier: int = DEFAULT_FRONTIER,
    cache: SubsystemCache | None = None,
    prune: bool = True,
) -> LivenessResult:
    """Decide whether ``target`` (a transition of the global net) is 1-live.

    ``labels`` seeds the first subsystem and defaults to ``{target.label}``.
    A positive answer comes with a minimal path that has been replayed on
    the global net. ``prune`` skips path branches that can only lead to
    agent sets already settled; it never changes the verdict.
    """
    labels = frozenset(labels) if labels is not None else frozenset({target.label})
    if target.label not in labels:
        raise ModelError(f"label {target.label!r} of the target must be in the initial label set")
    if target.agents != agents_sharing(amas, target.label):
        raise ModelError(f"{target} is not a transition of the global net")
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}; expected one of {HEURISTICS}")
    cache = cache or SubsystemCache(amas, agent_nets)
    on_stack: set = set()
    failed: set = set()
    visits: list = []

    def explore(lab: frozenset) -> MinimalPath | None:
        agents = cache.select(lab)
        if agents in on_stack or agents in failed:
            return None
        net, mg = cache.get(agents)
        visits.append(Visit(tuple(sorted(agents)), tuple(_sorted(lab)), len(mg.nodes), len(mg.arcs)))
        sub = Subsystem(agents, net, lab)
        local = project_transition(target, sub, amas)
        if local is None:  # unreachable: every owner of the target label is selected
            raise NetError(f"{target} has no copy in subsystem {sorted(agents)}")
        on_stack.add(agents)

        def cost(p: MinimalPath) -> int:
            return len(cache.select(p.label_set) - agents)

        settled: set = set()

        def hopeless(prefix: frozenset, ahead: frozenset) -> bool:
            # every agent set a completion could select is already settled
            if not failed and len(on_stack) == 1:
                return False
            key = (prefix, ahead)
            if key in settled:
                return True
            reach = {cache.select(prefix | {target.label})}
            for a in ahead - prefix:
                owners = cache.owners(a)
                reach |= {r | owners for r in reach}
                if len(reach) > PRUNE_LIMIT:
                    return False
            if all(r != agents and (r in failed or r in on_stack) for r in reach):
                settled.add(key)
                return True
            return False

        paths = comp_min_paths(mg, local, hopeless if prune else None)
        for p in _ordered(paths, heuristic, cost, frontier):
            if cache.select(p.label_set) == agents:
                return p
            found = explore(p.label_set)
            if found is not None:
                return found
        on_stack.discard(agents)
        failed.add(agents)
        return None

    path = explore(labels)
    if path is not None:
        _replay_global(amas, agent_nets, path)
    return LivenessResult(target, path is not None, path, tuple(visits), heuristic)


def global_transitions(amas: Amas, agent_nets: Sequence, labels: Iterable | None = None) -> Iterator[GlobalTransition]:
    """Fused transitions of the global net, label by label, without building it."""
    for a in _sorted(labels if labels is not None else amas.events):
        yield from fused_transitions(agent_nets, a)


def check_all(
    amas: Amas,
    agent_nets: Sequence,
    labels: Iterable | None = None,
    heuristic: str = "agents",
    frontier: int = DEFAULT_FRONTIER,
) -> list[LivenessResult]:
    cache = SubsystemCache(amas, agent_nets)
    return [
        check_1liveness(t, amas, agent_nets, None, heuristic, frontier, cache)
        for t in global_transitions(amas, agent_nets, labels)
    ]


def find_dead_transitions(
    amas: Amas,
    agent_nets: Sequence,
    heuristic: str = "agents",
    labels: Iterable | None = None,
) -> frozenset:
    """Fused transitions that are enabled at no reachable global marking."""
    return frozenset(r.transition for r in check_all(amas, agent_nets, labels, heuristic) if not r.live)
