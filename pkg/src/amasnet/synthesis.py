"""Region-based synthesis of 1-safe nets, and the states-as-places agent translation."""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .mas import Lts, ModelError, _sorted, reachable_prune
from .net import Check, LabelledNet

DEFAULT_BOUND = 20

Region = frozenset


class AgentTransition(NamedTuple):
    """One arc of agent ``agent`` turned into a net transition."""

    agent: int
    source: str
    label: str
    target: str

    def __str__(self):
        return f"{self.agent}:{self.source}->{self.target}"


class SynthesisError(ModelError):
    """Exact synthesis is impossible; ``witness`` shows why."""

    def __init__(self, kind: str, witness, message: str):
        self.kind = kind
        self.witness = witness
        super().__init__(message)


def _arcs_by_label(lts: Lts) -> dict:
    by: dict = {e: [] for e in lts.events}
    for (s, e), t in lts.trans.items():
        by[e].append((s, t))
    return by


def _crossing(arcs, region) -> set:
    """Kinds of border crossing among ``arcs``: 'enter', 'leave', 'stay'."""
    kinds = set()
    for s, t in arcs:
        a, b = s in region, t in region
        kinds.add("enter" if b and not a else "leave" if a and not b else "stay")
    return kinds


def is_region(lts: Lts, subset: Iterable) -> bool:
    """Every label's arcs uniformly enter, uniformly leave, or all stay on one side."""
    r = frozenset(subset)
    if not r <= lts.states:
        raise ModelError("subset is not a set of states")
    return all(len(_crossing(arcs, r)) <= 1 for arcs in _arcs_by_label(lts).values())


def enumerate_regions(lts: Lts, bound: int = DEFAULT_BOUND) -> set:
    """All regions, by exhaustive search over subsets (bitmask encoded)."""
    states = lts.sorted_states()
    n = len(states)
    if n > bound:
        raise ModelError(
            f"{n} states exceed the region enumeration bound {bound}; "
            "use the states-as-places translation (agent_to_net) instead"
        )
    bit = {s: 1 << i for i, s in enumerate(states)}
    groups = [[(bit[s], bit[t]) for s, t in arcs] for arcs in _arcs_by_label(lts).values()]
    found = set()
    for mask in range(1 << n):
        ok = True
        for arcs in groups:
            kind = None
            for bs, bt in arcs:
                a, b = bool(mask & bs), bool(mask & bt)
                k = 0 if a == b else (1 if b else 2)
                if kind is None:
                    kind = k
                elif kind != k:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.add(frozenset(s for s in states if mask & bit[s]))
    return found


def minimal_regions(regions: Iterable[Region]) -> set:
    """Non-empty regions containing no smaller non-empty region."""
    nonempty = [frozenset(r) for r in regions if r]
    return {r for r in nonempty if not any(q < r for q in nonempty)}


def check_ssp(lts: Lts, regions: Iterable[Region]) -> Check:
    """State separation: every pair of distinct states is told apart by some region."""
    regions = list(regions)
    states = lts.sorted_states()
    # states with identical membership vectors are not separated
    sig: dict = {}
    for s in states:
        key = tuple(s in r for r in regions)
        if key in sig:
            return Check(False, (sig[key], s))
        sig[key] = s
    return Check(True)


def check_essp(lts: Lts, regions: Iterable[Region]) -> Check:
    """Event/state separation: a label disabled at s leaves some region not containing s."""
    regions = list(regions)
    by = _arcs_by_label(lts)
    leaving = {e: [r for r in regions if _crossing(by[e], r) <= {"leave"}] for e in by}
    for s in lts.sorted_states():
        out = lts.successors(s)
        for e in _sorted(lts.events):
            if e in out:
                continue
            if not any(s not in r for r in leaving[e]):
                return Check(False, (s, e))
    return Check(True)


def region_name(r: Region) -> str:
    return "{" + ",".join(str(s) for s in _sorted(r)) + "}"


def _flow_role(arcs, r: Region) -> tuple[bool, bool]:
    """Whether region ``r`` belongs to the preset and to the postset of the label with ``arcs``."""
    kinds = _crossing(arcs, r)
    if kinds == {"leave"}:
        return True, False
    if kinds == {"enter"}:
        return False, True
    if kinds == {"stay"} and all(s in r and t in r for s, t in arcs):
        return True, True
    return False, False


def synthesize(lts: Lts, bound: int = DEFAULT_BOUND) -> LabelledNet:
    """Exact 1-safe synthesis: one transition per label, one place per minimal region.

    Works on the reachable part of ``lts``. Labels without arcs produce no
    transition. A label whose arcs cross no minimal region in one direction
    borrows the smallest larger region that gives it a preset and a
    postset. Raises :class:`SynthesisError` carrying a separation witness
    when the behaviour cannot be captured without splitting labels.
    """
    lts = reachable_prune(lts)
    places = minimal_regions(enumerate_regions(lts, bound))
    ordered = sorted(places, key=lambda r: (len(r), _sorted(r)))
    ssp = check_ssp(lts, ordered)
    if not ssp:
        a, b = ssp.witness
        raise SynthesisError("SSP", ssp.witness, f"SSP is not satisfied: states {a!r} and {b!r} are not separated")
    essp = check_essp(lts, ordered)
    if not essp:
        s, e = essp.witness
        raise SynthesisError("ESSP", essp.witness, f"ESSP is not satisfied: {e!r} is disabled at {s!r} but not separated")

    # A label may cross no minimal region in some direction. Any region is a
    # sound extra place, and the full state set always serves as a self-loop.
    regions = enumerate_regions(lts, bound)
    spare = sorted((r for r in regions if r and r not in places), key=lambda r: (len(r), _sorted(r)))
    by_label = {e: arcs for e, arcs in _arcs_by_label(lts).items() if arcs}
    for arcs in by_label.values():
        roles = [_flow_role(arcs, r) for r in ordered]
        has_pre, has_post = any(x for x, _ in roles), any(y for _, y in roles)
        for r in spare:
            if has_pre and has_post:
                break
            in_pre, in_post = _flow_role(arcs, r)
            if (in_pre and not has_pre) or (in_post and not has_post):
                ordered.append(r)
                has_pre, has_post = has_pre or in_pre, has_post or in_post

    names = {r: region_name(r) for r in ordered}
    pre: dict = {}
    post: dict = {}
    for e, arcs in by_label.items():
        roles = {r: _flow_role(arcs, r) for r in ordered}
        pre[e] = {names[r] for r, (x, _) in roles.items() if x}
        post[e] = {names[r] for r, (_, y) in roles.items() if y}
    initial = {names[r] for r in ordered if lts.initial in r}
    return LabelledNet(frozenset(names.values()), pre, post, initial, {e: e for e in pre})


def agent_to_net(agent: Lts, index: int = 0) -> LabelledNet:
    """States become places and every arc becomes its own transition.

    The labelling is therefore non-injective whenever a label occurs on
    several arcs. Transition identifiers are :class:`AgentTransition`.
    """
    pre, post, label = {}, {}, {}
    for s, e, t in agent.arcs():
        tid = AgentTransition(index, s, e, t)
        pre[tid] = {s}
        post[tid] = {t}
        label[tid] = e
    return LabelledNet(agent.states, pre, post, {agent.initial}, label, agent.events)
