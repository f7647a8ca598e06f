import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amasnet import (
    Amas,
    Lts,
    ModelError,
    agent_to_net,
    check_essp,
    check_one_safe,
    check_ssp,
    compose_iis,
    enumerate_regions,
    is_region,
    iso_check,
    marking_graph,
    minimal_regions,
    reachable_prune,
    synthesize,
)
from amasnet.generate import random_amas
from amasnet.synthesis import AgentTransition, SynthesisError

from conftest import chain


def subsets(states):
    states = sorted(states)
    for k in range(len(states) + 1):
        for c in itertools.combinations(states, k):
            yield frozenset(c)


def region_by_definition(lts, r):
    for e in lts.events:
        arcs = [(s, t) for (s, x), t in lts.trans.items() if x == e]
        enters = all(s not in r and t in r for s, t in arcs)
        leaves = all(s in r and t not in r for s, t in arcs)
        stays = all((s in r) == (t in r) for s, t in arcs)
        if not (enters or leaves or stays):
            return False
    return True


def middle(dead_zero):
    return reachable_prune(dead_zero.agents[1])


def test_is_region_examples(dead_zero):
    m = middle(dead_zero)
    assert is_region(m, set()) and is_region(m, m.states)
    assert is_region(chain(), {"s0"})
    cycle = Lts.from_arcs([("s0", "a", "s1"), ("s1", "a", "s0")], "s0")
    assert not is_region(cycle, {"s0"})


def test_enumerate_regions_examples(dead_zero):
    m = middle(dead_zero)
    assert enumerate_regions(m) == {frozenset(), m.states}
    single = Lts.from_arcs([], "s")
    assert enumerate_regions(single) == {frozenset(), frozenset({"s"})}
    c = chain()
    expected = {r for r in subsets(c.states) if region_by_definition(c, r)}
    assert len(expected) == 4
    assert enumerate_regions(c) == expected


def test_region_bound():
    big = Lts.from_arcs([(f"s{i}", "a", f"s{i + 1}") for i in range(5)], "s0")
    with pytest.raises(ModelError, match="agent_to_net"):
        enumerate_regions(big, bound=4)


def test_minimal_regions():
    a, ab, full = frozenset("a"), frozenset("ab"), frozenset("abc")
    assert minimal_regions({frozenset(), a, ab, full}) == {a}
    assert minimal_regions({frozenset(), full}) == {full}
    assert minimal_regions(enumerate_regions(chain())) == {frozenset({"s0"}), frozenset({"s1"})}


def test_ssp_essp(dead_zero):
    m = middle(dead_zero)
    trivial = enumerate_regions(m)
    assert not check_ssp(m, trivial)
    assert check_ssp(Lts.from_arcs([], "s"), [])
    c = chain()
    assert check_ssp(c, enumerate_regions(c))

    verdict = check_essp(m, trivial)
    assert not verdict
    s, e = verdict.witness
    assert e not in m.successors(s)

    loops = Lts.from_arcs([("s0", "a", "s0")], "s0")
    assert check_essp(loops, [])
    assert check_essp(c, [frozenset({"s0"})])
    assert not check_essp(c, [])


def test_synthesize_chain():
    n = synthesize(chain())
    assert n.places == {"{s0}", "{s1}"}
    assert n.initial == {"{s0}"}
    assert n.pre["a"] == {"{s0}"} and n.post["a"] == {"{s1}"}


def test_synthesize_trivial_regions_fails(dead_zero):
    with pytest.raises(SynthesisError, match="SSP") as err:
        synthesize(middle(dead_zero))
    assert err.value.kind == "SSP"
    a, b = err.value.witness
    assert a != b


def test_synthesize_diamond():
    one = Lts.from_arcs([("s0", "a", "s1")], "s0")
    two = Lts.from_arcs([("s0", "b", "s1")], "s0")
    diamond = compose_iis(Amas.from_agents([one, two], ["A", "B"]))
    n = synthesize(diamond)
    assert len(n.initial) == 2
    assert not (n.pre["a"] | n.post["a"]) & (n.pre["b"] | n.post["b"])
    assert iso_check(marking_graph(n).to_lts(), diamond)


def test_synthesize_label_looping_everywhere():
    # 'a' loops at both states, so only the full state set can carry its preset
    lts = Lts.from_arcs([("s0", "a", "s0"), ("s0", "b", "s1"), ("s1", "a", "s1")], "s0")
    n = synthesize(lts)
    assert n.pre["a"] == n.post["a"] == {"{s0,s1}"}
    assert iso_check(marking_graph(n).to_lts(), lts)


def test_agent_to_net(tgc):
    for i, agent in enumerate(tgc.agents):
        n = agent_to_net(agent, i)
        assert n.places == agent.states
        assert len(n.transitions) == len(agent.trans)
        assert all(isinstance(t, AgentTransition) and t.agent == i for t in n.transitions)
    single = agent_to_net(Lts.from_arcs([], "s"))
    assert single.initial == {"s"} and single.transitions == ()
    split = agent_to_net(Lts.from_arcs([("s0", "x", "s1"), ("s1", "x", "s0")], "s0"))
    assert [split.label[t] for t in split.transitions] == ["x", "x"]


@st.composite
def small_lts(draw):
    n = draw(st.integers(1, 5))
    states = [f"q{i}" for i in range(n)]
    arcs = [(s, e, draw(st.sampled_from(states))) for s in states for e in "abc" if draw(st.booleans())]
    return Lts.from_arcs(arcs, "q0", states=states)


@settings(max_examples=150, deadline=None)
@given(small_lts())
def test_region_properties(lts):
    regions = enumerate_regions(lts)
    assert regions == {r for r in subsets(lts.states) if region_by_definition(lts, r)}
    assert frozenset() in regions and lts.states in regions
    for r in regions:
        assert lts.states - r in regions


@settings(max_examples=150, deadline=None)
@given(small_lts())
def test_synthesis_succeeds_exactly_on_separable_systems(lts):
    lts = reachable_prune(lts)
    mins = minimal_regions(enumerate_regions(lts))
    separable = bool(check_ssp(lts, mins)) and bool(check_essp(lts, mins))
    try:
        n = synthesize(lts)
    except SynthesisError as err:
        assert not separable and err.kind in ("SSP", "ESSP")
        return
    assert separable
    assert check_one_safe(n)
    assert iso_check(marking_graph(n).to_lts(), lts)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_agent_net_round_trip(seed):
    for i, agent in enumerate(random_amas(seed, agents=2, states=5, labels=4).agents):
        n = agent_to_net(agent, i)
        mg = marking_graph(n)
        assert all(len(m) == 1 for m in mg.nodes)
        assert iso_check(mg.to_lts(), reachable_prune(agent))
