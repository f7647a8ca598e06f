"""Seeded random AMAS instances for testing."""

from __future__ import annotations

import random

from .mas import Amas, Lts


def label_pool(n: int) -> list[str]:
    return [chr(ord("a") + i) for i in range(n)] if n <= 26 else [f"e{i}" for i in range(n)]


def random_amas(
    seed: int,
    agents: int = 3,
    states: int = 4,
    labels: int = 5,
    density: float = 0.35,
) -> Amas:
    """A random AMAS with at most ``agents`` agents, ``states`` states each and ``labels`` labels.

    The same arguments always produce the same system. Every agent's
    alphabet is exactly the set of labels on its arcs.
    """
    rng = random.Random(seed)
    pool = label_pool(labels)
    n_agents = rng.randint(1, agents)
    lts = []
    for _ in range(n_agents):
        k = rng.randint(1, states)
        names = [f"s{j}" for j in range(k)]
        alphabet = rng.sample(pool, rng.randint(1, len(pool)))
        arcs = []
        for s in names:
            for e in alphabet:
                if rng.random() < density:
                    arcs.append((s, e, rng.choice(names)))
        lts.append(Lts.from_arcs(arcs, names[0], states=names))
    return Amas.from_agents(lts, [f"A{i}" for i in range(n_agents)])
