from functools import lru_cache

import pytest

from amasnet import Lts, load_model
from amasnet.generate import random_amas

CORPUS_SEEDS = range(200)
CORPUS_SHAPE = dict(agents=4, states=5, labels=6)


@lru_cache(maxsize=None)
def corpus():
    return tuple(random_amas(seed, **CORPUS_SHAPE) for seed in CORPUS_SEEDS)


@lru_cache(maxsize=None)
def model(name):
    return load_model(name)


def chain():
    """s0 --a--> s1"""
    return Lts.from_arcs([("s0", "a", "s1")], "s0")


@pytest.fixture
def tgc():
    return model("tgc")


@pytest.fixture
def dead_zero():
    return model("dead_zero")


@pytest.fixture
def false_path():
    return model("false_path")


@pytest.fixture
def fewest_agents():
    return model("fewest_agents")


ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """Store one pass/fail line per acceptance criterion for the terminal summary."""

    def put(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return put


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
