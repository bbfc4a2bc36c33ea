import os
import random

import pytest

from wl_ladder.cfi import cfi_pair, complete_graph

SEED = int(os.environ.get("WL_LADDER_SEED", "20260316"))

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def cfi_pairs():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = cfi_pair(complete_graph(n))
        return cache[n]

    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
