import random

import pytest

from mwmsr.graph import random_digraph, random_undirected

ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> str:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def seeded_graphs(count, seed, n_range=(2, 7), p_range=(0.2, 0.9)):
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(*n_range)
        p = rng.uniform(*p_range)
        out.append(random_digraph(n, p, rng) if k % 2 == 0 else random_undirected(n, p, rng))
    return out


@pytest.fixture
def rng():
    return random.Random(1234)
