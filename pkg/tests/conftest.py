from __future__ import annotations

import itertools
import random

import pytest

from krfactor.graph import Graph


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def disjoint_cliques(*sizes: int) -> Graph:
    edges, off = [], 0
    for sz in sizes:
        edges += list(itertools.combinations(range(off, off + sz), 2))
        off += sz
    return Graph.from_edges(off, edges)


def gnp(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph.from_edges(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])


def dense_random(n: int, r: int, seed: int, slack: int = 0) -> Graph:
    """Random graph with min degree at least ceil((1 - 1/r) n) - slack."""
    rng = random.Random(seed)
    floor = -(-(r - 1) * n // r) - slack
    deg = [n - 1] * n
    pairs = list(itertools.combinations(range(n), 2))
    rng.shuffle(pairs)
    p = rng.uniform(0.3, 1.0)
    kept = []
    for u, v in pairs:
        if deg[u] > floor and deg[v] > floor and rng.random() < p:
            deg[u] -= 1
            deg[v] -= 1
        else:
            kept.append((u, v))
    return Graph.from_edges(n, kept)


@pytest.fixture
def k333() -> Graph:
    return Graph.from_edges(9, [(u, v) for u, v in itertools.combinations(range(9), 2) if u // 3 != v // 3])


# acceptance lines, printed once at the end of the run

ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
