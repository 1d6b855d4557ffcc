from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from conftest import cycle, dense_random, gnp
from krfactor.generators import GenSpec, generate
from krfactor.graph import Graph, is_factor, mask_of
from krfactor.oracle import (
    OracleInconclusive,
    enumerate_kr,
    find_sparse_set_exact,
    maximum_independent_set,
    oracle_kr_factor,
    oracle_max_tiling,
    sparsest_k_set,
)


def brute_max_tiling(g: Graph, r: int) -> int:
    cliques = [c for c in itertools.combinations(range(g.n), r) if g.is_clique(c)]
    best = 0

    def rec(i: int, used: int, size: int) -> None:
        nonlocal best
        best = max(best, size)
        if size + (g.n - bin(used).count("1")) // r <= best:
            return
        for j in range(i, len(cliques)):
            m = mask_of(cliques[j])
            if not m & used:
                rec(j + 1, used | m, size + 1)

    rec(0, 0, 0)
    return best


def test_enumerate_examples(k333):
    assert len(enumerate_kr(Graph.complete(4), 3)) == 4
    assert enumerate_kr(cycle(5), 3) == []
    tri = enumerate_kr(k333, 3)
    assert len(tri) == 27 and tri == sorted(tri)


def test_enumerate_matches_combinations():
    g = gnp(10, 0.6, 11)
    expect = [c for c in itertools.combinations(range(10), 4) if g.is_clique(c)]
    assert enumerate_kr(g, 4) == expect


def test_factor_examples():
    f = oracle_kr_factor(Graph.complete(6), 3)
    assert f is not None and len(f) == 2 and is_factor(Graph.complete(6), f, 3)
    assert oracle_kr_factor(generate(GenSpec("extremal", 9, 3)).graph, 3) is None
    assert oracle_kr_factor(Graph.complete(7), 3) is None


def test_hajnal_szemeredi_on_n9():
    for seed in range(30):
        g = dense_random(9, 3, seed)
        assert g.min_degree() >= 6
        f = oracle_kr_factor(g, 3)
        assert f is not None and is_factor(g, f, 3)


def test_max_tiling_examples():
    assert oracle_max_tiling(cycle(5), 3) == []
    assert len(oracle_max_tiling(Graph.complete(7), 3)) == 2
    g = gnp(10, 0.5, 3)
    assert len(oracle_max_tiling(g, 3)) == brute_max_tiling(g, 3)


def test_max_tiling_random_agreement():
    for seed in range(20):
        g = gnp(9, 0.55, 100 + seed)
        assert len(oracle_max_tiling(g, 3)) == brute_max_tiling(g, 3)


def test_budget_exhaustion_raises():
    with pytest.raises(OracleInconclusive):
        oracle_kr_factor(_hard(), 3, budget=5)


def _hard() -> Graph:
    # disjoint K_5's: no triangle factor, and the search must look around
    edges = []
    for b in range(0, 30, 5):
        edges += list(itertools.combinations(range(b, b + 5), 2))
    return Graph.from_edges(30, edges)


def test_sparse_set_examples():
    inst = generate(GenSpec("extremal", 9, 3))
    got = find_sparse_set_exact(inst.graph, 3, Fraction(2, 100))
    assert got is not None and got <= set(inst.meta["hollow_set"])
    assert find_sparse_set_exact(Graph.complete(9), 3, Fraction(2, 100)) is None


def test_sparsest_matches_brute_force():
    for seed in range(10):
        g = gnp(11, 0.5, seed)
        e, U = sparsest_k_set(g, 4)
        assert len(U) == 4 and g.induced_edge_count(U) == e
        assert e == min(g.induced_edge_count(c) for c in itertools.combinations(range(11), 4))


def test_maximum_independent_set_brute():
    rng = random.Random(4)
    for _ in range(10):
        g = gnp(10, rng.uniform(0.2, 0.8), rng.randrange(10**6))
        mis = maximum_independent_set(g)
        assert g.is_independent(mis)
        bigger = itertools.combinations(range(10), len(mis) + 1)
        assert not any(g.is_independent(c) for c in bigger)
