from __future__ import annotations

import itertools

from hypothesis import given, settings, strategies as st

from krfactor.graph import Graph, Partition, dump_graph, load_graph, verify_tiling
from krfactor.matching import is_valid_tutte_set, max_matching, perfect_matching_or_certificate, TutteSet
from krfactor.oracle import iter_cliques, oracle_max_tiling
from krfactor.slack import assign_transfers, partition_slack, slack

FAST = settings(max_examples=60, deadline=None)


@st.composite
def graphs(draw, min_n=1, max_n=10):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])


@st.composite
def partitioned(draw, r=3):
    q = draw(st.integers(1, 4))
    n = r * q
    k = draw(st.integers(1, 3))
    labels = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    parts = [[v for v in range(n) if labels[v] == i] for i in range(k)]
    return Partition.of(parts, r, allow_empty=True), n


@FAST
@given(partitioned())
def test_slack_of_partition_sums_to_zero(pn):
    p, _ = pn
    assert sum(partition_slack(p)) == 0


@FAST
@given(partitioned(), st.data())
def test_slack_bounds(pn, data):
    p, n = pn
    order = data.draw(st.permutations(range(n)))
    m = data.draw(st.integers(0, n // 3))
    T = [tuple(order[3 * i : 3 * i + 3]) for i in range(m)]
    t = slack(p, T)
    assert sum(t) == 0
    assert sum(x for x in t if x > 0) <= 2 * len(T)


@FAST
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=6))
def test_transfer_matrix_sums(xs):
    t = sorted(xs + [-sum(xs)], reverse=True)
    tm = assign_transfers(t)
    out = [0] * len(t)
    inn = [0] * len(t)
    for i, k, x in tm.nonzero():
        assert x > 0 and t[i] > 0 and t[k] < 0
        out[i] += x
        inn[k] += x
    for i, x in enumerate(t):
        assert out[i] == max(x, 0) and inn[i] == max(-x, 0)


@FAST
@given(graphs())
def test_edge_list_round_trip(g):
    h = load_graph(dump_graph(g))
    assert h.n == g.n and sorted(h.edges()) == sorted(g.edges())
    assert h.digest() == g.digest()


@FAST
@given(graphs(min_n=3), st.integers(2, 3))
def test_valid_tiling_is_disjoint(g, r):
    cands = list(iter_cliques(g, r, g.all_mask))
    T = cands[:4]
    if verify_tiling(g, T, r):
        assert len({v for c in T for v in c}) == r * len(T)


@FAST
@given(graphs(min_n=3, max_n=9), st.data())
def test_max_tiling_monotone_in_edges(g, data):
    extra = [e for e in itertools.combinations(range(g.n), 2) if not g.has_edge(*e)]
    add = data.draw(st.lists(st.sampled_from(extra), max_size=3)) if extra else []
    h = Graph.from_edges(g.n, g.edges() + add)
    assert len(oracle_max_tiling(h, 3)) >= len(oracle_max_tiling(g, 3))


@FAST
@given(graphs(max_n=10))
def test_matching_is_certified(g):
    got = perfect_matching_or_certificate(g)
    if isinstance(got, TutteSet):
        assert is_valid_tutte_set(g, got)
    else:
        assert verify_tiling(g, got.edges, 2) and 2 * len(got.edges) == g.n
    assert len(max_matching(g).edges) * 2 <= g.n
