from __future__ import annotations

import copy
import itertools
import json

import pytest

from conftest import disjoint_cliques
from krfactor.certificate import (
    CertificateSchemaError,
    Trace,
    component_pair,
    divisibility,
    find_component_pair,
    found,
    independent_set,
    no_factor,
    oracle_exhausted,
    slack_infeasible,
    type_counts_feasible,
    verify_certificate,
)
from krfactor.generators import GenSpec, generate
from krfactor.graph import Graph, Partition
from krfactor.slack import lemma_bound


def two_odd_cliques() -> tuple[Graph, list[int], list[int], list[int]]:
    A = list(range(4))
    K3, K5 = [4, 5, 6], [7, 8, 9, 10, 11]
    edges = [(a, b) for a in A for b in K3 + K5]
    edges += [e for S in (K3, K5) for e in itertools.combinations(S, 2)]
    return Graph.from_edges(12, edges), A, K3, K5


def test_factor_found_round_trip():
    g = Graph.complete(6)
    cert = found(g, 3, [(0, 1, 2), (3, 4, 5)], Trace())
    doc = json.loads(cert.dumps())
    assert verify_certificate(g, doc)


def test_overlapping_factor_rejected():
    g = Graph.complete(6)
    doc = found(g, 3, [(0, 1, 2), (3, 4, 5)], Trace()).to_json()
    doc["factor"] = [[0, 1, 2], [2, 3, 4]]
    assert not verify_certificate(g, doc)


def test_found_refuses_invalid_factor():
    with pytest.raises(AssertionError):
        found(Graph.complete(6), 3, [(0, 1, 2)], Trace())


def test_independent_set_with_edge_rejected():
    inst = generate(GenSpec("extremal", 9, 3))
    g, hollow = inst.graph, inst.meta["hollow_set"]
    good = no_factor(g, 3, independent_set(hollow), Trace())
    assert verify_certificate(g, good)
    bad = good.to_json()
    outsider = next(v for v in range(9) if v not in hollow)
    bad["evidence"]["set"] = hollow[:-1] + [outsider]
    assert not verify_certificate(g, bad)
    small = good.to_json()
    small["evidence"]["set"] = hollow[:3]
    assert not verify_certificate(g, small)


def test_divisibility():
    g = Graph.complete(10)
    assert verify_certificate(g, no_factor(g, 3, divisibility(10, 3), Trace()))
    g6 = Graph.complete(6)
    assert not verify_certificate(g6, no_factor(g6, 3, divisibility(6, 3), Trace()))


def test_slack_infeasible_evidence():
    inst = generate(GenSpec("extremal", 9, 3))
    g, hollow = inst.graph, inst.meta["hollow_set"]
    part = Partition.of([hollow, [v for v in range(9) if v not in hollow]], 3)
    ev = slack_infeasible(part, [0, 1], 2)
    assert ev["bound"] == lemma_bound(2, 3) == 216
    cert = no_factor(g, 3, ev, Trace())
    assert verify_certificate(g, cert)
    wrong = copy.deepcopy(cert.to_json())
    wrong["evidence"]["bound"] = 215
    assert not verify_certificate(g, wrong)
    # the same partition on a graph that has a factor must not verify
    k9 = Graph.complete(9)
    doc = cert.to_json()
    doc["graph_digest"] = k9.digest()
    assert not verify_certificate(k9, doc)


def test_component_pair_evidence():
    g, A, K3, K5 = two_odd_cliques()
    ev = find_component_pair(g, 3, [A], K3 + K5)
    assert ev is not None and ev["form"] == "component-pair"
    assert verify_certificate(g, no_factor(g, 3, ev, Trace()))
    # joining the two cliques by an edge breaks the claim
    h = Graph.from_edges(12, g.edges() + [(6, 7)])
    doc = no_factor(h, 3, component_pair([A, K3, K5], (1, 2)), Trace()).to_json()
    assert not verify_certificate(h, doc)


def test_type_counts_feasible():
    assert type_counts_feasible([(1, 2)], (3, 6))
    assert not type_counts_feasible([(1, 2)], (3, 5))
    assert type_counts_feasible([(1, 1, 1), (1, 0, 2)], (2, 1, 3))
    assert not type_counts_feasible([(1, 2, 0), (1, 0, 2)], (4, 3, 5))


def test_tutte_set_needs_r2():
    g = disjoint_cliques(3, 3)
    ev = {"kind": "TutteParity", "form": "tutte-set", "S": [], "odd_components": [[0, 1, 2], [3, 4, 5]]}
    assert verify_certificate(g, no_factor(g, 2, ev, Trace()))
    assert not verify_certificate(g, no_factor(g, 3, ev, Trace()))


def test_oracle_exhausted():
    g = disjoint_cliques(3, 3)
    assert not verify_certificate(g, no_factor(g, 3, oracle_exhausted(), Trace()))
    g2 = disjoint_cliques(4, 2)
    assert verify_certificate(g2, no_factor(g2, 3, oracle_exhausted(), Trace()))


def test_schema_errors():
    g = Graph.complete(3)
    with pytest.raises(CertificateSchemaError):
        verify_certificate(g, {"verdict": "FactorFound"})
    doc = found(g, 3, [(0, 1, 2)], Trace()).to_json()
    doc["verdict"] = "Maybe"
    with pytest.raises(CertificateSchemaError):
        verify_certificate(g, doc)
    doc = found(g, 3, [(0, 1, 2)], Trace()).to_json()
    doc["factor"] = [["a", 1, 2]]
    with pytest.raises(CertificateSchemaError):
        verify_certificate(g, doc)


def test_inconclusive_and_digest_mismatch():
    g = Graph.complete(3)
    doc = found(g, 3, [(0, 1, 2)], Trace()).to_json()
    doc["verdict"] = "Inconclusive"
    doc["factor"] = None
    assert not verify_certificate(g, doc)
    doc = found(g, 3, [(0, 1, 2)], Trace()).to_json()
    doc["graph_digest"] = "0" * 64
    assert not verify_certificate(g, doc)


def test_oracle_exhausted_needs_divisibility():
    # when r does not divide n the claim must come as Divisibility evidence
    g = Graph.complete(7)
    assert not verify_certificate(g, no_factor(g, 3, oracle_exhausted(), Trace()))
    assert verify_certificate(g, no_factor(g, 3, divisibility(7, 3), Trace()))
