"""End-to-end acceptance checks; each test records one PASS/FAIL line."""

from __future__ import annotations

import copy
import itertools
import math
import random
import time

import pytest

from conftest import gnp, record
from krfactor.absorbing import solve_nonextremal
from krfactor.certificate import CertificateSchemaError, verify_certificate
from krfactor.colorcode import (
    build_hash_family,
    enumerate_types,
    exhaustive_pattern_tiling,
    find_tiling_with_pattern,
    pattern_conforms,
)
from krfactor.extremal import peel_sparse_sets
from krfactor.generators import GenerationError, GenSpec, generate
from krfactor.graph import Graph, Partition, verify_tiling
from krfactor.matching import TutteSet, is_valid_tutte_set, max_matching, perfect_matching_or_certificate
from krfactor.slack import (
    assign_transfers,
    copy_kind,
    lemma_bound,
    reduce_slack,
    restrict,
    slack,
    split_small_large,
)
from krfactor.solver import oracle_verdict, solve_auto

# certificates from criteria 1-3, re-checked by criterion 9
CERTS: dict[int, list] = {1: [], 2: [], 3: []}


def _min_degree_ok(g: Graph, r: int, c: int) -> bool:
    return g.min_degree() * r >= (r - 1) * g.n - c * r


# 1


def hs_instances():
    rng = random.Random(1)
    combos = [(r, n) for r in (2, 3) for n in (6, 9, 12) if n % r == 0]
    per = math.ceil(500 / len(combos))
    for r, n in combos:
        made = 0
        while made < per:
            spec = GenSpec("random-dense", n, r, c=0, seed=rng.randrange(10**9), noise=rng.uniform(0.3, 1.0))
            g = generate(spec).graph
            if _min_degree_ok(g, r, 0):
                made += 1
                yield g, r


def test_criterion_1_hajnal_szemeredi():
    start = time.perf_counter()
    total = ok = 0
    for g, r in hs_instances():
        cert = solve_auto(g, r)
        total += 1
        CERTS[1].append((g, cert))
        ok += cert.verdict == "FactorFound" and verify_certificate(g, cert)
    secs = time.perf_counter() - start
    passed = total >= 500 and ok == total and secs < 300
    record(1, passed, f"{ok}/{total} verified factors in {secs:.1f}s (r|n combinations only)")
    assert passed


# 2


def test_criterion_2_extremal_construction():
    rows = []
    for n in (9, 12, 15):
        inst = generate(GenSpec("extremal", n, 3))
        cert = solve_auto(inst.graph, 3)
        CERTS[2].append((inst.graph, cert))
        rows.append(
            cert.verdict == "NoFactor"
            and cert.evidence["kind"] == "IndependentSetTooLarge"
            and len(cert.evidence["set"]) == n // 3 + 1
            and oracle_verdict(inst.graph, 3) == "NoFactor"
        )
    record(2, all(rows), f"{sum(rows)}/3 sizes give IndependentSetTooLarge, oracle agrees")
    assert all(rows)


# 3


def near_threshold_instances(count: int = 320):
    """Mixed r = 3 instances with n <= 15 and min degree >= 2n/3 - 2."""
    rng = random.Random(3)
    makers = [
        lambda n, s: GenSpec("random-dense", n, 3, c=rng.choice([0, 1, 2]), seed=s, noise=rng.choice([0.5, 1.0])),
        lambda n, s: GenSpec("planted-sparse", n, 3, s=rng.randint(1, 3), c=rng.choice([0, 1]), seed=s, noise=rng.choice([0.0, 0.1, 0.2])),
        lambda n, s: GenSpec("extremal", n, 3, seed=s),
        lambda n, s: GenSpec("multipartite", n, 3, seed=s, part_sizes=(n // 3 + 1, n // 3, n // 3 - 1)),
        lambda n, s: GenSpec("multipartite", n, 3, seed=s),
        lambda n, s: GenSpec("planted-tiling", n, 3, seed=s, noise=rng.choice([0.1, 0.2])),
    ]
    made = 0
    while made < count:
        n = rng.choice([9, 12, 15])
        try:
            g = generate(rng.choice(makers)(n, rng.randrange(10**9))).graph
        except GenerationError:
            continue
        if _min_degree_ok(g, 3, 2):
            made += 1
            yield g


def test_criterion_3_oracle_equivalence():
    modes = [("auto", 15), ("auto", 0), ("oracle", 0), ("extremal", 0), ("nonextremal", 0)]
    total = agree = 0
    paths: dict[str, int] = {}
    no_count = 0
    for i, g in enumerate(near_threshold_instances()):
        mode, cutoff = modes[i % len(modes)]
        cert = solve_auto(g, 3, mode=mode, oracle_cutoff=cutoff, seed=i)
        truth = oracle_verdict(g, 3)
        CERTS[3].append((g, cert))
        total += 1
        agree += cert.verdict == truth
        no_count += truth == "NoFactor"
        key = cert.trace.path + ("+fallback" if cert.trace.fallback else "")
        paths[key] = paths.get(key, 0) + 1
    passed = total >= 300 and agree == total
    spread = ", ".join(f"{k}={v}" for k, v in sorted(paths.items()))
    record(3, passed, f"{agree}/{total} agree with the oracle ({no_count} no-instances; {spread})")
    assert passed


# 4


def random_factor(rng: random.Random, r: int, copies: int):
    parts = [[], [], []]
    K, nxt = [], 0
    for _ in range(copies):
        a = rng.randint(0, r)
        b = rng.randint(0, r - a)
        member = []
        for i, x in enumerate((a, b, r - a - b)):
            for _ in range(x):
                parts[i].append(nxt)
                member.append(nxt)
                nxt += 1
        K.append(tuple(member))
    return K, Partition.of(parts, r, allow_empty=True)


def test_criterion_4_slack_reduction():
    rng = random.Random(4)
    r, I = 3, [0, 1]
    done = ok = 0
    largest = 0
    while done < 200:
        K, p = random_factor(rng, r, rng.randint(10, 60))
        t = slack(p, K)
        t_I = sum(abs(x) for x in restrict(t, I))
        if t_I <= 4 * r - 3:
            continue
        done += 1
        got = reduce_slack(K, I, p)
        largest = max(largest, len(got))
        good = (
            set(got) <= set(K)
            and len(got) <= lemma_bound(t_I, r)
            and restrict(slack(p, got), I) == restrict(t, I)
            and all(copy_kind(p, c)[0] != "balanced" for c in got)
        )
        ok += good
    record(4, ok == done, f"{ok}/{done} reductions within (3 t_I)^r, slack kept, no balanced copy (largest |K'| = {largest})")
    assert ok == done


# 5


def test_criterion_5_color_coding():
    rng = random.Random(5)
    total = agree = found = 0
    while total < 200:
        n = rng.randint(6, 21)
        g = gnp(n, rng.uniform(0.35, 0.9), rng.randrange(10**9))
        k = rng.choice([2, 3])
        labels = [rng.randrange(k) for _ in range(n)]
        if len(set(labels)) < k:
            continue
        part = Partition.of([[v for v in range(n) if labels[v] == i] for i in range(k)], 3)
        types = enumerate_types(3, k)
        pat = [rng.choice(types) for _ in range(rng.randint(1, 3))]
        a = find_tiling_with_pattern(g, part, pat)
        b = exhaustive_pattern_tiling(g, part, pat)
        total += 1
        good = (a is None) == (b is None)
        if a is not None:
            found += 1
            good = good and verify_tiling(g, a, 3) and pattern_conforms(g, part, a, pat)
        agree += good
    fam = build_hash_family(20, 4)
    injective = all(fam.injective_on(U) for U in itertools.combinations(range(20), 4))
    passed = agree == total and injective
    record(5, passed, f"{agree}/{total} verdicts match exhaustive search ({found} found); (20,4) family injective on all 4845 sets: {injective}")
    assert passed


# 6


def brute_matching(g: Graph) -> int:
    edges = g.edges()
    best = 0

    def rec(i: int, used: int, size: int) -> None:
        nonlocal best
        best = max(best, size)
        if size + (g.n - bin(used).count("1")) // 2 <= best:
            return
        for j in range(i, len(edges)):
            u, v = edges[j]
            if not (used >> u & 1 or used >> v & 1):
                rec(j + 1, used | 1 << u | 1 << v, size + 1)

    rec(0, 0, 0)
    return best


def test_criterion_6_matching():
    rng = random.Random(6)
    total = ok = tutte = 0
    for _ in range(500):
        n = rng.randint(1, 12)
        g = gnp(n, rng.uniform(0.1, 0.8), rng.randrange(10**9))
        good = len(max_matching(g).edges) == brute_matching(g)
        got = perfect_matching_or_certificate(g)
        if isinstance(got, TutteSet):
            tutte += 1
            good = good and is_valid_tutte_set(g, got) and len(got.odd_components) > len(got.S)
        else:
            good = good and 2 * len(got.edges) == n and verify_tiling(g, got.edges, 2)
        total += 1
        ok += good
    record(6, ok == total, f"{ok}/{total} graphs match brute force; {tutte} Tutte sets checked")
    assert ok == total


# 7


def test_criterion_7_split_and_transfer():
    examples = [
        split_small_large([1, 0, -1], 1, 3) == [0, 1, 2],
        split_small_large([10**6, 1, -(10**6) - 1], 1, 3) == [1],
        split_small_large([5, 1, -6], 1, 3) == [0, 1, 2],
        assign_transfers([2, 0, -2]).nonzero() == [(0, 2, 2)],
        assign_transfers([0, 0, 0]).nonzero() == [],
        assign_transfers([3, 2, -4, -1]).nonzero() == [(0, 2, 3), (1, 2, 1), (1, 3, 1)],
    ]
    rng = random.Random(7)
    sums_ok = 0
    for _ in range(1000):
        k = rng.randint(2, 7)
        t = [rng.randint(-30, 30) for _ in range(k - 1)]
        t.append(-sum(t))
        t.sort(reverse=True)
        rows = [0] * k
        cols = [0] * k
        for i, j, x in assign_transfers(t).nonzero():
            rows[i] += x
            cols[j] += x
        sums_ok += rows == [max(x, 0) for x in t] and cols == [max(-x, 0) for x in t]
    passed = all(examples) and sums_ok == 1000
    record(7, passed, f"{sum(examples)}/6 hand examples; {sums_ok}/1000 random vectors satisfy row/column sums")
    assert passed


# 8


def test_criterion_8_nonextremal():
    rng = random.Random(8)
    done = ok = fallbacks = fam_ok = 0
    skipped = 0
    while done < 100:
        seed = rng.randrange(10**9)
        g = generate(GenSpec("random-dense", 30, 3, c=-1, seed=seed, noise=rng.choice([0.5, 1.0]))).graph
        assert g.min_degree() >= 21
        if peel_sparse_sets(g, 3).s:
            skipped += 1
            continue
        done += 1
        cert = solve_nonextremal(g, 3, seed=seed)
        ok += cert.verdict == "FactorFound" and verify_certificate(g, cert)
        fallbacks += cert.trace.fallback is not None
        fam = next(st for st in cert.trace.stages if st["stage"] == "absorbing-family")
        fam_ok += fam["verified"] and fam["sampled"] == 50
    passed = ok == done and fallbacks <= 10 and fam_ok == done
    record(8, passed, f"{ok}/{done} verified factors, {fallbacks} oracle fallbacks, {fam_ok} families verified on 50 r-sets ({skipped} skipped as sparse)")
    assert passed


# 9


def corruptions(doc: dict, g: Graph):
    """One tampered copy per semantic field of the document."""
    r = doc["r"]
    out = []

    def tweak(fn):
        d = copy.deepcopy(doc)
        fn(d)
        out.append(d)

    tweak(lambda d: d.update(verdict="NoFactor" if doc["verdict"] == "FactorFound" else "FactorFound"))
    tweak(lambda d: d.update(r=r - 1))
    tweak(lambda d: d.update(n=doc["n"] + 1))
    tweak(lambda d: d.update(graph_digest=("1" if doc["graph_digest"][0] == "0" else "0") + doc["graph_digest"][1:]))
    if doc["factor"] is not None:
        def dup(d):
            d["factor"][0][0] = d["factor"][1][0]
        tweak(dup)
    else:
        tweak(lambda d: _corrupt_evidence(d["evidence"], g))
    return out


def _corrupt_evidence(ev: dict, g: Graph) -> None:
    kind = ev["kind"]
    if kind == "IndependentSetTooLarge":
        S = ev["set"]
        outside = [w for w in range(g.n) if w not in S and any(g.has_edge(w, v) for v in S[1:])]
        if outside:
            S[0] = outside[0]
        else:
            del S[1:]
    elif kind == "Divisibility":
        ev["n"] += 1
    elif kind == "TutteParity" and ev["form"] == "tutte-set":
        ev["odd_components"][0] = ev["odd_components"][0][:-1] or [ev["S"][0] if ev["S"] else g.n]
    elif kind == "TutteParity":
        ev["parts"][0] = ev["parts"][0][:-1]
    elif kind == "SlackInfeasible":
        ev["bound"] += 1
    else:
        # no payload to tamper with, so relabel the claim
        ev["kind"] = "Divisibility"


def rejected(g: Graph, doc: dict) -> bool:
    try:
        return not verify_certificate(g, doc)
    except CertificateSchemaError:
        return True


def test_criterion_9_certificate_round_trip():
    if not all(CERTS.values()):
        pytest.skip("needs criteria 1-3 in the same run")
    total = valid = tampered = caught = 0
    for group in CERTS.values():
        for g, cert in group:
            doc = cert.to_json()
            total += 1
            valid += verify_certificate(g, doc)
            for bad in corruptions(doc, g):
                tampered += 1
                caught += rejected(g, bad)
    passed = valid == total and caught == tampered
    record(9, passed, f"{valid}/{total} certificates verify; {caught}/{tampered} tampered copies rejected")
    assert passed
