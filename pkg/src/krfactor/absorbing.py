"""Absorbers and the non-extremal solver.

An absorber for an r-set ``U`` is a disjoint r²-set ``A`` such that both
``G[A]`` and ``G[A ∪ U]`` have K_r-factors.  The solver reserves a few
disjoint r²-sets, tiles the rest greedily, and then swallows each leftover
r-set into its own reserved set.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .certificate import Certificate, Trace, found, inconclusive, no_factor, oracle_exhausted
from .graph import Graph, bits, is_factor, mask_of, popcount, verify_tiling
from .matching import bipartite_max_matching
from .oracle import OracleInconclusive, cliques_through, iter_cliques, oracle_kr_factor, oracle_max_tiling

Tiling = list[tuple[int, ...]]


@dataclass(frozen=True)
class Absorber:
    target: frozenset[int]
    body: frozenset[int]
    witness: tuple[tuple[int, ...], ...]
    witness_with_target: tuple[tuple[int, ...], ...]


def check_absorber(g: Graph, U: Sequence[int], A: Sequence[int], r: int) -> Absorber | None:
    """Absorber with oracle witnesses, or None.  Raises on wrong sizes or overlap."""
    U, A = frozenset(U), frozenset(A)
    if len(U) != r or len(A) != r * r:
        raise ValueError(f"need |U| = {r} and |A| = {r * r}, got {len(U)} and {len(A)}")
    if U & A:
        raise ValueError("absorber body must be disjoint from its target")
    w1 = oracle_kr_factor(g, r, within=mask_of(A))
    if w1 is None:
        return None
    w2 = oracle_kr_factor(g, r, within=mask_of(A | U))
    if w2 is None:
        return None
    return Absorber(U, A, tuple(map(tuple, w1)), tuple(map(tuple, w2)))


def is_absorber(g: Graph, U: Sequence[int], A: Sequence[int], r: int) -> bool:
    return check_absorber(g, U, A, r) is not None


def _random_clique(g: Graph, k: int, pool: int, rng: random.Random, tries: int = 8) -> tuple[int, ...] | None:
    if k == 0:
        return ()
    for _ in range(tries):
        chosen: list[int] = []
        cand = pool
        while len(chosen) < k and cand:
            v = rng.choice(list(bits(cand)))
            chosen.append(v)
            cand &= g.adj[v]
        if len(chosen) == k:
            return tuple(sorted(chosen))
    return next(iter_cliques(g, k, pool), None)


def _recipe(g: Graph, U: Sequence[int], r: int, avoid: int, rng: random.Random) -> Absorber | None:
    """Clique ``u_1..u_r`` plus, for each ``v_i``, a ``K_{r-1}`` in ``N(v_i) ∩ N(u_i)``."""
    U = list(U)
    free = (((1 << g.n) - 1) & ~avoid) & ~mask_of(U)
    us = _random_clique(g, r, free, rng)
    if us is None:
        return None
    us = list(us)
    rng.shuffle(us)
    used = mask_of(us)
    pieces = []
    for v, u in zip(U, us):
        pool = g.adj[v] & g.adj[u] & free & ~used
        piece = _random_clique(g, r - 1, pool, rng)
        if piece is None:
            return None
        pieces.append(piece)
        used |= mask_of(piece)
    witness = tuple(tuple(sorted((u,) + p)) for u, p in zip(us, pieces))
    with_target = (tuple(sorted(us)),) + tuple(tuple(sorted((v,) + p)) for v, p in zip(U, pieces))
    body = frozenset(bits(used))
    ab = Absorber(frozenset(U), body, witness, with_target)
    if not (verify_tiling(g, witness, r) and verify_tiling(g, with_target, r)):
        raise AssertionError("absorber recipe produced an invalid witness")
    return ab


def find_absorbers(
    g: Graph, U: Sequence[int], r: int, limit: int = 10, avoid: int = 0, seed: int = 0, tries: int = 200
) -> list[Absorber]:
    """Up to ``limit`` absorbers for ``U`` with pairwise distinct bodies."""
    if len(set(U)) != r:
        raise ValueError(f"target must be an {r}-set")
    rng = random.Random(seed)
    out: dict[frozenset[int], Absorber] = {}
    for _ in range(tries):
        ab = _recipe(g, U, r, avoid, rng)
        if ab is not None and ab.body not in out:
            out[ab.body] = ab
            if len(out) >= limit:
                break
    return list(out.values())


@dataclass
class AbsorbingFamily:
    r: int
    members: list[frozenset[int]]
    witnesses: list[Tiling]
    coverage: dict[tuple[int, ...], list[int]] = field(default_factory=dict)
    verified: bool = False
    seed: int = 0

    @property
    def vertices(self) -> int:
        return mask_of(v for m in self.members for v in m)

    def absorbs(self, g: Graph, idx: int, U: Sequence[int]) -> Tiling | None:
        """K_r-factor of ``member ∪ U``, or None."""
        return oracle_kr_factor(g, self.r, within=mask_of(self.members[idx]) | mask_of(U))

    def to_json(self) -> dict:
        return {
            "members": [sorted(m) for m in self.members],
            "verified": self.verified,
            "sampled": len(self.coverage),
            "min_coverage": min((len(v) for v in self.coverage.values()), default=0),
            "seed": self.seed,
        }


def build_absorbing_family(
    g: Graph,
    r: int,
    family_cap: Fraction = Fraction(3, 10),
    per_set_min: int = 1,
    sample: int = 50,
    seed: int = 0,
    max_vertices: int | None = None,
) -> AbsorbingFamily:
    """Randomised greedy choice of disjoint r²-sets, verified on ``sample`` random r-sets.

    The member count is at most ``family_cap * n`` and the members together
    use at most ``max_vertices`` vertices (default two thirds of ``n``) so
    that there is room left for the greedy tiling.
    """
    n = g.n
    rng = random.Random(seed)
    if max_vertices is None:
        max_vertices = (2 * n) // 3
    want = min(int(Fraction(family_cap) * n), max_vertices // (r * r))
    members: list[frozenset[int]] = []
    witnesses: list[Tiling] = []
    used = 0
    attempts = 0
    while len(members) < want and attempts < 50 * max(want, 1):
        attempts += 1
        free = [v for v in range(n) if not used >> v & 1]
        if len(free) < r * r + r:
            break
        U = rng.sample(free, r)
        ab = _recipe(g, U, r, used, rng)
        if ab is None:
            continue
        members.append(ab.body)
        witnesses.append(list(ab.witness))
        used |= mask_of(ab.body)
    fam = AbsorbingFamily(r, members, witnesses, seed=seed)
    rest = [v for v in range(n) if not used >> v & 1]
    ok = bool(members) and len(rest) >= r
    target = min(sample, math.comb(len(rest), r)) if ok else 0
    draws = 0
    while len(fam.coverage) < target and draws < 20 * target:
        draws += 1
        U = tuple(sorted(rng.sample(rest, r)))
        if U in fam.coverage:
            continue
        fam.coverage[U] = [i for i in range(len(members)) if fam.absorbs(g, i, U) is not None]
    fam.verified = ok and all(len(v) >= per_set_min for v in fam.coverage.values())
    return fam


# the solver


def greedy_almost_cover(g: Graph, r: int, pool: int, oracle_limit: int = 24) -> Tiling:
    """Repeatedly take an r-clique through the uncovered vertex of least residual degree."""
    tiling: Tiling = []
    left = pool
    stuck = 0
    while True:
        cand = left & ~stuck
        if not cand:
            break
        v = min(bits(cand), key=lambda x: (popcount(g.adj[x] & left), x))
        opts = cliques_through(g, v, r, within=left, limit=200)
        if not opts:
            stuck |= 1 << v
            continue
        best = min(opts, key=lambda c: (sum(popcount(g.adj[u] & left) for u in c), c))
        tiling.append(tuple(sorted(best)))
        left &= ~mask_of(best)
    if left and popcount(pool) <= oracle_limit:
        try:
            better = oracle_max_tiling(g, r, within=pool)
            if len(better) > len(tiling):
                tiling = [tuple(sorted(c)) for c in better]
        except OracleInconclusive:
            pass
    return tiling


def _absorb(
    g: Graph, fam: AbsorbingFamily, leftover: list[int], rng: random.Random, shuffles: int
) -> list[Tiling] | None:
    """Split ``leftover`` into r-sets and give each its own member; member factors, or None."""
    r = fam.r
    cache: dict[tuple[tuple[int, ...], int], Tiling | None] = {}
    order = list(leftover)
    for _ in range(max(shuffles, 1)):
        sets = [tuple(sorted(order[i : i + r])) for i in range(0, len(order), r)]

        def fits(U: tuple[int, ...], i: int) -> bool:
            key = (U, i)
            if key not in cache:
                cache[key] = fam.absorbs(g, i, U)
            return cache[key] is not None

        pairs = bipartite_max_matching(sets, list(range(len(fam.members))), fits)
        if len(pairs) == len(sets):
            out = [list(fam.witnesses[i]) for i in range(len(fam.members))]
            for U, i in pairs:
                out[i] = [tuple(sorted(c)) for c in cache[(U, i)]]
            return out
        rng.shuffle(order)
    return None


def solve_nonextremal(
    g: Graph,
    r: int,
    family_cap: Fraction = Fraction(3, 10),
    per_set_min: int = 1,
    sample: int = 50,
    seed: int = 0,
    shuffles: int = 30,
    trace: Trace | None = None,
) -> Certificate:
    """Absorbing-family solver; any failure is decided by the oracle and recorded."""
    trace = trace if trace is not None else Trace(path="nonextremal", seed=seed)
    rng = random.Random(seed)
    reason = None
    if g.n % r:
        raise ValueError("solve_nonextremal needs r | n")
    fam = build_absorbing_family(g, r, family_cap, per_set_min, sample, seed)
    trace.add("absorbing-family", **fam.to_json())
    if not fam.verified:
        trace.flag("absorbing family failed sampled verification")
    pool = g.all_mask & ~fam.vertices
    tiling = greedy_almost_cover(g, r, pool)
    covered = mask_of(v for c in tiling for v in c)
    leftover = list(bits(pool & ~covered))
    trace.add("almost-cover", copies=len(tiling), leftover=len(leftover))
    if len(leftover) > r * len(fam.members):
        reason = f"{len(leftover)} leftover vertices exceed absorbing capacity {r * len(fam.members)}"
    else:
        parts = _absorb(g, fam, leftover, rng, shuffles)
        if parts is None:
            reason = "leftover r-sets could not be matched to distinct absorbers"
        else:
            factor = tiling + [c for p in parts for c in p]
            if is_factor(g, factor, r):
                trace.add("absorb", sets=len(leftover) // r)
                return found(g, r, factor, trace)
            reason = "absorbed tiling failed verification"
    return oracle_decide(g, r, trace, reason)


def oracle_decide(g: Graph, r: int, trace: Trace, reason: str | None) -> Certificate:
    """Brute-force decision, with ``reason`` recorded as the fallback cause."""
    if reason is not None:
        trace.fallback = reason
    try:
        f = oracle_kr_factor(g, r)
    except OracleInconclusive:
        trace.add("oracle", result="budget exhausted")
        return inconclusive(g, r, trace)
    trace.add("oracle", result="factor" if f else "none")
    if f is None:
        return no_factor(g, r, oracle_exhausted(), trace)
    return found(g, r, f, trace)
