"""Brute-force ground truth: clique enumeration, K_r-factor/tiling search, sparse sets.

Everything here is exhaustive (with memoisation and cheap pruning) and is the
reference every faster path is checked against.  Searches carry a node budget;
running out raises an ``*Inconclusive`` error instead of guessing.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .graph import Graph, bits, mask_of, popcount

DEFAULT_BUDGET = 2_000_000


class OracleInconclusive(RuntimeError):
    """The node budget ran out before the search could decide."""


class SparseSearchInconclusive(RuntimeError):
    pass


def iter_cliques(g: Graph, r: int, within: int | None = None) -> Iterator[tuple[int, ...]]:
    """All r-cliques inside ``within`` as ascending tuples, lexicographically."""
    if r < 1:
        return
    cand0 = g.all_mask if within is None else within
    adj = g.adj

    def rec(prefix: tuple[int, ...], cand: int, k: int) -> Iterator[tuple[int, ...]]:
        if k == 0:
            yield prefix
            return
        while cand:
            if popcount(cand) < k:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            yield from rec(prefix + (v,), cand & adj[v], k - 1)

    yield from rec((), cand0, r)


def enumerate_kr(g: Graph, r: int) -> list[tuple[int, ...]]:
    if r < 2:
        raise ValueError("r must be at least 2")
    return list(iter_cliques(g, r))


def cliques_through(g: Graph, v: int, r: int, within: int, limit: int | None = None) -> list[tuple[int, ...]]:
    """r-cliques containing ``v`` whose other vertices lie in ``within``."""
    out = []
    for rest in iter_cliques(g, r - 1, g.adj[v] & within & ~(1 << v)):
        out.append(tuple(sorted(rest + (v,))))
        if limit is not None and len(out) >= limit:
            break
    return out


def _count_through(g: Graph, v: int, r: int, within: int, cap: int) -> int:
    cnt = 0
    for _ in iter_cliques(g, r - 1, g.adj[v] & within & ~(1 << v)):
        cnt += 1
        if cnt >= cap:
            break
    return cnt


def oracle_kr_factor(
    g: Graph, r: int, within: int | None = None, budget: int = DEFAULT_BUDGET
) -> list[tuple[int, ...]] | None:
    """Exhaustive K_r-factor search of ``g[within]``.

    Branches on the uncovered vertex lying in the fewest cliques of the
    uncovered graph; failed vertex sets are memoised.
    """
    root = g.all_mask if within is None else within
    size = popcount(root)
    if r < 1 or size % r:
        return None
    if r == 1:
        return [(v,) for v in bits(root)]
    failed: set[int] = set()
    nodes = 0

    def rec(unc: int) -> list[tuple[int, ...]] | None:
        nonlocal nodes
        if not unc:
            return []
        if unc in failed:
            return None
        nodes += 1
        if nodes > budget:
            raise OracleInconclusive(f"K_{r}-factor search exceeded {budget} nodes")
        best_v, best_cnt = -1, None
        for v in bits(unc):
            cap = best_cnt if best_cnt is not None else 1 << 30
            cnt = _count_through(g, v, r, unc, cap)
            if best_cnt is None or cnt < best_cnt:
                best_v, best_cnt = v, cnt
                if cnt == 0:
                    failed.add(unc)
                    return None
                if cnt == 1:
                    break
        for clique in cliques_through(g, best_v, r, unc):
            sub = rec(unc & ~mask_of(clique))
            if sub is not None:
                return [clique] + sub
        failed.add(unc)
        return None

    return rec(root)


def oracle_max_tiling(g: Graph, r: int, within: int | None = None, budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    """Maximum K_r-tiling by memoised branch-and-bound on the lowest free vertex."""
    root = g.all_mask if within is None else within
    memo: dict[int, tuple[int, ...]] = {}
    nodes = 0

    def rec(rem: int) -> tuple[tuple[int, ...], ...]:
        nonlocal nodes
        if popcount(rem) < r:
            return ()
        if rem in memo:
            return memo[rem]
        nodes += 1
        if nodes > budget:
            raise OracleInconclusive(f"max tiling search exceeded {budget} nodes")
        ceiling = popcount(rem) // r
        low = rem & -rem
        v = low.bit_length() - 1
        best = rec(rem ^ low)
        if len(best) < ceiling:
            for clique in cliques_through(g, v, r, rem):
                cand = (clique,) + rec(rem & ~mask_of(clique))
                if len(cand) > len(best):
                    best = cand
                    if len(best) == ceiling:
                        break
        memo[rem] = best
        return best

    return list(rec(root))


def _greedy_sparse(g: Graph, k: int, within: int) -> int:
    """Drop the vertex of largest internal degree until ``k`` remain."""
    cur = within
    while popcount(cur) > k:
        worst = max(bits(cur), key=lambda v: (popcount(g.adj[v] & cur), v))
        cur &= ~(1 << worst)
    return cur


def sparsest_k_set(
    g: Graph, k: int, within: int | None = None, budget: int = DEFAULT_BUDGET, below: int | None = None
) -> tuple[int, frozenset[int]]:
    """Exact minimum of ``e(G[U])`` over k-subsets ``U`` of ``within``.

    With ``below`` set, the search may stop at the first set with fewer edges
    than ``below`` and returns the greedy incumbent otherwise.
    """
    pool = g.all_mask if within is None else within
    if k > popcount(pool) or k < 0:
        raise ValueError(f"cannot choose {k} vertices from {popcount(pool)}")
    order = sorted(bits(pool), key=lambda v: (popcount(g.adj[v] & pool), v))
    inc = _greedy_sparse(g, k, pool)
    best_e = sum(popcount(g.adj[v] & inc) for v in bits(inc)) // 2
    best = inc
    nodes = 0

    def done() -> bool:
        return below is not None and best_e < below

    def rec(i: int, chosen: int, cnt: int, edges: int) -> None:
        nonlocal best, best_e, nodes
        if done():
            return
        if cnt == k:
            if edges < best_e:
                best, best_e = chosen, edges
            return
        need = k - cnt
        if len(order) - i < need:
            return
        nodes += 1
        if nodes > budget:
            raise SparseSearchInconclusive(f"sparse-set search exceeded {budget} nodes")
        costs = sorted(popcount(g.adj[v] & chosen) for v in order[i:])
        if edges + sum(costs[:need]) >= best_e:
            return
        v = order[i]
        rec(i + 1, chosen | (1 << v), cnt + 1, edges + popcount(g.adj[v] & chosen))
        rec(i + 1, chosen, cnt, edges)

    if k == 0:
        return 0, frozenset()
    rec(0, 0, 0, 0)
    return best_e, frozenset(bits(best))


def find_sparse_set_exact(
    g: Graph, k: int, gamma: Fraction | str | int, budget: int = DEFAULT_BUDGET
) -> frozenset[int] | None:
    """Some k-set with fewer than ``gamma * n**2`` induced edges, else ``None``."""
    if k > g.n:
        raise ValueError("k exceeds n")
    limit = Fraction(gamma) * g.n * g.n
    edges, best = sparsest_k_set(g, k, budget=budget)
    return best if edges < limit else None


def maximum_independent_set(g: Graph, within: int | None = None, budget: int = DEFAULT_BUDGET) -> frozenset[int]:
    """Exact maximum independent set via max-clique search in the complement."""
    pool = g.all_mask if within is None else within
    non = [(~g.adj[v]) & pool & ~(1 << v) for v in range(g.n)]
    best = 0
    best_size = 0
    nodes = 0

    def colour_bound(cand: int) -> int:
        # greedy colouring of the complement = partition into cliques of g
        colours = 0
        rest = cand
        while rest:
            colours += 1
            avail = rest
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                rest &= ~low
                avail &= ~low & ~non[v]
        return colours

    def rec(cur: int, size: int, cand: int) -> None:
        nonlocal best, best_size, nodes
        if size > best_size:
            best, best_size = cur, size
        if not cand:
            return
        nodes += 1
        if nodes > budget:
            raise OracleInconclusive("independent set search exceeded budget")
        if size + colour_bound(cand) <= best_size:
            return
        while cand:
            if size + popcount(cand) <= best_size:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            rec(cur | low, size + 1, cand & non[v])

    rec(0, 0, pool)
    return frozenset(bits(best))
