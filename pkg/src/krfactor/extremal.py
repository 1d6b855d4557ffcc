"""Extremal case: the graph has at least one sparse ``n/r``-set.

Stages, each recorded in the trace:

1. peel sparse ``n/r``-sets ``A_1..A_s`` (remainder ``B``);
2. reclassify vertices by their degree into each ``A_i`` (good / bad);
3. balance part sizes by removing a small admissible tiling, found by colour
   coding, plus copies grown from matchings or small cliques;
4. cover each bad vertex by a balanced copy;
5. assemble the rest: a ``K_{r-s}``-factor of ``B`` followed by one bipartite
   matching per sparse part.

Every stage output is checked.  When a structural assumption fails the
pipeline raises :class:`PipelineFallback` and the caller decides by brute
force; it never guesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .admissible import find_admissible_tiling
from .certificate import (
    Certificate,
    Trace,
    find_component_pair,
    found,
    independent_set,
    no_factor,
    slack_infeasible,
)
from .graph import Graph, Partition, bits, is_factor, mask_of, popcount, verify_tiling
from .matching import bipartite_max_matching, components, max_matching
from .oracle import (
    DEFAULT_BUDGET,
    OracleInconclusive,
    SparseSearchInconclusive,
    iter_cliques,
    maximum_independent_set,
    oracle_kr_factor,
    oracle_max_tiling,
    sparsest_k_set,
)
from .slack import assign_transfers, base_vector, partition_slack, restrict, sort_slack, split_small_large

EXACT_SPARSE_LIMIT = 24
EXTEND_BUDGET = 20_000


class PipelineFallback(RuntimeError):
    """A desk-scale structural assumption failed; decide by brute force instead."""


class StructuralViolation(PipelineFallback):
    """A vertex is good for two sparse parts at once."""


@dataclass(frozen=True)
class Thresholds:
    mu: Fraction = Fraction(1, 1000)
    good_frac: Fraction = Fraction(1, 5)
    supergood_frac: Fraction = Fraction(1, 10)
    bad_frac: Fraction = Fraction(1, 10)
    c_band: Fraction = Fraction(99, 100)
    gamma: Fraction = Fraction(1, 100)

    def __post_init__(self) -> None:
        if not 0 < self.good_frac < 1:
            raise ValueError("good_frac must lie in (0, 1)")
        if self.supergood_frac > self.good_frac:
            raise ValueError("supergood_frac cannot exceed good_frac")
        if not 0 < self.c_band <= 1:
            raise ValueError("c_band must lie in (0, 1]")

    def to_json(self) -> dict[str, str]:
        return {k: str(getattr(self, k)) for k in ("mu", "good_frac", "supergood_frac", "bad_frac", "c_band", "gamma")}


# peeling


@dataclass
class PeelResult:
    parts: list[frozenset[int]]
    remainder: frozenset[int]
    edges: list[int]
    exact: bool
    final_edges: int | None = None

    @property
    def s(self) -> int:
        return len(self.parts)

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "parts": [sorted(p) for p in self.parts],
            "edges": self.edges,
            "exact": self.exact,
            "remainder_sparsest": self.final_edges,
        }


def _internal(g: Graph, m: int) -> int:
    return sum(popcount(g.adj[v] & m) for v in bits(m)) // 2


def _shrink(g: Graph, m: int, k: int) -> int:
    while popcount(m) > k:
        worst = max(bits(m), key=lambda v: (popcount(g.adj[v] & m), v))
        m &= ~(1 << worst)
    return m


def _grow(g: Graph, m: int, k: int, pool: int) -> int:
    while popcount(m) < k:
        best = min(bits(pool & ~m), key=lambda v: (popcount(g.adj[v] & m), v))
        m |= 1 << best
    return m


def _two_swap(g: Graph, m: int, pool: int, rounds: int = 200) -> int:
    for _ in range(rounds):
        best_gain, move = 0, None
        outside = pool & ~m
        for u in bits(m):
            du = popcount(g.adj[u] & m)
            for w in bits(outside):
                dw = popcount(g.adj[w] & m) - (g.adj[w] >> u & 1)
                if du - dw > best_gain:
                    best_gain, move = du - dw, (u, w)
        if move is None:
            break
        u, w = move
        m = (m & ~(1 << u)) | (1 << w)
    return m


def heuristic_sparse_set(g: Graph, k: int, within: int) -> tuple[int, frozenset[int]]:
    """Greedy shrink from every vertex's non-neighbourhood, then 2-swap local search."""
    starts = [within]
    for v in bits(within):
        starts.append(((~g.adj[v]) & within) | (1 << v))
    best_e, best = None, 0
    seen: set[int] = set()
    for st in starts:
        m = _shrink(g, st, k) if popcount(st) >= k else _grow(g, st, k, within)
        if m in seen:
            continue
        seen.add(m)
        m = _two_swap(g, m, within)
        e = _internal(g, m)
        if best_e is None or e < best_e or (e == best_e and m < best):
            best_e, best = e, m
    return best_e, frozenset(bits(best))


def find_sparse_part(g: Graph, k: int, within: int, exact_limit: int = EXACT_SPARSE_LIMIT) -> tuple[int, frozenset[int], bool]:
    if popcount(within) <= exact_limit:
        try:
            e, u = sparsest_k_set(g, k, within)
            return e, u, True
        except SparseSearchInconclusive:
            pass
    e, u = heuristic_sparse_set(g, k, within)
    return e, u, False


def peel_sparse_sets(g: Graph, r: int, thr: Thresholds = Thresholds(), exact_limit: int = EXACT_SPARSE_LIMIT) -> PeelResult:
    """Repeatedly remove a ``gamma``-sparse ``n/r``-set (at most ``r`` times)."""
    if g.n % r:
        raise ValueError("peeling needs r | n")
    k = g.n // r
    limit = thr.gamma * g.n * g.n
    rest = g.all_mask
    parts: list[frozenset[int]] = []
    edges: list[int] = []
    exact = True
    final = None
    for _ in range(r):
        e, u, ex = find_sparse_part(g, k, rest, exact_limit)
        exact = exact and ex
        if e < limit:
            parts.append(u)
            edges.append(e)
            rest &= ~mask_of(u)
            if not rest:
                break
        else:
            final = e
            break
    return PeelResult(parts, frozenset(bits(rest)), edges, exact, final)


# classification


@dataclass
class Classified:
    partition: Partition
    case: str
    s: int
    bad: frozenset[int]
    supergood: frozenset[int]
    t: tuple[int, ...]
    moved: int = 0

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "sizes": list(self.partition.sizes),
            "t": list(self.t),
            "bad": sorted(self.bad),
            "supergood": len(self.supergood),
            "moved": self.moved,
        }


def classify_and_move(g: Graph, peel: PeelResult, r: int, thr: Thresholds = Thresholds(), trace: Trace | None = None) -> Classified:
    n = g.n
    s = peel.s
    if s == 0:
        raise PipelineFallback("no sparse part to classify against")
    amasks = [mask_of(p) for p in peel.parts]
    good_cut = thr.good_frac * n
    super_cut = thr.supergood_frac * n
    owner: dict[int, int] = {}
    supergood: set[int] = set()
    for v in range(n):
        degs = [popcount(g.adj[v] & m) for m in amasks]
        goods = [i for i, d in enumerate(degs) if d < good_cut]
        if len(goods) > 1:
            raise StructuralViolation(f"vertex {v} is good for parts {goods}")
        if goods:
            owner[v] = goods[0]
            if degs[goods[0]] < super_cut:
                supergood.add(v)
    a1 = [sorted(v for v, i in owner.items() if i == j) for j in range(s)]
    b1 = sorted(v for v in range(n) if v not in owner)
    orig = {v: i for i, p in enumerate(peel.parts) for v in p}
    moved = sum(1 for v in range(n) if orig.get(v, -1) != owner.get(v, -1))
    bad: set[int] = set()
    for v in b1:
        if any(popcount(g.adj[v] & m) < len(p) - thr.bad_frac * n for m, p in zip(amasks, peel.parts)):
            bad.add(v)
    if trace is not None:
        for j, p in enumerate(peel.parts):
            not_good = sum(1 for v in p if owner.get(v) != j)
            if not_good >= thr.good_frac * n:
                trace.flag(f"part {j}: {not_good} members are not good for it")
    if s < r:
        parts = a1 + [b1]
        case = "I"
    else:
        # no remainder: push leftover vertices into parts that are short
        case = "II"
        q = n // r
        for v in b1:
            short = [j for j in range(s) if len(a1[j]) < q]
            if not short:
                raise PipelineFallback("case II assignment found no short part")
            j = min(short, key=lambda j: (popcount(g.adj[v] & amasks[j]), j))
            a1[j].append(v)
            bad.add(v)
        parts = [sorted(p) for p in a1]
    part = Partition.of(parts, r, s=s, allow_empty=True)
    part.validate(n)
    return Classified(part, case, s, frozenset(bad), frozenset(supergood), partition_slack(part), moved)


# clique extension


def extend_clique(
    g: Graph, seed: Sequence[int], needs: Sequence[tuple[int, int]], budget: int = EXTEND_BUDGET
) -> tuple[int, ...] | None:
    """Extend clique ``seed`` by ``count`` vertices from each ``(pool mask, count)``."""
    needs = [(pool, cnt) for pool, cnt in needs if cnt > 0]
    nodes = 0

    def rec(idx: int, common: int, chosen: tuple[int, ...]) -> tuple[int, ...] | None:
        nonlocal nodes
        if idx == len(needs):
            return chosen
        pool, cnt = needs[idx]
        for cl in iter_cliques(g, cnt, common & pool):
            nodes += 1
            if nodes > budget:
                return None
            nxt = common
            for v in cl:
                nxt &= g.adj[v]
            got = rec(idx + 1, nxt, chosen + cl)
            if got is not None:
                return got
        return None

    if not g.is_clique(seed):
        return None
    got = rec(0, g.common_neighbors(seed), tuple(seed))
    return None if got is None else tuple(sorted(got))


def _matching_in(g: Graph, mask: int) -> list[tuple[int, int]]:
    sub, order = g.induced(list(bits(mask)))
    return [(order[u], order[v]) for u, v in max_matching(sub).edges]


def _disjoint_cliques(g: Graph, k: int, within: int, need: int) -> list[tuple[int, ...]]:
    if k == 2:
        return _matching_in(g, within)[:need]
    out: list[tuple[int, ...]] = []
    m = within
    while len(out) < need:
        cl = next(iter_cliques(g, k, m), None)
        if cl is None:
            break
        out.append(cl)
        m &= ~mask_of(cl)
    if len(out) >= need:
        return out
    try:
        return oracle_max_tiling(g, k, within, budget=DEFAULT_BUDGET // 10)[:need]
    except OracleInconclusive:
        return out


# balancing


@dataclass
class State:
    """Residual parts (as masks) and everything removed so far."""

    masks: list[int]
    removed: list[tuple[int, ...]] = field(default_factory=list)
    b_home: int = 0  # the remainder part before anything was removed

    def take(self, clique: Sequence[int]) -> None:
        cm = mask_of(clique)
        if cm & ~self.avail:
            raise AssertionError("clique reuses a removed vertex")
        self.masks = [m & ~cm for m in self.masks]
        self.removed.append(tuple(sorted(clique)))

    @property
    def avail(self) -> int:
        out = 0
        for m in self.masks:
            out |= m
        return out

    def partition(self, r: int, s: int) -> Partition:
        return Partition(tuple(frozenset(bits(m)) for m in self.masks), r, s, True)


@dataclass
class Balanced:
    state: State
    I: list[int]
    stage_sizes: dict[str, int]


def balance(
    g: Graph, cl: Classified, c: int, r: int, thr: Thresholds = Thresholds(), trace: Trace | None = None
) -> Balanced | dict:
    """Remove an admissible tiling and transfer copies until the residual is balanced.

    Returns the balanced state, or SlackInfeasible evidence when no admissible
    tiling exists.
    """
    trace = trace if trace is not None else Trace()
    P1 = cl.partition
    rp = len(P1.parts)
    b = base_vector(r, rp)
    t = partition_slack(P1)
    tau = sort_slack(t)
    pos = split_small_large([t[i] for i in tau], c, r, thr.c_band)
    I = sorted(tau[p] for p in pos)
    adm = find_admissible_tiling(g, P1, I)
    trace.add("admissible", **adm.to_json(), t=list(t))
    if adm.tiling is None:
        if adm.complete:
            return slack_infeasible(P1, I, adm.t_I)
        raise PipelineFallback("admissible search hit its budget")
    state = State(list(P1.masks()))
    for cl_ in adm.tiling:
        state.take(cl_)
    res = state.partition(r, cl.s)
    t2 = partition_slack(res)
    if any(t2[i] for i in I):
        raise AssertionError("admissible tiling failed to zero the small coordinates")

    seeds: dict[int, list[tuple[int, ...]]] = {}
    for i, x in enumerate(t2):
        if x <= 0:
            continue
        if i < cl.s:
            got = _matching_in(g, state.masks[i])[:x]
        else:
            k = r - cl.s + 1
            good = state.masks[i] & ~mask_of(cl.bad)
            got = _disjoint_cliques(g, k, good, x)
            if len(got) < x:
                got = _disjoint_cliques(g, k, state.masks[i], x)
        if len(got) < x:
            raise PipelineFallback(f"part {i} holds only {len(got)} of {x} seed cliques")
        seeds[i] = [tuple(e) for e in got]
    seed_mask = mask_of(v for ss in seeds.values() for e in ss for v in e)
    tm = assign_transfers(t2)
    transfers = []
    for i, k, x in tm.nonzero():
        for _ in range(x):
            seed = seeds[i].pop(0)
            needs = [(state.masks[j] & ~seed_mask, b[j] - (1 if j == k else 0)) for j in range(rp) if j != i]
            copy = extend_clique(g, seed, needs)
            if copy is None:
                raise PipelineFallback(f"seed {seed} does not extend to a ({i},{k})-copy")
            seed_mask &= ~mask_of(seed)
            state.take(copy)
            transfers.append(copy)
    trace.add("transfers", t=list(t2), matrix=[[i, k, x] for i, k, x in tm.nonzero()], copies=len(transfers))
    final = partition_slack(state.partition(r, cl.s))
    if any(final):
        raise AssertionError(f"balancing left slack {final}")
    return Balanced(state, I, {"admissible": len(adm.tiling), "transfers": len(transfers)})


def clean_bad_vertices(g: Graph, state: State, bad: frozenset[int], r: int, trace: Trace | None = None) -> State:
    """Cover every remaining bad vertex by a balanced copy."""
    rp = len(state.masks)
    b = base_vector(r, rp)
    cleaned = 0
    for v in sorted(bad):
        home = next((i for i, m in enumerate(state.masks) if m >> v & 1), None)
        if home is None:
            continue
        needs = [(state.masks[j] & ~(1 << v), b[j] - (1 if j == home else 0)) for j in range(rp)]
        copy = extend_clique(g, (v,), needs)
        if copy is None:
            raise PipelineFallback(f"no balanced copy through bad vertex {v}")
        state.take(copy)
        cleaned += 1
    if trace is not None:
        trace.add("clean", cleaned=cleaned, sizes=[popcount(m) for m in state.masks])
    return state


# assembly


def _match_round(g: Graph, units: list[tuple[int, ...]], part: list[int]) -> list[tuple[int, ...]] | None:
    if len(units) != len(part):
        return None
    common = {u: g.common_neighbors(u) for u in units}
    pairs = bipartite_max_matching(units, part, lambda u, v: bool(common[u] >> v & 1))
    if len(pairs) < len(part):
        return None
    return [tuple(sorted(u + (v,))) for u, v in pairs]


def _perfect_matching(g: Graph, mask: int) -> list[tuple[int, ...]] | None:
    edges = _matching_in(g, mask)
    if 2 * len(edges) != popcount(mask):
        return None
    return [tuple(e) for e in edges]


def _parity_repair(g: Graph, state: State, r: int, s: int, trace: Trace) -> list[tuple[int, ...]] | None:
    """Fix an odd split of ``B`` so that it has a perfect matching (needs ``r - s = 2``)."""
    B = state.masks[s]
    comps = [mask_of(cp) for cp in components(g, bits(B))]
    odd = [cp for cp in comps if popcount(cp) % 2]
    # one copy with two vertices in some A_i and one in an odd component X,
    # one copy with a triangle in another odd component Y and no vertex in A_i
    for i in range(s):
        edges = _matching_in(g, state.masks[i])[:8]
        for X in odd:
            for Y in odd:
                if X == Y:
                    continue
                for e in edges:
                    needs1 = [(state.masks[j], 1) for j in range(s) if j != i] + [(X, 1)]
                    c1 = extend_clique(g, e, needs1, budget=2000)
                    if c1 is None:
                        continue
                    rest_y = Y & ~mask_of(c1)
                    for tri in list(iter_cliques(g, 3, rest_y))[:8]:
                        needs2 = [(state.masks[j] & ~mask_of(c1), 1) for j in range(s) if j != i]
                        c2 = extend_clique(g, tri, needs2, budget=2000)
                        if c2 is None:
                            continue
                        newB = B & ~mask_of(c1) & ~mask_of(c2)
                        pm = _perfect_matching(g, newB)
                        if pm is not None:
                            state.take(c1)
                            state.take(c2)
                            trace.add("parity-repair", kind="pair", copies=[list(c1), list(c2)])
                            return pm
    return _swap_repair(g, state, s, trace)


def _swap_repair(g: Graph, state: State, s: int, trace: Trace) -> list[tuple[int, ...]] | None:
    """Swap one ``B`` vertex of an already removed copy with a vertex of ``B``."""
    B = state.masks[s]
    b_home = state.b_home
    for idx, cp in enumerate(state.removed):
        for v in cp:
            if not b_home >> v & 1:
                continue
            others = [u for u in cp if u != v]
            for w in bits(B):
                if not g.is_clique(others + [w]):
                    continue
                newB = (B & ~(1 << w)) | (1 << v)
                pm = _perfect_matching(g, newB)
                if pm is not None:
                    state.removed[idx] = tuple(sorted(others + [w]))
                    state.masks[s] = newB
                    trace.add("parity-repair", kind="swap", out=v, into=w)
                    return pm
    return None


def assemble(
    g: Graph,
    state: State,
    r: int,
    s: int,
    trace: Trace,
    sub_solver: Callable[[Graph, int], list[tuple[int, ...]] | None] | None = None,
) -> list[tuple[int, ...]]:
    """Factor of the balanced residual: ``K_{r-s}``-factor of ``B``, then one matching round per part."""
    if s < r:
        q = r - s
        B = state.masks[s]
        if q == 1:
            units = [(v,) for v in bits(B)]
        elif q == 2:
            units = _perfect_matching(g, B)
            if units is None:
                trace.add("assemble", note="remainder has no perfect matching")
                units = _parity_repair(g, state, r, s, trace)
                if units is None:
                    raise PipelineFallback("parity of the remainder could not be repaired")
        else:
            sub, order = g.induced(list(bits(B)))
            solver = sub_solver or (lambda h, k: oracle_kr_factor(h, k))
            got = solver(sub, q)
            if got is None:
                raise PipelineFallback(f"remainder has no K_{q}-factor")
            units = [tuple(sorted(order[v] for v in m)) for m in got]
        rounds = list(range(s - 1, -1, -1))
    else:
        units = [(v,) for v in bits(state.masks[r - 1])]
        rounds = list(range(r - 2, -1, -1))
    for idx in rounds:
        part = list(bits(state.masks[idx]))
        nxt = _match_round(g, units, part)
        if nxt is None:
            raise PipelineFallback(f"contraction round for part {idx} has no perfect matching")
        units = nxt
    trace.add("assemble", units=len(units))
    return units


# driver


def solve_extremal(
    g: Graph,
    r: int,
    c: int | None = None,
    thr: Thresholds = Thresholds(),
    peel: PeelResult | None = None,
    trace: Trace | None = None,
    sub_solver: Callable[[Graph, int], list[tuple[int, ...]] | None] | None = None,
) -> Certificate:
    """Run the extremal pipeline; raises :class:`PipelineFallback` when it cannot decide."""
    trace = trace if trace is not None else Trace(path="extremal")
    n = g.n
    if n % r:
        raise ValueError("solve_extremal needs r | n")
    if c is None:
        c = math.ceil((r - 1) * n / r) - g.min_degree()
    try:
        mis = maximum_independent_set(g)
    except OracleInconclusive:
        mis = frozenset()
    if len(mis) * r > n:
        trace.add("independent-set", size=len(mis))
        return no_factor(g, r, independent_set(mis), trace)
    if peel is None:
        peel = peel_sparse_sets(g, r, thr)
    trace.add("peel", **peel.to_json())
    if peel.s == 0:
        raise PipelineFallback("no sparse n/r-set found")
    cl = classify_and_move(g, peel, r, thr, trace)
    trace.add("classify", **cl.to_json())
    bal = balance(g, cl, c, r, thr, trace)
    if isinstance(bal, dict):
        return no_factor(g, r, bal, trace)
    state = bal.state
    s = cl.s
    if s < r:
        state.b_home = mask_of(cl.partition.parts[s])
    state = clean_bad_vertices(g, state, cl.bad, r, trace)
    try:
        units = assemble(g, state, r, s, trace, sub_solver)
    except PipelineFallback:
        if s < r and r - s == 2:
            a_parts = [sorted(p) for p in cl.partition.parts[:s]]
            ev = find_component_pair(g, r, a_parts, sorted(cl.partition.parts[s]))
            if ev is None:
                ev = find_component_pair(g, r, [sorted(p) for p in peel.parts], sorted(peel.remainder))
            if ev is not None:
                trace.add("parity", parts=len(ev["parts"]))
                return no_factor(g, r, ev, trace)
        raise
    factor = state.removed + units
    if not is_factor(g, factor, r):
        raise PipelineFallback("assembled tiling failed verification")
    return found(g, r, factor, trace)
