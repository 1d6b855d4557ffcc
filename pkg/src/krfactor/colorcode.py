"""Perfect hash families and pattern-constrained K_r-tiling search by colour coding.

A *type* is the index vector of one clique with respect to an ordered
partition; a *pattern* lists one type per tiling member.  The search runs a
dynamic program over disjoint unions of colour classes, once per colouring in
a perfect hash family, so "no tiling" answers are exact whenever the family's
injectivity guarantee was verified exhaustively.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .graph import Graph, Partition, mask_of, verify_tiling
from .oracle import DEFAULT_BUDGET, OracleInconclusive, iter_cliques

EXHAUSTIVE_LIMIT = 1_200_000
SAMPLE_CHECKS = 4000

Type = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PerfectHashFamily:
    """Colourings ``[n] -> [palette]``; some member is injective on every k-subset.

    ``verified`` is ``"exhaustive"`` when every k-subset was checked at build
    time, ``"sampled"`` when only random k-subsets were (large ``C(n, k)``).
    """

    n: int
    k: int
    palette: int
    functions: np.ndarray
    verified: str
    size_constant: float

    def __len__(self) -> int:
        return len(self.functions)

    def injective_on(self, subset: Sequence[int]) -> list[int]:
        cols = self.functions[:, list(subset)]
        return [i for i, row in enumerate(cols) if len(set(row.tolist())) == len(subset)]

    @property
    def exact(self) -> bool:
        return self.verified == "exhaustive"

    @staticmethod
    def envelope(k: int, n: int) -> float:
        """``2^{|X|} * log2(n)^2`` with ``|X| = 2k``."""
        return 2.0 ** (2 * k) * max(1.0, math.log2(max(n, 2))) ** 2


def _next_prime(m: int) -> int:
    m = max(m, 2)
    while True:
        if all(m % d for d in range(2, math.isqrt(m) + 1)):
            return m
        m += 1


def _candidates(n: int, palette: int, seed: int) -> Iterator[np.ndarray]:
    """Affine maps mod a prime folded onto the palette, then seeded random maps."""
    p = _next_prime(n)
    xs = np.arange(n, dtype=np.int64)
    for a in range(1, p):
        for b in range(p):
            yield (((a * xs + b) % p) % palette).astype(np.uint8)
    rng = np.random.default_rng(seed)
    while True:
        yield rng.integers(0, palette, size=n, dtype=np.uint8)


def _injective_rows(fn: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    pw = np.left_shift(np.int64(1), fn[subsets].astype(np.int64))
    return pw.sum(axis=1) == np.bitwise_or.reduce(pw, axis=1)


def _cover(subsets: np.ndarray, n: int, palette: int, seed: int, min_size: int = 0) -> list[np.ndarray]:
    uncovered = subsets
    chosen: list[np.ndarray] = []
    for fn in _candidates(n, palette, seed):
        if len(uncovered) == 0 and len(chosen) >= min_size:
            break
        if len(uncovered) == 0:
            chosen.append(fn)
            continue
        hit = _injective_rows(fn, uncovered)
        if hit.any():
            chosen.append(fn)
            uncovered = uncovered[~hit]
    return chosen


@lru_cache(maxsize=64)
def build_hash_family(n: int, k: int, seed: int = 0) -> PerfectHashFamily:
    """Explicit (n, k)-perfect hash family over a palette of ``2k`` colours.

    Candidates are taken greedily (first fit) until every k-subset has an
    injective member; with too many subsets to list, the family is sized by a
    union bound and checked on random k-subsets instead.
    """
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    palette = 2 * k
    if palette > 62:
        raise ValueError("palette too large for 64-bit colour masks")
    total = math.comb(n, k)
    if k == 1:
        fns = [np.zeros(n, dtype=np.uint8)]
        verified = "exhaustive"
    elif total <= EXHAUSTIVE_LIMIT:
        subsets = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(n), k)), dtype=np.int16, count=total * k
        ).reshape(total, k)
        fns = _cover(subsets, n, palette, seed)
        verified = "exhaustive"
    else:
        p_inj = math.perm(palette, k) / palette**k
        target = math.ceil((math.log(total) + math.log(1000)) / p_inj)
        rng = random.Random(seed)
        sample = np.array([rng.sample(range(n), k) for _ in range(SAMPLE_CHECKS)], dtype=np.int16)
        fns = _cover(sample, n, palette, seed, min_size=target)
        verified = "sampled"
    arr = np.stack(fns)
    const = len(arr) / PerfectHashFamily.envelope(k, n)
    return PerfectHashFamily(n, k, palette, arr, verified, const)


def enumerate_types(r: int, rprime: int) -> list[Type]:
    """All non-negative ``rprime``-vectors summing to ``r``, lexicographically."""
    if not 1 <= rprime:
        raise ValueError("rprime must be positive")

    def rec(left: int, slots: int) -> Iterator[Type]:
        if slots == 1:
            yield (left,)
            return
        for first in range(left + 1):
            for tail in rec(left - first, slots - 1):
                yield (first,) + tail

    return list(rec(r, rprime))


def enumerate_pattern_multisets(r: int, rprime: int, bound: int) -> list[tuple[int, ...]]:
    """Type-count vectors ``(x_1..x_y)`` with ``sum x_i <= bound``; there are ``C(bound+y, y)``."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    y = len(enumerate_types(r, rprime))
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], left: int) -> None:
        if len(prefix) == y:
            out.append(prefix)
            return
        for x in range(left + 1):
            rec(prefix + (x,), left - x)

    rec((), bound)
    return out


def clique_type(clique: Sequence[int], part_of: dict[int, int], nparts: int) -> Type:
    counts = [0] * nparts
    for v in clique:
        counts[part_of[v]] += 1
    return tuple(counts)


@lru_cache(maxsize=32)
def cliques_by_type(g: Graph, partition: Partition, r: int) -> dict[Type, np.ndarray]:
    part_of = partition.part_index()
    nparts = len(partition.parts)
    grouped: dict[Type, list[tuple[int, ...]]] = {}
    for cl in iter_cliques(g, r):
        grouped.setdefault(clique_type(cl, part_of, nparts), []).append(cl)
    return {t: np.array(cls, dtype=np.int64).reshape(-1, r) for t, cls in grouped.items()}


def _colour_classes(fn: np.ndarray, cliques: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rainbow colour masks of ``cliques`` under ``fn`` and a witness row for each."""
    pw = np.left_shift(np.int64(1), fn[cliques].astype(np.int64))
    masks = np.bitwise_or.reduce(pw, axis=1)
    ok = np.flatnonzero(pw.sum(axis=1) == masks)
    if len(ok) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    uniq, first = np.unique(masks[ok], return_index=True)
    return uniq, ok[first]


def _extend(level: np.ndarray, opts: np.ndarray, chunk: int = 1 << 21) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All disjoint unions ``level[i] | opts[j]``, each union kept once (first pair wins)."""
    unions, parents, choices = [], [], []
    rows = max(1, chunk // max(1, len(opts)))
    for lo in range(0, len(level), rows):
        blk = level[lo:lo + rows]
        free = (blk[:, None] & opts[None, :]) == 0
        ii, jj = np.nonzero(free)
        unions.append(blk[ii] | opts[jj])
        parents.append(ii + lo)
        choices.append(jj)
    if not unions:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty
    u = np.concatenate(unions)
    p = np.concatenate(parents)
    c = np.concatenate(choices)
    keep = np.sort(np.unique(u, return_index=True)[1])
    return u[keep], p[keep], c[keep]


def find_tiling_with_pattern(
    g: Graph,
    partition: Partition,
    pattern: Sequence[Type],
    family: PerfectHashFamily | None = None,
    r: int | None = None,
) -> list[tuple[int, ...]] | None:
    """A K_r-tiling whose i-th member has type ``pattern[i]``, or ``None``.

    Functions are tried in family order and the first success is returned,
    so the answer is deterministic.
    """
    if not pattern:
        return []
    pattern = [tuple(t) for t in pattern]
    r = sum(pattern[0]) if r is None else r
    nparts = len(partition.parts)
    for t in pattern:
        if len(t) != nparts or sum(t) != r or min(t) < 0:
            raise ValueError(f"type {t} is not an index vector of a K_{r} over {nparts} parts")
    m = len(pattern)
    if r * m > g.n:
        return None
    by_type = cliques_by_type(g, partition, r)
    if any(t not in by_type for t in pattern):
        return None
    need = {t: pattern.count(t) for t in set(pattern)}
    if any(len(by_type[t]) < cnt for t, cnt in need.items()):
        return None
    if family is None:
        family = build_hash_family(g.n, r * m)
    for fn in family.functions:
        classes = {t: _colour_classes(fn, by_type[t]) for t in need}
        if any(len(classes[t][0]) == 0 for t in need):
            continue
        masks0, wit0 = classes[pattern[0]]
        levels = [(masks0, np.full(len(masks0), -1), np.arange(len(masks0)))]
        cur = masks0
        for j in range(1, m):
            opts, _ = classes[pattern[j]]
            cur, parent, choice = _extend(cur, opts)
            if len(cur) == 0:
                break
            levels.append((cur, parent, choice))
        if len(levels) < m or len(cur) == 0:
            continue
        idx = 0
        chosen: list[tuple[int, ...]] = []
        for j in range(m - 1, -1, -1):
            _, parent, choice = levels[j]
            _, wit = classes[pattern[j]]
            row = by_type[pattern[j]][wit[choice[idx]]]
            chosen.append(tuple(int(v) for v in row))
            idx = parent[idx]
        chosen.reverse()
        if not verify_tiling(g, chosen, r):
            raise AssertionError("colour-coding produced an invalid tiling")
        return chosen
    return None


def pattern_conforms(
    g: Graph, partition: Partition, tiling: Sequence[Sequence[int]], pattern: Sequence[Type]
) -> bool:
    if len(tiling) != len(pattern):
        return False
    part_of = partition.part_index()
    nparts = len(partition.parts)
    return all(clique_type(cl, part_of, nparts) == tuple(t) for cl, t in zip(tiling, pattern))


def exhaustive_pattern_tiling(
    g: Graph, partition: Partition, pattern: Sequence[Type], r: int | None = None, budget: int = DEFAULT_BUDGET
) -> list[tuple[int, ...]] | None:
    """Backtracking reference for :func:`find_tiling_with_pattern`.

    Raises :class:`OracleInconclusive` when more than ``budget`` nodes are needed.
    """
    if not pattern:
        return []
    pattern = [tuple(t) for t in pattern]
    r = sum(pattern[0]) if r is None else r
    by_type = {t: [tuple(int(v) for v in row) for row in arr] for t, arr in cliques_by_type(g, partition, r).items()}
    order = sorted(range(len(pattern)), key=lambda i: len(by_type.get(pattern[i], ())))

    nodes = 0

    def rec(pos: int, used: int, acc: dict[int, tuple[int, ...]]) -> dict[int, tuple[int, ...]] | None:
        nonlocal nodes
        if pos == len(order):
            return acc
        nodes += 1
        if nodes > budget:
            raise OracleInconclusive(f"pattern backtracking exceeded {budget} nodes")
        i = order[pos]
        # members of equal type are interchangeable: keep them in increasing order
        prev = [acc[j] for j in order[:pos] if pattern[j] == pattern[i]]
        floor = max(prev) if prev else None
        for cl in by_type.get(pattern[i], ()):
            if floor is not None and cl <= floor:
                continue
            cm = mask_of(cl)
            if used & cm:
                continue
            acc[i] = cl
            got = rec(pos + 1, used | cm, acc)
            if got is not None:
                return got
            del acc[i]
        return None

    got = rec(0, 0, {})
    if got is None:
        return None
    return [got[i] for i in range(len(pattern))]
