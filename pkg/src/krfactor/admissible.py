"""Search for a small K_r-tiling whose slack matches the partition slack on ``I``.

If ``G`` has a K_r-factor ``F`` then some inclusion-minimal ``K ⊆ F`` has
``s(K)|_I = t|_I``.  Minimality makes the restricted type vectors of ``K``
zero-sum-free, and the Steinitz lemma orders them so that every prefix sum
stays within ``|I| * M`` (sup norm) of the segment from 0 to ``t|_I``.  The
candidate multisets are therefore exactly the zero-sum-free multisets that
can be grown one type at a time inside that box, which is a finite set.
Each candidate is then handed to colour coding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .colorcode import (
    Type,
    build_hash_family,
    cliques_by_type,
    exhaustive_pattern_tiling,
    find_tiling_with_pattern,
)
from .graph import Graph, Partition
from .oracle import DEFAULT_BUDGET, OracleInconclusive
from .slack import Vector, base_vector, l1, lemma_bound, partition_slack, restrict

STATE_BUDGET = 200_000


@dataclass
class AdmissibleResult:
    I: tuple[int, ...]
    target: Vector
    tiling: list[tuple[int, ...]] | None
    complete: bool
    t_I: int
    lemma_bound: int
    box: tuple[tuple[int, int], ...]
    multisets: int = 0
    tried: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def infeasible(self) -> bool:
        """No admissible tiling exists (only meaningful when the search completed)."""
        return self.complete and self.tiling is None

    def to_json(self) -> dict:
        return {
            "I": list(self.I),
            "target": list(self.target),
            "t_I": self.t_I,
            "lemma_bound": self.lemma_bound,
            "box": [list(b) for b in self.box],
            "multisets": self.multisets,
            "tried": self.tried,
            "complete": self.complete,
            "size": None if self.tiling is None else len(self.tiling),
        }


def pattern_tiling_exact(
    g: Graph, partition: Partition, pattern: Sequence[Type], budget: int = DEFAULT_BUDGET
) -> list[tuple[int, ...]] | None:
    """Colour coding, with exact backtracking to confirm a "none" when the family is only sampled."""
    if not pattern:
        return []
    r = partition.r
    k = r * len(pattern)
    if k > g.n:
        return None
    fam = build_hash_family(g.n, k)
    got = find_tiling_with_pattern(g, partition, pattern, fam, r=r)
    if got is not None or fam.exact:
        return got
    return exhaustive_pattern_tiling(g, partition, pattern, r=r, budget=budget)


def candidate_multisets(
    types: Sequence[Type],
    b: Vector,
    I: Sequence[int],
    target: Vector,
    sizes: Sequence[int],
    r: int,
    state_budget: int = STATE_BUDGET,
) -> tuple[list[tuple[int, ...]], bool, tuple[tuple[int, int], ...]]:
    """Zero-sum-free type multisets summing to ``target`` on ``I``, by size.

    Returns ``(count vectors over types, complete, box)``; ``complete`` is
    False when the state budget ran out.
    """
    vecs = [tuple(tp[i] - b[i] for i in I) for tp in types]
    d = len(I)
    M = max((max(abs(x) for x in v) for v in vecs if v), default=0)
    box = tuple((min(0, ti) - d * M, max(0, ti) + d * M) for ti in target)
    if not any(target):
        return [tuple(0 for _ in types)], True, box

    def in_box(v: Vector) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(v, box))

    n = sum(sizes)
    empty = tuple(0 for _ in types)
    zero = tuple(0 for _ in I)
    frontier: dict[tuple[int, ...], tuple[Vector, frozenset[Vector], tuple[int, ...]]] = {
        empty: (zero, frozenset(), tuple(0 for _ in sizes))
    }
    found: list[tuple[int, ...]] = []
    states = 1
    size = 0
    while frontier:
        size += 1
        if size * r > n:
            break
        nxt: dict[tuple[int, ...], tuple[Vector, frozenset[Vector], tuple[int, ...]]] = {}
        for counts in sorted(frontier):
            total, sums, used = frontier[counts]
            if total == target and any(counts):
                continue
            for ti, v in enumerate(vecs):
                if not any(v):
                    continue
                neg = tuple(-x for x in v)
                if neg in sums:
                    continue
                new_total = tuple(x + y for x, y in zip(total, v))
                if not in_box(new_total):
                    continue
                new_used = tuple(u + x for u, x in zip(used, types[ti]))
                if any(u > cap for u, cap in zip(new_used, sizes)):
                    continue
                nc = counts[:ti] + (counts[ti] + 1,) + counts[ti + 1:]
                if nc in nxt:
                    continue
                new_sums = sums | {v} | {tuple(x + y for x, y in zip(s, v)) for s in sums}
                nxt[nc] = (new_total, frozenset(new_sums), new_used)
                states += 1
                if states > state_budget:
                    return found, False, box
        for counts in sorted(nxt):
            if nxt[counts][0] == target:
                found.append(counts)
        frontier = nxt
    return found, True, box


def find_admissible_tiling(
    g: Graph,
    partition: Partition,
    I: Sequence[int],
    target: Vector | None = None,
    state_budget: int = STATE_BUDGET,
    search_budget: int = DEFAULT_BUDGET,
) -> AdmissibleResult:
    """Smallest-first search for ``K`` with ``s(K)|_I = target`` (default: the partition slack)."""
    r = partition.r
    I = tuple(sorted(set(I)))
    if target is None:
        target = restrict(partition_slack(partition), I)
    target = tuple(target)
    b = base_vector(r, len(partition.parts))
    t_I = l1(target)
    present = sorted(cliques_by_type(g, partition, r))
    counts_list, complete, box = candidate_multisets(present, b, I, target, partition.sizes, r, state_budget)
    res = AdmissibleResult(I, target, None, complete, t_I, lemma_bound(t_I, r), box, multisets=len(counts_list))
    for counts in counts_list:
        pattern = [tp for tp, x in zip(present, counts) for _ in range(x)]
        res.tried += 1
        try:
            got = pattern_tiling_exact(g, partition, pattern, budget=search_budget)
        except OracleInconclusive:
            res.complete = False
            res.notes.append(f"pattern of size {len(pattern)} undecided within budget")
            continue
        if got is not None:
            res.tiling = got
            return res
    return res
