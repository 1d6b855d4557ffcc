"""Maximum matchings in general and bipartite graphs, with Tutte-set certificates.

The general matcher is Edmonds' blossom algorithm in its compact
"base array" form: blossoms are never materialised as new vertices, each
vertex instead records the base of the outermost blossom containing it.
Augmenting-path searches run from exposed vertices in ascending order and
scan neighbours in ascending order, so results are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .graph import Graph, bits


@dataclass(frozen=True)
class Matching:
    edges: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.edges)

    def mate_map(self) -> dict[int, int]:
        out = {}
        for u, v in self.edges:
            out[u] = v
            out[v] = u
        return out


@dataclass(frozen=True)
class TutteSet:
    """``S`` together with the odd components of ``G - S`` (more of them than ``|S|``)."""

    S: frozenset[int]
    odd_components: tuple[frozenset[int], ...]

    @property
    def deficiency(self) -> int:
        return len(self.odd_components) - len(self.S)


class _Blossom:
    def __init__(self, g: Graph) -> None:
        self.g = g
        self.n = g.n
        self.match = [-1] * g.n

    def _lca(self, a: int, b: int, base: list[int], p: list[int]) -> int:
        seen = [False] * self.n
        match = self.match
        while True:
            a = base[a]
            seen[a] = True
            if match[a] == -1:
                break
            a = p[match[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = p[match[b]]

    def _mark_path(self, v: int, b: int, child: int, base: list[int], p: list[int], blossom: list[bool]) -> None:
        match = self.match
        while base[v] != b:
            blossom[base[v]] = blossom[base[match[v]]] = True
            p[v] = child
            child = match[v]
            v = p[match[v]]

    def search(self, roots: Sequence[int]) -> tuple[int, list[int], list[bool]]:
        """Grow an alternating forest from ``roots``.

        Returns ``(endpoint, parent, outer)``; ``endpoint`` is an exposed
        vertex closing an augmenting path, or -1 when the forest is stuck.
        """
        n, adj, match = self.n, self.g.adj, self.match
        used = [False] * n
        p = [-1] * n
        base = list(range(n))
        is_root = [False] * n
        q: deque[int] = deque()
        for rt in roots:
            used[rt] = True
            is_root[rt] = True
            q.append(rt)
        while q:
            v = q.popleft()
            for to in bits(adj[v]):
                if base[v] == base[to] or match[v] == to:
                    continue
                if is_root[to] or (match[to] != -1 and p[match[to]] != -1):
                    cur = self._lca(v, to, base, p)
                    blossom = [False] * n
                    self._mark_path(v, cur, to, base, p, blossom)
                    self._mark_path(to, cur, v, base, p, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        return to, p, used
                    mate = match[to]
                    used[mate] = True
                    q.append(mate)
        return -1, p, used

    def augment(self, end: int, p: list[int]) -> None:
        v = end
        while v != -1:
            pv = p[v]
            nxt = self.match[pv]
            self.match[v] = pv
            self.match[pv] = v
            v = nxt

    def run(self) -> None:
        for root in range(self.n):
            if self.match[root] == -1:
                end, p, _ = self.search([root])
                if end != -1:
                    self.augment(end, p)

    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u, v in enumerate(self.match) if v > u)


def max_matching(g: Graph) -> Matching:
    b = _Blossom(g)
    b.run()
    return Matching(b.edges())


def gallai_edmonds(g: Graph) -> tuple[Matching, frozenset[int], frozenset[int], frozenset[int]]:
    """Maximum matching plus the Gallai-Edmonds sets ``(D, A, C)``.

    ``D`` holds the vertices missed by some maximum matching; they are exactly
    the outer vertices of the final (stuck) forest grown from all exposed
    vertices at once.
    """
    b = _Blossom(g)
    b.run()
    exposed = [v for v in range(g.n) if b.match[v] == -1]
    end, _, outer = b.search(exposed)
    if end != -1:
        raise AssertionError("augmenting path survived a maximum matching")
    d = frozenset(v for v in range(g.n) if outer[v])
    dmask = 0
    for v in d:
        dmask |= g.adj[v]
    a = frozenset(v for v in bits(dmask) if v not in d)
    c = frozenset(range(g.n)) - d - a
    return Matching(b.edges()), d, a, c


def components(g: Graph, vertices: Iterable[int]) -> list[frozenset[int]]:
    """Connected components of ``g[vertices]``, ordered by smallest vertex."""
    remaining = 0
    for v in vertices:
        remaining |= 1 << v
    out = []
    while remaining:
        start = remaining & -remaining
        comp = start
        frontier = start
        remaining ^= start
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= g.adj[v]
            nxt &= remaining
            remaining ^= nxt
            comp |= nxt
            frontier = nxt
        out.append(frozenset(bits(comp)))
    return out


def odd_components(g: Graph, removed: Iterable[int]) -> list[frozenset[int]]:
    removed = set(removed)
    rest = [v for v in range(g.n) if v not in removed]
    return [c for c in components(g, rest) if len(c) % 2 == 1]


def is_valid_tutte_set(g: Graph, ts: TutteSet) -> bool:
    """Independent re-check: listed sets are odd components of ``G - S`` and outnumber ``S``."""
    if any(not 0 <= v < g.n for v in ts.S):
        return False
    actual = {c for c in odd_components(g, ts.S)}
    listed = set(ts.odd_components)
    if len(listed) != len(ts.odd_components) or not listed <= actual:
        return False
    return len(listed) > len(ts.S)


def perfect_matching_or_certificate(g: Graph) -> Matching | TutteSet:
    if g.n % 2 == 1:
        return TutteSet(frozenset(), tuple(odd_components(g, ())))
    m, _, a, _ = gallai_edmonds(g)
    if 2 * len(m) == g.n:
        return m
    return TutteSet(a, tuple(odd_components(g, a)))


def bipartite_max_matching(
    left: Sequence[Hashable],
    right: Sequence[Hashable],
    adjacent: Callable[[Hashable, Hashable], bool],
) -> list[tuple[Hashable, Hashable]]:
    """Maximum bipartite matching by repeated augmenting paths (Kuhn).

    Vertices on each side are tried in the order given; returns
    ``(left, right)`` pairs.
    """
    if set(left) & set(right):
        raise ValueError("left and right sides must be disjoint")
    nbrs = [[j for j, w in enumerate(right) if adjacent(u, w)] for u in left]
    owner = [-1] * len(right)

    def try_augment(i: int, seen: list[bool]) -> bool:
        stack = [(i, iter(nbrs[i]))]
        path: list[tuple[int, int]] = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for j in it:
                if seen[j]:
                    continue
                seen[j] = True
                if owner[j] == -1:
                    path.append((u, j))
                    for uu, jj in path:
                        owner[jj] = uu
                    return True
                path.append((u, j))
                stack.append((owner[j], iter(nbrs[owner[j]])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
        return False

    for i in range(len(left)):
        try_augment(i, [False] * len(right))
    pairs = [(left[owner[j]], right[j]) for j in range(len(right)) if owner[j] != -1]
    order = {u: i for i, u in enumerate(left)}
    pairs.sort(key=lambda pr: order[pr[0]])
    return pairs
