"""Dense undirected graphs, vertex partitions and the edge-list text format.

Adjacency is stored as one Python ``int`` bitmask per vertex, so neighbourhood
intersections (the workhorse of every clique search here) are single ``&``
operations.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


class GraphParseError(ValueError):
    """Raised when an edge-list document is malformed."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvalidVertexError(ValueError):
    pass


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the set bits of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.adj) != self.n:
            raise ValueError("adjacency length must equal n")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
            if row & ~full:
                raise ValueError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            for u in bits(row):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidVertexError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def min_degree(self) -> int:
        if self.n == 0:
            return 0
        return min(popcount(row) for row in self.adj)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    def edge_count(self) -> int:
        return sum(popcount(row) for row in self.adj) // 2

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        m = self._checked_mask(vertices)
        return sum(popcount(self.adj[v] & m) for v in bits(m)) // 2

    def is_clique(self, vertices: Sequence[int]) -> bool:
        vs = list(vertices)
        for i, u in enumerate(vs):
            row = self.adj[u]
            for v in vs[i + 1:]:
                if not row >> v & 1:
                    return False
        return True

    def is_independent(self, vertices: Iterable[int]) -> bool:
        m = self._checked_mask(vertices)
        return all(not (self.adj[v] & m) for v in bits(m))

    def common_neighbors(self, vertices: Iterable[int]) -> int:
        m = self.all_mask
        for v in vertices:
            m &= self.adj[v]
        return m

    def induced(self, vertices: Sequence[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled to 0..k-1; also returns the new->old map."""
        order = sorted(set(vertices))
        self._checked_mask(order)
        index = {v: i for i, v in enumerate(order)}
        rows = []
        for v in order:
            rows.append(mask_of(index[u] for u in bits(self.adj[v]) if u in index))
        return Graph(len(order), tuple(rows)), order

    def digest(self) -> str:
        return hashlib.sha256(dump_graph(self).encode()).hexdigest()

    def _checked_mask(self, vertices: Iterable[int]) -> int:
        m = 0
        for v in vertices:
            if not isinstance(v, int) or not 0 <= v < self.n:
                raise InvalidVertexError(f"invalid vertex id {v!r} for n={self.n}")
            m |= 1 << v
        return m


@dataclass(frozen=True)
class Partition:
    """Ordered vertex partition ``(A_1, ..., A_s, B)``.

    ``s`` counts the sparse parts; when ``len(parts) == s`` there is no
    remainder part.
    """

    parts: tuple[frozenset[int], ...]
    r: int
    s: int
    allow_empty: bool = field(default=False, compare=False)

    @classmethod
    def of(cls, parts: Iterable[Iterable[int]], r: int, s: int | None = None, allow_empty: bool = False) -> Partition:
        ps = tuple(frozenset(p) for p in parts)
        return cls(ps, r, len(ps) - 1 if s is None else s, allow_empty)

    def validate(self, n: int) -> None:
        seen: set[int] = set()
        for i, p in enumerate(self.parts):
            if not p and not self.allow_empty:
                raise ValueError(f"part {i} is empty")
            for v in p:
                if not 0 <= v < n:
                    raise InvalidVertexError(f"invalid vertex id {v} in part {i}")
            if seen & p:
                raise ValueError(f"part {i} overlaps an earlier part")
            seen |= p
        if len(seen) != n:
            raise ValueError("parts do not cover the vertex set")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    def part_index(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}

    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(p) for p in self.parts)


Tiling = list[tuple[int, ...]]


def load_graph(text: str) -> Graph:
    """Parse the ``n m`` header + ``u v`` edge-list format (duplicates collapse)."""
    lines = text.splitlines()
    pos = 0
    while pos < len(lines) and not lines[pos].strip():
        pos += 1
    if pos == len(lines):
        raise GraphParseError(1, "missing header 'n m'")
    header = lines[pos].split()
    if len(header) != 2 or not all(tok.lstrip("-").isdigit() for tok in header):
        raise GraphParseError(pos + 1, f"expected header 'n m', got {lines[pos]!r}")
    n, m = int(header[0]), int(header[1])
    if n < 0 or m < 0:
        raise GraphParseError(pos + 1, "n and m must be non-negative")
    edges = []
    seen = 0
    for lineno in range(pos + 2, len(lines) + 1):
        raw = lines[lineno - 1].strip()
        if not raw:
            continue
        toks = raw.split()
        if len(toks) != 2 or not all(tok.lstrip("-").isdigit() for tok in toks):
            raise GraphParseError(lineno, f"expected 'u v', got {raw!r}")
        u, v = int(toks[0]), int(toks[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(lineno, f"vertex out of range in {raw!r} (n={n})")
        if u == v:
            raise GraphParseError(lineno, f"self-loop at vertex {u}")
        edges.append((u, v))
        seen += 1
    if seen != m:
        raise GraphParseError(len(lines), f"header declares {m} edges, found {seen}")
    return Graph.from_edges(n, edges)


def dump_graph(g: Graph) -> str:
    """Canonical edge-list form: sorted ``u < v`` pairs."""
    es = g.edges()
    out = [f"{g.n} {len(es)}"]
    out.extend(f"{u} {v}" for u, v in es)
    return "\n".join(out) + "\n"


def read_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_graph(fh.read())


def write_graph(g: Graph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_graph(g))


def is_sparse_set(g: Graph, vertices: Iterable[int], gamma: Fraction | int | str) -> bool:
    """True iff the induced edge count is below ``gamma * n**2``."""
    gamma = Fraction(gamma)
    return g.induced_edge_count(vertices) < gamma * g.n * g.n


def tiling_violation(g: Graph, tiling: Iterable[Sequence[int]], r: int) -> str | None:
    """First reason ``tiling`` is not a K_r-tiling of ``g``, or ``None``."""
    used: set[int] = set()
    for idx, member in enumerate(tiling):
        vs = list(member)
        if len(vs) != r or len(set(vs)) != r:
            return f"member {idx} has {len(set(vs))} distinct vertices, expected {r}"
        for v in vs:
            if not isinstance(v, int) or not 0 <= v < g.n:
                return f"member {idx} contains invalid vertex {v!r}"
        if not g.is_clique(vs):
            return f"member {idx} {tuple(vs)} is not a clique"
        overlap = used.intersection(vs)
        if overlap:
            return f"member {idx} reuses vertex {min(overlap)}"
        used.update(vs)
    return None


def verify_tiling(g: Graph, tiling: Iterable[Sequence[int]], r: int) -> bool:
    return tiling_violation(g, tiling, r) is None


def is_factor(g: Graph, tiling: Sequence[Sequence[int]], r: int) -> bool:
    return verify_tiling(g, tiling, r) and r * len(tiling) == g.n


def degree_profile(g: Graph, vertices: Iterable[int]) -> list[int]:
    """``d_A(v)`` for every vertex ``v``."""
    m = g._checked_mask(vertices)
    return [popcount(row & m) for row in g.adj]
