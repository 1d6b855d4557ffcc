"""Seeded instance families with recorded ground truth.

Every generator builds its structure on positional labels and then shuffles
vertex ids under the seed, so planted parts are never contiguous ranges.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from typing import Any

from .graph import Graph, verify_tiling

KINDS = ("extremal", "planted-sparse", "random-dense", "planted-tiling", "multipartite")


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int
    r: int
    c: int = 0
    s: int = 1
    seed: int = 0
    noise: float = 0.0
    part_sizes: tuple[int, ...] | None = None

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise GenerationError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.r < 2:
            raise GenerationError("r must be at least 2")
        if self.n < 1:
            raise GenerationError("n must be positive")
        if not 0.0 <= self.noise <= 1.0:
            raise GenerationError("noise must lie in [0, 1]")
        if self.kind in ("extremal", "planted-sparse", "planted-tiling") and self.n % self.r:
            raise GenerationError(f"{self.kind} needs r | n (n={self.n}, r={self.r})")


@dataclass
class Instance:
    graph: Graph
    spec: GenSpec
    meta: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        spec = asdict(self.spec)
        if spec["part_sizes"] is not None:
            spec["part_sizes"] = list(spec["part_sizes"])
        return {"spec": spec, **self.meta}


def _relabel(n: int, edges: list[tuple[int, int]], rng: random.Random) -> tuple[Graph, list[int]]:
    perm = list(range(n))
    rng.shuffle(perm)
    g = Graph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])
    return g, perm


def _extremal(spec: GenSpec, rng: random.Random) -> Instance:
    n, r = spec.n, spec.r
    excess = max(spec.c, 1)
    hollow = n // r + excess
    if hollow > n:
        raise GenerationError("hollow set larger than the graph")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if v >= hollow]
    g, perm = _relabel(n, edges, rng)
    hollow_set = sorted(perm[u] for u in range(hollow))
    return Instance(g, spec, {"answer": "NoFactor", "hollow_set": hollow_set})


def _multipartite(spec: GenSpec, rng: random.Random) -> Instance:
    n, r = spec.n, spec.r
    sizes = spec.part_sizes
    if sizes is None:
        if n % r:
            raise GenerationError("equal parts need r | n; pass part_sizes")
        sizes = (n // r,) * r
    if sum(sizes) != n or min(sizes) < 1:
        raise GenerationError(f"part sizes {sizes} do not sum to n={n}")
    owner = [i for i, sz in enumerate(sizes) for _ in range(sz)]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if owner[u] != owner[v]]
    g, perm = _relabel(n, edges, rng)
    parts = [sorted(perm[u] for u in range(n) if owner[u] == i) for i in range(len(sizes))]
    answer = None
    if len(sizes) == r:
        answer = "FactorExists" if n % r == 0 and all(sz == n // r for sz in sizes) else "NoFactor"
    return Instance(g, spec, {"answer": answer, "planted_parts": parts})


def _planted_tiling(spec: GenSpec, rng: random.Random) -> Instance:
    n, r = spec.n, spec.r
    density = 1.0 - spec.noise
    edges = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density}
    order = list(range(n))
    rng.shuffle(order)
    tiling = [sorted(order[i:i + r]) for i in range(0, n, r)]
    for member in tiling:
        for i, u in enumerate(member):
            for v in member[i + 1:]:
                edges.add((u, v))
    g, perm = _relabel(n, sorted(edges), rng)
    recorded = [tuple(sorted(perm[u] for u in m)) for m in tiling]
    recorded.sort()
    if not verify_tiling(g, recorded, r):
        raise GenerationError("planted tiling failed self-check")
    return Instance(g, spec, {"answer": "FactorExists", "planted_tiling": [list(m) for m in recorded]})


def _random_dense(spec: GenSpec, rng: random.Random) -> Instance:
    """Delete edges of K_n in random order, each with probability ``noise``,
    never letting a degree drop below ``ceil((1-1/r)n) - c``."""
    n, r = spec.n, spec.r
    target = math.ceil((r - 1) * n / r) - spec.c
    if target > n - 1:
        raise GenerationError(f"min degree {target} unattainable on {n} vertices")
    deg = [n - 1] * n
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)
    kept = []
    for u, v in pairs:
        if deg[u] > target and deg[v] > target and rng.random() < spec.noise:
            deg[u] -= 1
            deg[v] -= 1
        else:
            kept.append((u, v))
    g, _ = _relabel(n, kept, rng)
    if g.min_degree() < target:
        raise GenerationError("degree floor violated")
    return Instance(g, spec, {"answer": None, "min_degree_target": target})


def _planted_sparse(spec: GenSpec, rng: random.Random) -> Instance:
    """``s`` near-independent parts (edge prob ``noise`` inside), everything else
    complete except cross edges dropped with probability ``noise / 4``.

    The first part has ``n/r + c`` vertices; when ``s == r`` the last part
    shrinks by ``c`` to compensate, otherwise the remainder does.
    """
    n, r, s, c = spec.n, spec.r, spec.s, spec.c
    if not 1 <= s <= r:
        raise GenerationError("planted-sparse needs 1 <= s <= r")
    sizes = [n // r] * s
    sizes[0] += c
    if s == r:
        sizes[-1] -= c
        rest = 0
    else:
        rest = n - sum(sizes)
    if min(sizes) < 1 or rest < 0 or (s < r and rest < 1):
        raise GenerationError(f"part sizes {sizes} (+{rest}) infeasible")
    owner = [i for i, sz in enumerate(sizes) for _ in range(sz)] + [s] * rest
    cross = spec.noise / 4
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if owner[u] == owner[v] and owner[u] < s:
                if rng.random() < spec.noise:
                    edges.append((u, v))
            elif rng.random() >= cross:
                edges.append((u, v))
    g, perm = _relabel(n, edges, rng)
    parts = [sorted(perm[u] for u in range(n) if owner[u] == i) for i in range(s)]
    remainder = sorted(perm[u] for u in range(n) if owner[u] == s)
    answer = None
    if spec.noise == 0:
        answer = "FactorExists" if c == 0 else "NoFactor"
    return Instance(g, spec, {"answer": answer, "planted_parts": parts, "remainder": remainder})


_BUILDERS = {
    "extremal": _extremal,
    "multipartite": _multipartite,
    "planted-tiling": _planted_tiling,
    "random-dense": _random_dense,
    "planted-sparse": _planted_sparse,
}


def generate(spec: GenSpec) -> Instance:
    spec.validate()
    rng = random.Random(f"{spec.kind}:{spec.n}:{spec.r}:{spec.c}:{spec.s}:{spec.seed}:{spec.noise}")
    return _BUILDERS[spec.kind](spec, rng)
