"""Index vectors, slacks, and the three slack-manipulation procedures.

Coordinates are 0-based throughout: the last part plays the role of ``B``
and carries weight ``r - r' + 1`` in the base vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import Partition

Vector = tuple[int, ...]


class SlackReductionError(RuntimeError):
    """No copy keeps the running slack inside the allowed window (corrupt input)."""


def base_vector(r: int, rprime: int) -> Vector:
    if not 1 <= rprime <= r:
        raise ValueError(f"need 1 <= r' <= r, got r={r}, r'={rprime}")
    return (1,) * (rprime - 1) + (r - rprime + 1,)


def index_vector(partition: Partition, tiling: Iterable[Sequence[int]]) -> Vector:
    part_of = partition.part_index()
    counts = [0] * len(partition.parts)
    for member in tiling:
        for v in member:
            counts[part_of[v]] += 1
    return tuple(counts)


def slack(partition: Partition, tiling: Sequence[Sequence[int]]) -> Vector:
    """``i(T) - |T| * b``."""
    b = base_vector(partition.r, len(partition.parts))
    iv = index_vector(partition, tiling)
    f = len(tiling)
    return tuple(x - f * bi for x, bi in zip(iv, b))


def partition_slack(partition: Partition) -> Vector:
    """``(|V_1|, ..., |V_r'|) - (n/r) * b``; needs ``r | n``."""
    n = sum(partition.sizes)
    if n % partition.r:
        raise ValueError(f"partition slack needs r | n (n={n}, r={partition.r})")
    q = n // partition.r
    b = base_vector(partition.r, len(partition.parts))
    return tuple(sz - q * bi for sz, bi in zip(partition.sizes, b))


def restrict(v: Sequence[int], I: Iterable[int]) -> Vector:
    return tuple(v[i] for i in sorted(I))


def l1(v: Iterable[int]) -> int:
    return sum(abs(x) for x in v)


def copy_kind(partition: Partition, clique: Sequence[int]) -> tuple[str, tuple[int, int] | None]:
    """``("balanced", None)``, ``("ij", (i, j))`` for an (i,j)-copy, or ``("other", None)``."""
    s = slack(partition, [clique])
    if not any(s):
        return "balanced", None
    plus = [i for i, x in enumerate(s) if x == 1]
    minus = [i for i, x in enumerate(s) if x == -1]
    if len(plus) == 1 and len(minus) == 1 and l1(s) == 2:
        return "ij", (plus[0], minus[0])
    return "other", None


def lemma_bound(t_I: int, r: int) -> int:
    """``(3 t_I)^r``, the advertised size bound for a slack-preserving sub-tiling."""
    return (3 * t_I) ** r


def window_bound(t_I: int, r: int, d: int) -> int:
    """``(2(t_I + 2(r-1)) + 1)^d``: distinct running slacks the reduction can visit."""
    return (2 * (t_I + 2 * (r - 1)) + 1) ** d


def reduce_slack(
    K: Sequence[Sequence[int]], I: Iterable[int], partition: Partition
) -> list[tuple[int, ...]]:
    """Sub-tiling ``K' ⊆ K`` with the same slack on ``I`` and pairwise distinct prefix slacks.

    Copies are taken in the order given; when the running slack is outside
    the ``t_I`` ball the lowest-index copy that keeps it within
    ``t_I + 2(r-1)`` is taken.  After each step the tail after the first
    prefix with equal restricted slack (the empty prefix included) is dropped.
    """
    I = sorted(set(I))
    r = partition.r
    members = [tuple(m) for m in K]
    covered = sorted(v for m in members for v in m)
    if covered != sorted(v for p in partition.parts for v in p):
        raise ValueError("K must be a K_r-factor of the partitioned vertex set")
    if any(len(m) != r for m in members):
        raise ValueError(f"every member of K must have {r} vertices")
    b = base_vector(r, len(partition.parts))
    part_of = partition.part_index()

    def s_of(m: tuple[int, ...]) -> Vector:
        counts = [0] * len(b)
        for v in m:
            counts[part_of[v]] += 1
        return tuple(counts[i] - b[i] for i in I)

    vecs = [s_of(m) for m in members]
    t_I = l1(map(sum, zip(*vecs))) if vecs else 0
    cap = t_I + 2 * (r - 1)

    remaining = list(range(len(members)))
    Q: list[int] = []
    prefix: list[Vector] = [(0,) * len(I)]

    def plus(a: Vector, c: Vector) -> Vector:
        return tuple(x + y for x, y in zip(a, c))

    while remaining:
        cur = prefix[-1]
        if l1(cur) > t_I:
            pick = next((k for k, idx in enumerate(remaining) if l1(plus(cur, vecs[idx])) <= cap), None)
            if pick is None:
                raise SlackReductionError(f"no copy keeps S+ within {cap}; input is not a valid factor")
        else:
            pick = 0
        idx = remaining.pop(pick)
        Q.append(idx)
        prefix.append(plus(cur, vecs[idx]))
        last = prefix[-1]
        for j in range(len(Q)):
            if prefix[j] == last:
                del Q[j:]
                del prefix[j + 1:]
                break
        if l1(prefix[-1]) > cap:
            raise AssertionError("running slack left the window")
    return [members[i] for i in Q]


def sort_slack(t: Sequence[int]) -> list[int]:
    """Permutation ``tau`` listing coordinates by decreasing slack (ties by index)."""
    return sorted(range(len(t)), key=lambda i: (-t[i], i))


def split_small_large(
    t: Sequence[int], c: int, r: int, band: Fraction = Fraction(99, 100)
) -> list[int]:
    """0-based positions (into the descending sequence ``t``) whose slack is small.

    Starts from the band ``[-c/band, c/band]`` and grows outward while a
    neighbour is at most ``max((3r t_{j+1})^r, |3r t_{l-1}|^r)`` of the current
    boundary.  An exhausted side counts as failing the test.
    """
    t = list(t)
    if any(a < b for a, b in zip(t, t[1:])):
        raise ValueError("slack values must be sorted in descending order")
    k = len(t)
    lim = Fraction(c) / Fraction(band)
    i1 = sum(1 for x in t if x > lim)
    i2 = sum(1 for x in t if x >= -lim)
    lo, hi = i1, i2  # I = positions lo .. hi-1
    j, ell = i1 - 1, i2
    while hi - lo < k:
        if hi > lo:
            thr = max((3 * r * abs(t[lo])) ** r, (3 * r * abs(t[hi - 1])) ** r)
        else:
            thr = 0
        jok = j >= 0 and t[j] <= thr
        lok = ell < k and abs(t[ell]) <= thr
        if not (jok or lok):
            break
        if jok:
            lo, j = j, j - 1
        if lok:
            hi, ell = ell + 1, ell + 1
    return list(range(lo, hi))


@dataclass(frozen=True)
class TransferMatrix:
    """``entries[(i, k)]``: number of (i, k)-copies moving surplus from ``i`` to ``k``."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    entries: dict[tuple[int, int], int]

    def get(self, i: int, k: int) -> int:
        return self.entries.get((i, k), 0)

    def row_sum(self, i: int) -> int:
        return sum(self.get(i, k) for k in self.cols)

    def col_sum(self, k: int) -> int:
        return sum(self.get(i, k) for i in self.rows)

    def nonzero(self) -> list[tuple[int, int, int]]:
        return [(i, k, x) for (i, k), x in sorted(self.entries.items()) if x]


def assign_transfers(tprime: Sequence[int], variant: str | None = None) -> TransferMatrix:
    """Northwest-corner greedy: surplus coordinates (rows) against deficits (columns).

    ``variant`` may name where the last coordinate sits (``"deficit-in-B"`` or
    ``"surplus-in-B"``); it is checked against the sign of that coordinate.
    """
    t = list(tprime)
    if sum(t) != 0:
        raise ValueError(f"transfer vector must sum to 0, got {sum(t)}")
    if variant is not None and t:
        if variant not in ("deficit-in-B", "surplus-in-B"):
            raise ValueError(f"unknown variant {variant!r}")
        if variant == "deficit-in-B" and t[-1] > 0 or variant == "surplus-in-B" and t[-1] < 0:
            raise ValueError(f"variant {variant} contradicts last coordinate {t[-1]}")
    rows = tuple(i for i, x in enumerate(t) if x > 0)
    cols = tuple(k for k, x in enumerate(t) if x < 0)
    entries: dict[tuple[int, int], int] = {}
    col_used = {k: 0 for k in cols}
    for i in rows:
        row_used = 0
        for k in cols:
            if col_used[k] < -t[k]:
                x = min(-t[k] - col_used[k], t[i] - row_used)
            else:
                x = 0
            entries[(i, k)] = x
            col_used[k] += x
            row_used += x
    tm = TransferMatrix(rows, cols, entries)
    for i in rows:
        assert tm.row_sum(i) == t[i]
    for k in cols:
        assert tm.col_sum(k) == -t[k]
    return tm
