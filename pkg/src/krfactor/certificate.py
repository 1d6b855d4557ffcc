"""Result documents and their independent verification.

A document is plain JSON::

    {verdict, r, n, graph_digest, factor, evidence, trace, timing_ms}

``verdict`` is ``FactorFound``, ``NoFactor`` or ``Inconclusive``.  A
``NoFactor`` document carries one evidence object whose ``kind`` is
``Divisibility``, ``IndependentSetTooLarge``, ``TutteParity``,
``SlackInfeasible`` or ``OracleExhausted``.  The verifier re-derives every
claim from the graph; it never trusts the trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

from .admissible import find_admissible_tiling
from .colorcode import cliques_by_type
from .graph import Graph, Partition, is_factor
from .matching import TutteSet, components, is_valid_tutte_set
from .oracle import DEFAULT_BUDGET, OracleInconclusive, oracle_kr_factor
from .slack import l1, lemma_bound, partition_slack, restrict

VERDICTS = ("FactorFound", "NoFactor", "Inconclusive")
EVIDENCE_KINDS = ("Divisibility", "IndependentSetTooLarge", "TutteParity", "SlackInfeasible", "OracleExhausted")


class CertificateSchemaError(ValueError):
    """The document is not a well-formed result document."""


@dataclass
class Trace:
    path: str = ""
    stages: list[dict[str, Any]] = field(default_factory=list)
    fallback: str | None = None
    flags: list[str] = field(default_factory=list)
    seed: int = 0

    def add(self, stage: str, **data: Any) -> None:
        self.stages.append({"stage": stage, **data})

    def flag(self, note: str) -> None:
        self.flags.append(note)

    def to_json(self) -> dict[str, Any]:
        return {"path": self.path, "seed": self.seed, "fallback": self.fallback, "flags": list(self.flags), "stages": self.stages}


@dataclass
class Certificate:
    verdict: str
    r: int
    n: int
    graph_digest: str
    factor: list[tuple[int, ...]] | None = None
    evidence: dict[str, Any] | None = None
    trace: Trace = field(default_factory=Trace)
    timing_ms: float = 0.0

    def to_json(self, timing: bool = True) -> dict[str, Any]:
        doc = {
            "verdict": self.verdict,
            "r": self.r,
            "n": self.n,
            "graph_digest": self.graph_digest,
            "factor": None if self.factor is None else [list(m) for m in sorted(tuple(sorted(m)) for m in self.factor)],
            "evidence": self.evidence,
            "trace": self.trace.to_json(),
        }
        if timing:
            doc["timing_ms"] = round(self.timing_ms, 3)
        return doc

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), sort_keys=True, indent=2)


def found(g: Graph, r: int, factor: Sequence[Sequence[int]], trace: Trace) -> Certificate:
    if not is_factor(g, factor, r):
        raise AssertionError("refusing to certify an invalid factor")
    return Certificate("FactorFound", r, g.n, g.digest(), [tuple(sorted(m)) for m in factor], None, trace)


def no_factor(g: Graph, r: int, evidence: dict[str, Any], trace: Trace) -> Certificate:
    return Certificate("NoFactor", r, g.n, g.digest(), None, evidence, trace)


def inconclusive(g: Graph, r: int, trace: Trace) -> Certificate:
    return Certificate("Inconclusive", r, g.n, g.digest(), None, None, trace)


# evidence builders


def divisibility(n: int, r: int) -> dict[str, Any]:
    return {"kind": "Divisibility", "n": n, "r": r}


def independent_set(vertices: Sequence[int]) -> dict[str, Any]:
    return {"kind": "IndependentSetTooLarge", "set": sorted(vertices)}


def tutte_set(ts: TutteSet) -> dict[str, Any]:
    return {
        "kind": "TutteParity",
        "form": "tutte-set",
        "S": sorted(ts.S),
        "odd_components": [sorted(c) for c in ts.odd_components],
    }


def component_pair(parts: Sequence[Sequence[int]], pair: tuple[int, int]) -> dict[str, Any]:
    return {"kind": "TutteParity", "form": "component-pair", "parts": [sorted(p) for p in parts], "pair": list(pair)}


def slack_infeasible(partition: Partition, I: Sequence[int], t_I: int) -> dict[str, Any]:
    return {
        "kind": "SlackInfeasible",
        "partition": [sorted(p) for p in partition.parts],
        "I": sorted(I),
        "t_I": t_I,
        "bound": lemma_bound(t_I, partition.r),
    }


def oracle_exhausted() -> dict[str, Any]:
    return {"kind": "OracleExhausted"}


# type-count feasibility


def type_counts_feasible(types: Sequence[tuple[int, ...]], sizes: Sequence[int]) -> bool:
    """Is ``sizes`` a non-negative integer combination of ``types``?"""
    types = sorted(set(tuple(t) for t in types))

    @lru_cache(maxsize=None)
    def rec(rem: tuple[int, ...]) -> bool:
        first = next((i for i, x in enumerate(rem) if x), None)
        if first is None:
            return True
        for tp in types:
            if tp[first] == 0 or any(a > b for a, b in zip(tp, rem)):
                continue
            if rec(tuple(b - a for a, b in zip(tp, rem))):
                return True
        return False

    return rec(tuple(sizes))


def partition_obstructed(g: Graph, partition: Partition) -> bool:
    """True when no multiset of r-clique types present in ``g`` fills the part sizes."""
    present = list(cliques_by_type(g, partition, partition.r))
    return not type_counts_feasible(present, partition.sizes)


def find_component_pair(g: Graph, r: int, a_parts: Sequence[Sequence[int]], rest: Sequence[int]) -> dict[str, Any] | None:
    """Split ``rest`` along its components and look for a size obstruction."""
    comps = components(g, rest)
    if len(comps) < 2:
        return None
    rest_set = set(rest)
    for comp in comps:
        if len(comp) % 2 == 0:
            continue
        other = sorted(rest_set - comp)
        parts = [list(p) for p in a_parts] + [sorted(comp), other]
        part = Partition.of(parts, r, s=len(a_parts))
        if partition_obstructed(g, part):
            return component_pair(parts, (len(a_parts), len(a_parts) + 1))
    return None


# verification


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise CertificateSchemaError(msg)


def _int_list(x: Any, what: str) -> list[int]:
    _require(isinstance(x, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in x), f"{what} must be a list of integers")
    return x


def _check_schema(doc: Any) -> None:
    _require(isinstance(doc, dict), "document must be a JSON object")
    for key in ("verdict", "r", "n", "graph_digest", "factor", "evidence", "trace"):
        _require(key in doc, f"missing field {key!r}")
    _require(doc["verdict"] in VERDICTS, f"unknown verdict {doc['verdict']!r}")
    _require(isinstance(doc["r"], int) and isinstance(doc["n"], int), "r and n must be integers")
    _require(isinstance(doc["graph_digest"], str), "graph_digest must be a string")
    if doc["factor"] is not None:
        _require(isinstance(doc["factor"], list), "factor must be a list")
        for m in doc["factor"]:
            _int_list(m, "factor member")
    ev = doc["evidence"]
    if ev is not None:
        _require(isinstance(ev, dict) and ev.get("kind") in EVIDENCE_KINDS, "evidence must name a known kind")


def _valid_parts(g: Graph, parts: Any) -> list[list[int]] | None:
    _require(isinstance(parts, list), "parts must be a list")
    out = [_int_list(p, "part") for p in parts]
    flat = [v for p in out for v in p]
    if sorted(flat) != list(range(g.n)):
        return None
    return out


def _verify_evidence(g: Graph, r: int, ev: dict[str, Any], budget: int) -> bool:
    kind = ev["kind"]
    if kind == "Divisibility":
        return g.n % r != 0 and ev.get("n") == g.n and ev.get("r") == r
    if kind == "IndependentSetTooLarge":
        vs = _int_list(ev.get("set"), "set")
        if len(set(vs)) != len(vs) or any(not 0 <= v < g.n for v in vs):
            return False
        return g.is_independent(vs) and len(vs) * r > g.n
    if kind == "TutteParity":
        form = ev.get("form")
        if form == "tutte-set":
            if r != 2:
                return False
            S = _int_list(ev.get("S"), "S")
            comps = ev.get("odd_components")
            _require(isinstance(comps, list), "odd_components must be a list")
            ts = TutteSet(frozenset(S), tuple(frozenset(_int_list(c, "component")) for c in comps))
            return is_valid_tutte_set(g, ts)
        if form == "component-pair":
            parts = _valid_parts(g, ev.get("parts"))
            pair = _int_list(ev.get("pair"), "pair")
            if parts is None or len(pair) != 2 or not all(0 <= p < len(parts) for p in pair) or pair[0] == pair[1]:
                return False
            if any(not p for p in parts):
                return False
            x, y = (set(parts[p]) for p in pair)
            if any(g.has_edge(u, v) for u in x for v in y):
                return False
            return partition_obstructed(g, Partition.of(parts, r))
        return False
    if kind == "SlackInfeasible":
        parts = _valid_parts(g, ev.get("partition"))
        I = _int_list(ev.get("I"), "I")
        if parts is None or any(not p for p in parts) or not 2 <= len(parts) <= r or g.n % r:
            return False
        if len(set(I)) != len(I) or not all(0 <= i < len(parts) for i in I):
            return False
        part = Partition.of(parts, r)
        t = partition_slack(part)
        t_I = l1(restrict(t, I))
        if ev.get("t_I") != t_I or ev.get("bound") != lemma_bound(t_I, r) or t_I == 0:
            return False
        return find_admissible_tiling(g, part, I).infeasible
    if kind == "OracleExhausted":
        if g.n % r:
            # r not dividing n has its own evidence kind
            return False
        try:
            return oracle_kr_factor(g, r, budget=budget) is None
        except OracleInconclusive:
            return False
    return False


def verify_certificate(g: Graph, doc: dict[str, Any] | Certificate, budget: int = DEFAULT_BUDGET * 5) -> bool:
    """Re-check a result document against ``g``.

    Returns False for ``Inconclusive`` and for any mismatch; raises
    :class:`CertificateSchemaError` when the document is malformed.
    """
    if isinstance(doc, Certificate):
        doc = doc.to_json()
    _check_schema(doc)
    r = doc["r"]
    if r < 2 or doc["n"] != g.n or doc["graph_digest"] != g.digest():
        return False
    if doc["verdict"] == "FactorFound":
        if doc["factor"] is None or doc["evidence"] is not None:
            return False
        return is_factor(g, [tuple(m) for m in doc["factor"]], r)
    if doc["verdict"] == "NoFactor":
        if doc["factor"] is not None or doc["evidence"] is None:
            return False
        return _verify_evidence(g, r, doc["evidence"], budget)
    return False
