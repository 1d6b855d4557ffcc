"""Benchmark grids: generate instances, solve them, and tabulate the results."""

from __future__ import annotations

import csv
import io
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from .generators import GenSpec, GenerationError, generate
from .solver import degree_deficit, oracle_verdict, solve_auto

GRID_FIELDS = ("kind", "n", "r", "c", "s", "seed", "noise")
COLUMNS = ("index", "kind", "n", "r", "c", "s", "seed", "verdict", "oracle", "agrees", "ms", "path", "fallback", "pattern_space")


@dataclass
class Row:
    index: int
    kind: str
    n: int
    r: int
    c: int | None
    s: int | None
    seed: int
    verdict: str
    oracle: str
    agrees: bool | None
    ms: float
    path: str
    fallback: str
    pattern_space: int


def parse_grid(text: str) -> tuple[list[GenSpec], dict[str, Any]]:
    """Expand a TOML ``[grid]`` table (scalars or lists per field) into GenSpecs.

    ``[options]`` may set ``workers`` and ``oracle`` (compute the reference
    column, default true).  A missing or empty grid yields no specs.
    """
    doc = tomllib.loads(text)
    grid = doc.get("grid", {})
    opts = doc.get("options", {})
    unknown = set(grid) - set(GRID_FIELDS)
    if unknown:
        raise ValueError(f"unknown grid fields: {sorted(unknown)}")
    if not grid:
        return [], opts
    axes = []
    for f in GRID_FIELDS:
        v = grid.get(f)
        if v is None:
            axes.append([None])
        elif isinstance(v, list):
            axes.append(v)
        else:
            axes.append([v])
    if any(not a for a in axes):
        return [], opts
    specs = []
    for combo in itertools.product(*axes):
        kw = {f: v for f, v in zip(GRID_FIELDS, combo) if v is not None}
        if "kind" not in kw or "n" not in kw or "r" not in kw:
            raise ValueError("grid needs kind, n and r")
        specs.append(GenSpec(**kw))
    return specs, opts


def _run_one(job: tuple[int, GenSpec, bool]) -> Row:
    index, spec, with_oracle = job
    try:
        inst = generate(spec)
    except GenerationError as e:
        return Row(index, spec.kind, spec.n, spec.r, None, None, spec.seed, "GenerationError", "", None, 0.0, "", str(e), 0)
    g, r = inst.graph, spec.r
    cert = solve_auto(g, r, seed=spec.seed)
    trace = cert.trace
    s = next((st["s"] for st in trace.stages if st["stage"] == "peel"), None)
    space = next((st["multisets"] for st in trace.stages if st["stage"] == "admissible"), 0)
    ref = oracle_verdict(g, r) if with_oracle else ""
    agrees = None if ref in ("", "Inconclusive") or cert.verdict == "Inconclusive" else ref == cert.verdict
    c = degree_deficit(g, r)
    return Row(index, spec.kind, spec.n, r, c, s, spec.seed, cert.verdict, ref, agrees, round(cert.timing_ms, 3), trace.path, trace.fallback or "", space)


def run_grid(specs: list[GenSpec], workers: int = 1, with_oracle: bool = True) -> list[Row]:
    """Solve every spec; rows come back in input order."""
    jobs = [(i, sp, with_oracle) for i, sp in enumerate(specs)]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


def rows_to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(asdict(row))
    return buf.getvalue()


def rows_to_json(rows: list[Row]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2)
