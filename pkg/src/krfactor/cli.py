"""Command-line front end.

Exit codes: 0 factor found (or certificate valid), 1 no factor (or
certificate invalid), 2 inconclusive, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import parse_grid, rows_to_csv, rows_to_json, run_grid
from .certificate import CertificateSchemaError, verify_certificate
from .generators import KINDS, GenerationError, GenSpec, generate
from .graph import GraphParseError, InvalidVertexError, dump_graph, read_graph
from .solver import MODES, solve_auto

EXIT = {"FactorFound": 0, "NoFactor": 1, "Inconclusive": 2}
INPUT_ERROR = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="krfactor", description="Decide K_r-factors in dense graphs with checkable certificates.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="decide one graph")
    s.add_argument("--input", required=True, help="edge-list file")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--c", type=int, default=None, help="override the degree deficit")
    s.add_argument("--mode", choices=MODES, default="auto")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--oracle-cutoff", type=int, default=15)
    s.add_argument("--out", help="write the result document here instead of stdout")
    s.add_argument("--no-timing", action="store_true", help="omit timing_ms (byte-stable output)")

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--s", type=int, default=1)
    g.add_argument("--c", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--out", required=True)
    g.add_argument("--meta", help="also write generator metadata (JSON) here")

    v = sub.add_parser("verify", help="re-check a result document")
    v.add_argument("--input", required=True)
    v.add_argument("--certificate", required=True)

    b = sub.add_parser("bench", help="run a TOML grid of generated instances")
    b.add_argument("--grid", required=True)
    b.add_argument("--out", required=True, help="CSV output")
    b.add_argument("--json", help="also write rows as JSON")
    b.add_argument("--workers", type=int, default=None)
    return p


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return INPUT_ERROR


def _cmd_solve(a: argparse.Namespace) -> int:
    g = read_graph(a.input)
    cert = solve_auto(g, a.r, mode=a.mode, c=a.c, seed=a.seed, oracle_cutoff=a.oracle_cutoff)
    text = cert.dumps(timing=not a.no_timing) + "\n"
    if a.out:
        Path(a.out).write_text(text)
        print(cert.verdict)
    else:
        sys.stdout.write(text)
    return EXIT[cert.verdict]


def _cmd_gen(a: argparse.Namespace) -> int:
    inst = generate(GenSpec(a.kind, a.n, a.r, c=a.c, s=a.s, seed=a.seed, noise=a.noise))
    Path(a.out).write_text(dump_graph(inst.graph))
    if a.meta:
        Path(a.meta).write_text(json.dumps(inst.to_json(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {a.out}: n={inst.graph.n} m={inst.graph.edge_count()} min_degree={inst.graph.min_degree()}")
    return 0


def _cmd_verify(a: argparse.Namespace) -> int:
    g = read_graph(a.input)
    doc = json.loads(Path(a.certificate).read_text())
    ok = verify_certificate(g, doc)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def _cmd_bench(a: argparse.Namespace) -> int:
    specs, opts = parse_grid(Path(a.grid).read_text())
    workers = a.workers if a.workers is not None else int(opts.get("workers", 1))
    rows = run_grid(specs, workers=workers, with_oracle=bool(opts.get("oracle", True)))
    Path(a.out).write_text(rows_to_csv(rows))
    if a.json:
        Path(a.json).write_text(rows_to_json(rows) + "\n")
    print(f"{len(rows)} rows -> {a.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    a = _parser().parse_args(argv)
    handler = {"solve": _cmd_solve, "gen": _cmd_gen, "verify": _cmd_verify, "bench": _cmd_bench}[a.cmd]
    try:
        return handler(a)
    except (OSError, GraphParseError, InvalidVertexError, GenerationError, CertificateSchemaError, json.JSONDecodeError, ValueError) as e:
        return _fail(str(e))


if __name__ == "__main__":
    sys.exit(main())
