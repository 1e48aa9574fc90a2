"""Command-line interface.

Subcommands: generate | dedupe | subalgebras | search | pipeline | emit-cnf.
Human-readable summaries go to stdout; machine-readable records go to files.
Exit codes: 0 success, 2 usage error, 3 input parse error, 4 capacity error,
5 undecided classes remain. ``DIGRAPH_CENSUS_OUT`` overrides the default
output directory for the pipeline.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import cnf
from .backend import backend_name
from .core import CapacityError, Digraph, digraph_of, generate_all, write_digraph_lines
from .dedupe import dedupe_bruteforce, dedupe_sieve, write_flag_bitmap
from .pipeline import CensusOptions, run_census
from .schemes import build_scheme, scheme_wnu3
from .search import exhaustive_oracle, search
from .subsets import compute_subsets, restrict_domains

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_CAPACITY = 4
EXIT_UNDECIDED = 5


def _digraph_from_args(args) -> Digraph:
    if args.digraph is not None:
        return Digraph.from_string(args.digraph, args.n)
    if args.index is not None:
        if args.n is None:
            raise ValueError("--index needs --n")
        return digraph_of(args.index, args.n)
    raise ValueError("give a digraph as --digraph BITS or --index K")


def _cmd_generate(args) -> int:
    out = sys.stdout if args.out is None else open(args.out, "w", encoding="ascii")
    try:
        count = write_digraph_lines(generate_all(args.n), out)
    finally:
        if args.out is not None:
            out.close()
    print(f"generated {count} digraphs for n={args.n}", file=sys.stderr)
    return EXIT_OK


def _cmd_dedupe(args) -> int:
    methods = {"sieve": dedupe_sieve, "bruteforce": dedupe_bruteforce}
    if args.method == "both":
        sieve = dedupe_sieve(args.n)
        brute = dedupe_bruteforce(args.n)
        same = np.array_equal(sieve.is_copy, brute.is_copy)
        print(f"sieve classes={sieve.class_count()} bruteforce classes={brute.class_count()} "
              f"identical={same}")
        flags = sieve
        if not same:
            return 1
    else:
        flags = methods[args.method](args.n)
        print(f"{args.method} classes={flags.class_count()}")
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            write_digraph_lines((digraph_of(int(r), args.n) for r in flags.representatives()), fh)
    if args.bitmap:
        write_flag_bitmap(flags, args.bitmap)
    return EXIT_OK


def _cmd_subalgebras(args) -> int:
    if args.all_reps:
        graphs = (digraph_of(int(r), args.n) for r in dedupe_sieve(args.n).representatives())
    else:
        graphs = [_digraph_from_args(args)]
    for g in graphs:
        table = compute_subsets(g)
        marked = " ".join("{" + ",".join(str(v) for v in s) + "}" for s in table.marked())
        print(f"{g.index} {g.to_string()} {marked if marked else '-'}")
    return EXIT_OK


def _cmd_search(args) -> int:
    g = _digraph_from_args(args)
    q_table = None
    if args.kind == "pq":
        w3 = scheme_wnu3(g.n)
        if not args.no_pruning:
            w3 = restrict_domains(w3, compute_subsets(g))
        qout = search(g, w3, budget=args.budget)
        if not qout.decided:
            print("undecided (wnu3 stage)")
            return EXIT_UNDECIDED
        if not qout.found:
            print("not found (no wnu3 witness to build the second term from)")
            return EXIT_OK
        q_table = qout.witness
        _print_table("q", q_table, g.n)
    scheme = build_scheme(args.kind, g.n, q_table=q_table, g=g)
    if not args.no_pruning:
        scheme = restrict_domains(scheme, compute_subsets(g))
    if args.oracle or args.kind == "two_semilattice":
        outcome = exhaustive_oracle(g, scheme)
    else:
        outcome = search(g, scheme, budget=args.budget)
    if not outcome.decided:
        print(f"undecided after {outcome.stats.nodes} nodes")
        return EXIT_UNDECIDED
    if not outcome.found:
        print("not found")
        return EXIT_OK
    print("found")
    _print_table("p" if args.kind == "pq" else "table", outcome.witness, g.n)
    return EXIT_OK


def _print_table(label: str, table, n: int) -> None:
    print(f"{label}: {''.join(str(int(v)) for v in table)}")


def _cmd_pipeline(args) -> int:
    out_dir = args.out or os.environ.get("DIGRAPH_CENSUS_OUT")
    options = CensusOptions(
        workers=args.workers,
        budget=args.budget,
        out_dir=Path(out_dir) if out_dir else None,
        resume=args.resume,
        upto_stage=args.stage,
    )
    report = run_census(args.n, options)
    print(" ".join(report.summary_lines()))
    if report.duality is not None:
        reduced = ",".join(str(r) for r in report.duality.orbit_reps)
        print(f"duality-reduced: {reduced}")
        for a, b in report.duality.pairs:
            print(f"dual pair: {a} {b}")
        for a in report.duality.self_dual:
            print(f"self-dual: {a}")
    for index, stage in report.undecided:
        print(f"undecided: index={index} stage={stage}")
    return EXIT_UNDECIDED if report.undecided else EXIT_OK


def _cmd_emit_cnf(args) -> int:
    g = _digraph_from_args(args)
    text = cnf.emit_cnf(g, args.kind)
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="digraph-census",
        description="Census of small digraphs by the polymorphisms their algebras admit "
                    f"(kernel backend: {backend_name()})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write all digraphs for n in index order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("dedupe", help="partition the catalog into isomorphism classes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=["sieve", "bruteforce", "both"], default="sieve")
    p.add_argument("--out", help="write representatives (digraph text format)")
    p.add_argument("--bitmap", help="write the copy-flag bit file")
    p.set_defaults(func=_cmd_dedupe)

    p = sub.add_parser("subalgebras", help="print invariant vertex subsets")
    p.add_argument("--n", type=int)
    p.add_argument("--digraph", help="inline edge bitstring")
    p.add_argument("--index", type=int, help="digraph index (needs --n)")
    p.add_argument("--all-reps", action="store_true",
                   help="every class representative for --n")
    p.set_defaults(func=_cmd_subalgebras)

    p = sub.add_parser("search", help="decide one digraph for one polymorphism kind")
    p.add_argument("--n", type=int)
    p.add_argument("--kind", required=True,
                   choices=["majority", "wnu2", "wnu3", "pq", "two_semilattice"])
    p.add_argument("--digraph", help="inline edge bitstring")
    p.add_argument("--index", type=int, help="digraph index (needs --n)")
    p.add_argument("--no-pruning", action="store_true",
                   help="skip invariant-subset domain restriction")
    p.add_argument("--oracle", action="store_true",
                   help="use the exhaustive scan instead of backtracking")
    p.add_argument("--budget", type=int, default=None, help="node budget for the search")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("pipeline", help="run the census workflow")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stage", default="pq",
                   choices=["dedupe", "majority", "wnu2", "wnu3", "pq"],
                   help="run stages up to and including this one")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, default=CensusOptions.budget)
    p.add_argument("--out", help="output directory (or set DIGRAPH_CENSUS_OUT)")
    p.add_argument("--resume", action="store_true", help="reuse results in --out")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("emit-cnf", help="write a model-finder input file")
    p.add_argument("--n", type=int)
    p.add_argument("--kind", required=True, choices=list(cnf.KINDS))
    p.add_argument("--digraph", help="inline edge bitstring")
    p.add_argument("--index", type=int, help="digraph index (needs --n)")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_emit_cnf)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
