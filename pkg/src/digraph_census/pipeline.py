"""The full classification workflow: generate, dedupe, classify, report.

Classes are classified in exclusion order: majority admitters drop out first,
then wnu2 admitters among the rest, then the remaining classes are searched
for wnu3 (with invariant-subset domain restriction), and the wnu3-minimal
survivors for a (q, p) pair of the two-term system. For n=5 the order of the
first two stages flips (wnu2 is decided for every class, majority only among
the non-wnu2 rest), which is both how that census was produced historically
and what its reported wnu2 total counts.

Every positive answer carries a witness that is re-verified against the
definition before it is recorded. A search that exhausts its node budget on
the representative's labelling is retried on the degree-sorted relabelled
copy (classification is isomorphism-invariant; witnesses are transported back
through the relabelling). A class that still cannot be decided is reported
as undecided and the run exits nonzero at the CLI.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Digraph, digraph_of, read_digraph_lines, write_digraph_lines
from .dedupe import ClassFlags, canonical_index, dedupe_sieve, read_flag_bitmap, write_flag_bitmap
from .parallel import run_parallel
from .schemes import scheme_majority, scheme_p_given_q, scheme_two_semilattice, scheme_wnu2, scheme_wnu3
from .search import SearchOutcome, exhaustive_oracle, search, verify_table
from .subsets import compute_subsets, restrict_domains

REPORT_HEADER = "digraph-census-report v1"

DEFAULT_BUDGET = 50_000_000
RELABEL_BUDGET = 5_000_000_000


@dataclass
class CensusOptions:
    workers: int = 1
    budget: int = DEFAULT_BUDGET
    wnu2_scan: bool | None = None   # None: matrix scan for n <= 4, search for n = 5
    wnu2_first: bool | None = None  # None: True exactly for n = 5
    out_dir: Path | None = None
    resume: bool = False
    upto_stage: str = "pq"          # dedupe | majority | wnu2 | wnu3 | pq


@dataclass
class ClassResult:
    index: int
    majority: bool = False
    wnu2: bool = False
    wnu3: bool = False
    pq: bool = False
    first_q: bool | None = None
    undecided: tuple[str, ...] = ()
    witnesses: dict[str, tuple[int, ...]] = field(default_factory=dict)


@dataclass
class DualityPairing:
    partner: dict[int, int]        # rep -> rep of the edge-reversed class
    orbit_reps: list[int]          # least index per duality orbit
    pairs: list[tuple[int, int]]   # (kept, partner), partner differs
    self_dual: list[int]


@dataclass
class CensusReport:
    n: int
    class_count: int
    majority_count: int
    wnu2_count: int
    wnu3_minimal: list[int]
    pq_satisfied: list[int]
    results: dict[int, ClassResult]
    duality: DualityPairing | None
    undecided: list[tuple[int, str]]
    timings: dict[str, float] = field(default_factory=dict)

    def summary_lines(self) -> list[str]:
        lines = [
            f"n={self.n}",
            f"classes={self.class_count}",
            f"majority={self.majority_count}",
            f"wnu2={self.wnu2_count}",
            f"wnu3_minimal={len(self.wnu3_minimal)}",
            f"pq={len(self.pq_satisfied)}",
            f"undecided={len(self.undecided)}",
        ]
        return lines


def degree_sorted_copy(g: Digraph) -> tuple[Digraph, list[int]]:
    """Relabelled copy with vertices ordered by total degree descending.

    Puts the constrained vertices first in the cell order, which is what keeps
    chronological backtracking out of the unconstrained-prefix trap on sparse
    unsatisfiable instances. Returns (copy, permutation old->new).
    """
    adj = g.adjacency()
    deg = adj.sum(axis=0) + adj.sum(axis=1)
    order = sorted(range(g.n), key=lambda v: (-int(deg[v]), v))
    perm = [0] * g.n
    for new, old in enumerate(order):
        perm[old] = new
    return g.apply_permutation(perm), perm


def transport_table(table, perm: list[int], n: int, k: int) -> tuple[int, ...]:
    """Pull a witness found on the relabelled copy back to the original labels."""
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    out = []
    for args in itertools.product(range(n), repeat=k):
        code = 0
        for a in args:
            code = code * n + perm[a]
        out.append(inv[int(table[code])])
    return tuple(out)


def _scheme_for(kind: str, n: int):
    return {"majority": scheme_majority, "wnu2": scheme_wnu2, "wnu3": scheme_wnu3,
            "two_semilattice": scheme_two_semilattice}[kind](n)


def pin_isolated_vertex_cells(scheme, g: Digraph):
    """Pin every cell whose arguments touch an isolated vertex.

    A tuple containing a vertex with no edges at all appears in no
    edge-preservation constraint (every premise needs an edge at that
    coordinate), so such cells neither constrain nor are constrained: the
    instance is satisfiable iff it is with them pinned, and because an
    unconstrained cell always accepts its least domain value first, the
    lexicographically least witness is unchanged. This removes the
    exponential re-enumeration those cells otherwise cause.
    """
    adj = g.adjacency()
    degree = adj.sum(axis=0) + adj.sum(axis=1)
    isolated = {v for v in range(g.n) if degree[v] == 0}
    if not isolated:
        return scheme
    pinned = {ci for ci, _ in scheme.prefix}
    pins = list(scheme.prefix)
    for ci, cell in enumerate(scheme.cells):
        if ci in pinned or not scheme.domains[ci]:
            continue
        if any(isolated.intersection(t) for t in cell):
            pins.append((ci, min(scheme.domains[ci])))
    if len(pins) == len(scheme.prefix):
        return scheme
    return scheme.with_prefix(tuple(pins))


def _deciding_scheme(kind: str, g: Digraph, subset_table=None):
    st = subset_table if subset_table is not None else compute_subsets(g)
    return pin_isolated_vertex_cells(restrict_domains(_scheme_for(kind, g.n), st), g)


LADDER_BUDGETS = (3_000_000, 100_000_000)


def decide_with_relabel(g: Digraph, kind: str, budget: int,
                        subset_table=None) -> tuple[SearchOutcome, tuple[int, ...] | None]:
    """Decide one class robustly, independent of how it happens to be labelled.

    Attempts, in order: the original labelling and the degree-sorted copy
    under ``budget``; then every relabelling under escalating budgets (which
    labelling keeps chronological backtracking out of the re-enumeration trap
    varies per instance, and found/unsat is labelling-invariant); finally one
    large-budget run. Witnesses are transported back to ``g``'s labelling.
    A class that survives everything surfaces as undecided instead of hanging.
    """
    identity = list(range(g.n))
    h, sorted_perm = degree_sorted_copy(g)
    attempts: list[tuple[Digraph, list[int], int]] = [(g, identity, budget)]
    if h != g:
        attempts.append((h, sorted_perm, budget))
    for ladder_budget in LADDER_BUDGETS:
        for perm in itertools.permutations(range(g.n)):
            attempts.append((g.apply_permutation(perm), list(perm), ladder_budget))
    attempts.append((h, sorted_perm, RELABEL_BUDGET))

    out = None
    schemes: dict[int, object] = {}
    for graph, permutation, node_budget in attempts:
        scheme = schemes.get(graph.index)
        if scheme is None:
            scheme = _deciding_scheme(kind, graph,
                                      subset_table if graph is g else None)
            schemes[graph.index] = scheme
        out = search(graph, scheme, budget=node_budget)
        if not out.decided:
            continue
        if not out.found:
            return out, None
        if permutation == identity:
            return out, tuple(int(v) for v in out.witness)
        return out, transport_table(out.witness, permutation, g.n, scheme.arity)
    return out, None


def _search_pq(g: Digraph, st, budget: int) -> tuple[bool | None, bool | None,
                                                     tuple[int, ...] | None, tuple[int, ...] | None]:
    """Iterate wnu3 witnesses of ``g`` lexicographically, searching p for each.

    Pinning isolated-vertex cells keeps both searches out of the
    re-enumeration trap without changing which witness is lexicographically
    first (see pin_isolated_vertex_cells); q candidates differing only at
    unconstrained tuples would drive identical p searches, so skipping them
    changes neither the outcome nor the first-q observation.

    Returns (pq_found, first_q, q_table, p_table); pq_found None = undecided.
    """
    w3 = pin_isolated_vertex_cells(restrict_domains(scheme_wnu3(g.n), st), g)
    qout = search(g, w3, budget=budget)
    if not qout.decided:
        return None, None, None, None
    attempts = 0
    while qout.found:
        attempts += 1
        psch = pin_isolated_vertex_cells(
            restrict_domains(scheme_p_given_q(g.n, qout.witness, g), st), g)
        pout = search(g, psch, budget=budget)
        if not pout.decided:
            return None, None, None, None
        if pout.found:
            q = tuple(int(v) for v in qout.witness)
            p = tuple(int(v) for v in pout.witness)
            return True, attempts == 1, q, p
        qout = search(g, w3, resume_from=qout.assignment, budget=budget)
        if not qout.decided:
            return None, None, None, None
    return False, None, None, None


def classify_class(index: int, n: int, options: CensusOptions) -> ClassResult:
    """Run the exclusion-order stages for one representative digraph."""
    g = digraph_of(index, n)
    st = compute_subsets(g)
    res = ClassResult(index=index)
    wnu2_first = options.wnu2_first if options.wnu2_first is not None else (n == 5)
    wnu2_scan = options.wnu2_scan if options.wnu2_scan is not None else (n <= 4)
    order = ["wnu2", "majority"] if wnu2_first else ["majority", "wnu2"]
    sequence = order + ["wnu3", "pq"]
    if options.upto_stage == "dedupe":
        return res
    if options.upto_stage in sequence:
        sequence = sequence[: sequence.index(options.upto_stage) + 1]

    def record(kind: str, table) -> None:
        if not verify_table(g, np.asarray(table, dtype=np.int8), kind):
            raise AssertionError(f"witness for {kind} on index {index} failed verification")
        res.witnesses[kind] = tuple(int(v) for v in table)

    for kind in sequence[:2]:
        if kind == "wnu2" and wnu2_scan:
            out = exhaustive_oracle(g, scheme_wnu2(n))
            witness = tuple(int(v) for v in out.witness) if out.found else None
        else:
            out, witness = decide_with_relabel(g, kind, options.budget, st)
        if not out.decided:
            res.undecided += (kind,)
            return res
        if out.found:
            setattr(res, kind, True)
            record(kind, witness)
            return res
    if "wnu3" not in sequence:
        return res

    out, witness = decide_with_relabel(g, "wnu3", options.budget, st)
    if not out.decided:
        res.undecided += ("wnu3",)
        return res
    if not out.found:
        return res
    res.wnu3 = True
    record("wnu3", witness)
    if "pq" not in sequence:
        return res

    pq_found, first_q, q_table, p_table = _search_pq(g, st, options.budget)
    if pq_found is None:
        res.undecided += ("pq",)
        return res
    if pq_found:
        res.pq = True
        res.first_q = first_q
        res.witnesses["q"] = q_table
        if not verify_table(g, np.asarray(p_table, dtype=np.int8), "pq",
                            q_table=np.asarray(q_table, dtype=np.int8)):
            raise AssertionError(f"pq witness on index {index} failed verification")
        res.witnesses["p"] = p_table
    return res


def duality_pairing(reps: list[int], n: int) -> DualityPairing:
    """Group representatives with the classes of their edge-reversed digraphs."""
    partner = {r: canonical_index(digraph_of(r, n).reversed()) for r in reps}
    orbits: dict[int, int] = {}
    for r, d in partner.items():
        orbits[min(r, d)] = max(r, d)
    orbit_reps = sorted(orbits)
    pairs = [(k, orbits[k]) for k in orbit_reps if orbits[k] != k]
    self_dual = [k for k in orbit_reps if orbits[k] == k]
    return DualityPairing(partner, orbit_reps, pairs, self_dual)


def run_census(n: int, options: CensusOptions | None = None) -> CensusReport:
    options = options or CensusOptions()
    timings: dict[str, float] = {}

    t0 = time.time()
    flags = _load_or_dedupe(n, options)
    reps = [int(r) for r in flags.representatives()]
    timings["dedupe"] = time.time() - t0

    done: dict[int, ClassResult] = {}
    if options.resume and options.out_dir is not None:
        done = _load_class_log(options.out_dir, n)

    t0 = time.time()
    todo = [r for r in reps if r not in done]
    if options.upto_stage != "dedupe" and todo:
        log_fh = _open_class_log(options.out_dir) if options.out_dir else None
        try:
            chunk = 256
            for start in range(0, len(todo), chunk):
                batch = todo[start : start + chunk]
                results = run_parallel(batch, lambda r: classify_class(r, n, options),
                                       options.workers)
                for res in results:
                    done[res.index] = res
                    if log_fh:
                        log_fh.write(_class_log_line(res))
                if log_fh:
                    log_fh.flush()
        finally:
            if log_fh:
                log_fh.close()
    timings["classify"] = time.time() - t0

    results = {r: done[r] for r in reps if r in done}
    wnu3_minimal = sorted(r for r, res in results.items() if res.wnu3)
    report = CensusReport(
        n=n,
        class_count=len(reps),
        majority_count=sum(1 for res in results.values() if res.majority),
        wnu2_count=sum(1 for res in results.values() if res.wnu2),
        wnu3_minimal=wnu3_minimal,
        pq_satisfied=sorted(r for r, res in results.items() if res.pq),
        results=results,
        duality=duality_pairing(wnu3_minimal, n) if wnu3_minimal else None,
        undecided=sorted((r, kind) for r, res in results.items() for kind in res.undecided),
        timings=timings,
    )
    if options.out_dir is not None:
        persist_report(report, flags, options.out_dir)
    return report


def _load_or_dedupe(n: int, options: CensusOptions) -> ClassFlags:
    if options.out_dir is not None:
        bitmap = Path(options.out_dir) / "flags.bits"
        if options.resume and bitmap.exists():
            flags = read_flag_bitmap(bitmap)
            if flags.n == n:
                return flags
    return dedupe_sieve(n)


# ---------------------------------------------------------------------------
# persistence

def _open_class_log(out_dir: Path):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return open(out_dir / "classes.log", "a", encoding="ascii")


def _class_log_line(res: ClassResult) -> str:
    flags = "".join("1" if b else "0" for b in (res.majority, res.wnu2, res.wnu3, res.pq))
    firstq = "-" if res.first_q is None else ("1" if res.first_q else "0")
    und = ",".join(res.undecided) if res.undecided else "-"
    wit = ";".join(f"{kind}:{''.join(str(v) for v in tab)}"
                   for kind, tab in sorted(res.witnesses.items())) or "-"
    return f"{res.index} {flags} {firstq} {und} {wit}\n"


def _parse_class_log_line(line: str, lineno: int) -> ClassResult:
    parts = line.split()
    if len(parts) != 5 or len(parts[1]) != 4 or set(parts[1]) - {"0", "1"}:
        raise ValueError(f"classes.log line {lineno}: malformed record")
    index = int(parts[0])
    maj, w2, w3, pq = (c == "1" for c in parts[1])
    first_q = None if parts[2] == "-" else parts[2] == "1"
    undecided = () if parts[3] == "-" else tuple(parts[3].split(","))
    witnesses = {}
    if parts[4] != "-":
        for item in parts[4].split(";"):
            kind, tab = item.split(":")
            witnesses[kind] = tuple(int(c) for c in tab)
    return ClassResult(index, maj, w2, w3, pq, first_q, undecided, witnesses)


def _load_class_log(out_dir: Path, n: int) -> dict[int, ClassResult]:
    path = Path(out_dir) / "classes.log"
    done: dict[int, ClassResult] = {}
    if not path.exists():
        return done
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                res = _parse_class_log_line(line, lineno)
                done[res.index] = res
    return done


def persist_report(report: CensusReport, flags: ClassFlags, out_dir: Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_flag_bitmap(flags, out_dir / "flags.bits")
    with open(out_dir / "representatives.txt", "w", encoding="ascii") as fh:
        write_digraph_lines((digraph_of(r, report.n) for r in sorted(report.results)), fh)
    with open(out_dir / "report.txt", "w", encoding="ascii") as fh:
        write_report(report, fh)


def write_report(report: CensusReport, fh) -> None:
    """Line-oriented report: header, counts, then one record per representative."""
    fh.write(REPORT_HEADER + "\n")
    fh.write(" ".join(report.summary_lines()) + "\n")
    nsq = report.n * report.n
    for r in sorted(report.results):
        res = report.results[r]
        bits = format(r, f"0{nsq}b")
        flags = "0" + "".join("1" if b else "0" for b in (res.majority, res.wnu2, res.wnu3))
        wit = ",".join(sorted(res.witnesses)) or "-"
        fh.write(f"{r} {bits} {flags} {wit}\n")


def read_report(fh) -> dict:
    """Parse a report file back into header counts and per-class flag records."""
    header = fh.readline().strip()
    if header != REPORT_HEADER:
        raise ValueError(f"line 1: expected {REPORT_HEADER!r}, got {header!r}")
    counts_line = fh.readline().strip()
    counts = {}
    for item in counts_line.split():
        key, _, value = item.partition("=")
        if not value:
            raise ValueError(f"line 2: malformed count {item!r}")
        counts[key] = int(value)
    records = {}
    for lineno, line in enumerate(fh, start=3):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or len(parts[2]) != 4:
            raise ValueError(f"line {lineno}: malformed record")
        index = int(parts[0])
        if len(parts[1]) != counts["n"] ** 2 or set(parts[1]) - {"0", "1"}:
            raise ValueError(f"line {lineno}: malformed bitstring")
        records[index] = {
            "bits": parts[1],
            "isomorph": parts[2][0] == "1",
            "majority": parts[2][1] == "1",
            "wnu2": parts[2][2] == "1",
            "wnu3": parts[2][3] == "1",
            "witnesses": [] if parts[3] == "-" else parts[3].split(","),
        }
    return {"counts": counts, "records": records}


def read_catalog(fh, n: int | None = None) -> list[Digraph]:
    return read_digraph_lines(fh, n)


def two_semilattice_check(n: int = 3) -> dict[int, dict[str, bool]]:
    """Classify every class at ``n`` for majority/wnu2/wnu3/2-semilattice.

    Used for the three-vertex cross-check: every class admitting wnu3 must
    admit majority or a two-semilattice operation.
    """
    out: dict[int, dict[str, bool]] = {}
    for r in dedupe_sieve(n).representatives():
        g = digraph_of(int(r), n)
        st = compute_subsets(g)
        flags = {}
        for kind in ("majority", "wnu2", "wnu3"):
            flags[kind] = search(g, restrict_domains(_scheme_for(kind, n), st)).found
        flags["two_semilattice"] = exhaustive_oracle(g, scheme_two_semilattice(n)).found
        out[int(r)] = flags
    return out
