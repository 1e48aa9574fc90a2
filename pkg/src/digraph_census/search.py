"""Polymorphism existence: backtracking search, exhaustive oracle, verifier.

``search`` runs depth-first over the scheme's cells (scheme order, values
ascending), pruning with the single compatibility rule of ``check_partial``;
the witness it returns is the lexicographically least one. ``exhaustive_oracle``
ignores that rule entirely: it enumerates complete assignments in the same
lexicographic order and returns the first whose expanded table verifies
against the edge relation directly, which makes it an independent check of
the engine. ``verify_table`` is the definition: edge preservation plus the
identities of the kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from . import kernels
from .core import CapacityError, Digraph
from .schemes import (Assignment, IdentityScheme, compile_scheme, expand_to_table,
                      tuple_digit_table)

DEFAULT_ORACLE_LIMIT = 10**8


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    backtracks: int


@dataclass(frozen=True)
class SearchOutcome:
    status: str  # "found" | "unsat" | "undecided"
    witness: np.ndarray | None
    assignment: Assignment | None
    stats: SearchStats

    @property
    def found(self) -> bool:
        return self.status == "found"

    @property
    def decided(self) -> bool:
        return self.status != "undecided"


_STATUS = {kernels.FOUND: "found", kernels.UNSAT: "unsat", kernels.UNDECIDED: "undecided"}


def _init_values(comp, resume_from: Assignment | None) -> tuple[np.ndarray, bool]:
    if resume_from is None:
        return comp.fixed_values.copy(), False
    values = np.array([-1 if v is None else v for v in resume_from.values], dtype=np.int8)
    if (values < 0).any():
        raise ValueError("resume_from must be a complete assignment")
    return values, True


def search(g: Digraph, scheme: IdentityScheme, *, budget: int | None = None,
           resume_from: Assignment | None = None) -> SearchOutcome:
    """Decide whether ``g`` admits a polymorphism realizing ``scheme``.

    ``budget`` caps compatibility checks; exhaustion yields an explicit
    ``undecided`` outcome instead of an open-ended run. ``resume_from``
    continues the scan past a previously found assignment, enumerating
    witnesses in lexicographic order.
    """
    if g.n != scheme.n:
        raise ValueError(f"digraph has n={g.n}, scheme has n={scheme.n}")
    if scheme.kind == "two_semilattice":
        raise ValueError("the two_semilattice identity is nested; use exhaustive_oracle")
    comp = compile_scheme(scheme)
    init, resume = _init_values(comp, resume_from)
    status, values, nodes, backtracks = kernels.run_search(
        g.adjacency(), comp.tup_digits, comp.arity, comp.cell_ptr, comp.cells_flat,
        comp.forced_tuples, comp.forced_values, comp.domain_masks, comp.fixed_mask,
        init, resume, -1 if budget is None else int(budget))
    return _outcome(scheme, _STATUS[status], values, SearchStats(int(nodes), int(backtracks)))


def _outcome(scheme, status, values, stats) -> SearchOutcome:
    if status != "found":
        return SearchOutcome(status, None, None, stats)
    assignment = Assignment(tuple(int(v) for v in values), cursor=len(values))
    witness = expand_to_table(scheme, assignment)
    return SearchOutcome(status, witness, assignment, stats)


def check_partial(g: Digraph, scheme: IdentityScheme, a: Assignment,
                  new_cell: int, value: int) -> bool:
    """Compatibility of assigning ``value`` to ``new_cell`` given the partial
    assignment ``a`` (everything before the cursor, plus scheme prefixes)."""
    if g.n != scheme.n:
        raise ValueError(f"digraph has n={g.n}, scheme has n={scheme.n}")
    comp = compile_scheme(scheme)
    values = comp.fixed_values.copy()
    for ci in range(a.cursor):
        if a.values[ci] is not None:
            values[ci] = a.values[ci]
    values[new_cell] = -1
    if (comp.domain_masks[new_cell] >> value) & 1 == 0:
        return False
    return bool(kernels.check_cell_value(
        g.adjacency(), comp.tup_digits, comp.arity, comp.cell_ptr, comp.cells_flat,
        comp.forced_tuples, comp.forced_values, values, new_cell, value))


def exhaustive_oracle(g: Digraph, scheme: IdentityScheme, *,
                      limit: int = DEFAULT_ORACLE_LIMIT) -> SearchOutcome:
    """First complete assignment (lexicographic scan) whose table verifies.

    Semantically identical to ``search`` but independent of its pruning rule;
    refuses instances whose assignment space exceeds ``limit``.
    """
    if g.n != scheme.n:
        raise ValueError(f"digraph has n={g.n}, scheme has n={scheme.n}")
    comp = compile_scheme(scheme)
    space = prod(len(scheme.domains[ci]) for ci in range(len(scheme.cells))
                 if comp.fixed_mask[ci] == 0)
    if space > limit:
        raise CapacityError(f"oracle space {space} exceeds limit {limit}")
    dom_flat: list[int] = []
    dom_ptr = np.zeros(len(scheme.cells) + 1, dtype=np.int64)
    for ci, dom in enumerate(scheme.domains):
        dom_flat.extend(sorted(dom))
        dom_ptr[ci + 1] = len(dom_flat)
    status, values, tested = kernels.run_oracle(
        g.adjacency(), comp.tup_digits, comp.arity, comp.cell_ptr, comp.cells_flat,
        comp.forced_tuples, comp.forced_values,
        np.array(dom_flat, dtype=np.int8), dom_ptr,
        comp.fixed_mask, comp.fixed_values, scheme.kind == "two_semilattice")
    return _outcome(scheme, _STATUS[status], values, SearchStats(int(tested), 0))


def verify_table(g: Digraph, table, kind: str, q_table=None) -> bool:
    """Definition check: the table preserves edges and satisfies the kind's
    identities. For ``pq`` the table is the p term and ``q_table`` its partner."""
    arr = np.asarray(table, dtype=np.int8)
    n = g.n
    arity = {"wnu2": 2, "two_semilattice": 2}.get(kind, 3)
    if arr.shape != (n**arity,):
        return False
    if arr.min() < 0 or arr.max() >= n:
        return False
    if not kernels.preserves_edges(g.adjacency(), tuple_digit_table(n, arity), arity, arr):
        return False
    if kind == "majority":
        return _majority_identities(arr, n)
    if kind == "wnu2":
        return _wnu2_identities(arr, n)
    if kind == "two_semilattice":
        return _wnu2_identities(arr, n) and bool(kernels.absorption_holds(arr, n))
    if kind == "wnu3":
        return _wnu3_identities(arr, n)
    if kind == "pq":
        if q_table is None:
            raise ValueError("verifying a pq witness needs the q table")
        return _pq_identities(arr, np.asarray(q_table, dtype=np.int8), n) and \
            verify_table(g, q_table, "wnu3")
    raise ValueError(f"unknown kind {kind!r}")


def _code3(x: int, y: int, z: int, n: int) -> int:
    return (x * n + y) * n + z


def _majority_identities(t: np.ndarray, n: int) -> bool:
    for x in range(n):
        for y in range(n):
            if not (t[_code3(x, x, y, n)] == x and t[_code3(x, y, x, n)] == x
                    and t[_code3(y, x, x, n)] == x):
                return False
    return True


def _wnu2_identities(t: np.ndarray, n: int) -> bool:
    for x in range(n):
        if t[x * n + x] != x:
            return False
        for y in range(n):
            if t[x * n + y] != t[y * n + x]:
                return False
    return True


def _wnu3_identities(t: np.ndarray, n: int) -> bool:
    for x in range(n):
        if t[_code3(x, x, x, n)] != x:
            return False
        for y in range(n):
            a = t[_code3(x, x, y, n)]
            if t[_code3(x, y, x, n)] != a or t[_code3(y, x, x, n)] != a:
                return False
    return True


def _pq_identities(p: np.ndarray, q: np.ndarray, n: int) -> bool:
    for x in range(n):
        if p[_code3(x, x, x, n)] != x:
            return False
        for y in range(n):
            if p[_code3(x, x, y, n)] != p[_code3(x, y, y, n)]:
                return False
            if p[_code3(x, y, x, n)] != q[_code3(x, x, y, n)]:
                return False
    return True
