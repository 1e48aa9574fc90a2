"""Invariant vertex subsets used to restrict value domains during search.

A proper subset S (size 2..n-1) is marked when any of four sufficient
conditions holds:

  (a) some vertex's in-neighborhood equals S;
  (b) some vertex's out-neighborhood equals S;
  (c) S is exactly the set of vertices with in-degree >= 1;
  (d) S is exactly the set of vertices with out-degree >= 1;

followed by closing the marked family under pairwise intersection (within the
enumerated subsets). Each condition forces S to be closed under every
idempotent polymorphism, so intersecting a cell's value domain with S is a
sound pruning step whenever the cell's arguments all lie in S. The checks are
sufficient, not exhaustive: unmarked subsets may still be invariant, which
only costs search time, never answers.

Subsets are enumerated smaller sizes first, lexicographically within a size:
for n=4 the ten subsets {0,1},{0,2},{0,3},{1,2},{1,3},{2,3},{0,1,2},{0,1,3},
{0,2,3},{1,2,3}; for n=5 the analogous twenty-five.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import Digraph


@dataclass(frozen=True)
class SubsetTable:
    n: int
    subsets: tuple[tuple[int, ...], ...]
    marks: tuple[bool, ...]

    def marked(self) -> tuple[tuple[int, ...], ...]:
        return tuple(s for s, m in zip(self.subsets, self.marks) if m)

    def marked_masks(self) -> tuple[int, ...]:
        """Marked subsets as vertex bitmasks."""
        return tuple(_mask(s) for s in self.marked())


def _mask(subset: tuple[int, ...]) -> int:
    m = 0
    for v in subset:
        m |= 1 << v
    return m


def enumerate_subsets(n: int) -> tuple[tuple[int, ...], ...]:
    """Proper subsets of size 2..n-1, smaller sizes first, lex within a size."""
    out = []
    for size in range(2, n):
        out.extend(itertools.combinations(range(n), size))
    return tuple(out)


def compute_subsets(g: Digraph) -> SubsetTable:
    n = g.n
    adj = g.adjacency()
    out_nb = [frozenset(j for j in range(n) if adj[v, j]) for v in range(n)]
    in_nb = [frozenset(i for i in range(n) if adj[i, v]) for v in range(n)]
    in_support = frozenset(v for v in range(n) if in_nb[v])
    out_support = frozenset(v for v in range(n) if out_nb[v])

    subsets = enumerate_subsets(n)
    index = {frozenset(s): i for i, s in enumerate(subsets)}
    marks = [False] * len(subsets)
    for i, s in enumerate(subsets):
        fs = frozenset(s)
        if any(out_nb[v] == fs for v in range(n)) or any(in_nb[v] == fs for v in range(n)):
            marks[i] = True
        elif fs == in_support or fs == out_support:
            marks[i] = True

    # intersection closure over the enumerated family, to a fixpoint
    changed = True
    while changed:
        changed = False
        marked_sets = [frozenset(subsets[i]) for i in range(len(subsets)) if marks[i]]
        for a, b in itertools.combinations(marked_sets, 2):
            c = a & b
            j = index.get(c)
            if j is not None and not marks[j]:
                marks[j] = True
                changed = True
    return SubsetTable(n, subsets, tuple(marks))


def restrict_domains(scheme, table: SubsetTable):
    """Intersect each cell's domain with every marked subset containing all of
    the cell's argument vertices. Returns a new scheme; the input is unchanged."""
    if scheme.n != table.n:
        raise ValueError(f"scheme is for n={scheme.n}, table for n={table.n}")
    masks = table.marked_masks()
    if not masks:
        return scheme
    new_domains = []
    for cell, domain in zip(scheme.cells, scheme.domains):
        args = 0
        for tup in cell:
            args |= _mask(tup)
        allowed = domain
        for m in masks:
            if args & ~m == 0:
                allowed = frozenset(v for v in allowed if (m >> v) & 1)
        new_domains.append(allowed)
    return scheme.with_domains(tuple(new_domains))
