"""Cell tables for each polymorphism kind: free cells, linkage classes, forced
values.

A scheme partitions the n**k argument tuples of a k-ary operation into

* forced tuples, whose value the identities predetermine (diagonals always;
  for majority every tuple with a repeated entry), and
* cells: one representative tuple per linkage class, all members sharing the
  searched value.

Cell order follows the layout the census uses throughout: constrained cells
(the two-entry classes over vertex pairs) first, distinct triples last, each
block lexicographic. The order is semantically irrelevant but pins down which
witness is "first", so it is part of the contract.

Kinds:

``majority``      t(x,x,y) = t(x,y,x) = t(y,x,x) = x
``wnu2``          binary idempotent commutative
``wnu3``          idempotent, t(x,x,y) = t(x,y,x) = t(y,x,x)
``pq``            the two-term system p(x,x,y) = p(x,y,y),
                  p(x,y,x) = q(x,x,y) = q(x,y,x) = q(y,x,x), built around a
                  verified wnu3 witness q whose values pin p on the (x,y,x)
                  tuples
``two_semilattice``  wnu2 shape plus the absorption f(f(x,y),x) = f(x,y);
                  the nested identity is not expressible as linked cells, so
                  only the exhaustive oracle decides this kind
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import kernels
from .core import Digraph

KINDS = ("majority", "wnu2", "wnu3", "pq", "two_semilattice")

Tup = tuple[int, ...]


@dataclass(frozen=True)
class IdentityScheme:
    kind: str
    n: int
    arity: int
    cells: tuple[tuple[Tup, ...], ...]  # linkage class per cell, representative first
    forced: tuple[tuple[Tup, int], ...]
    domains: tuple[frozenset[int], ...]
    prefix: tuple[tuple[int, int], ...] = ()  # (cell index, pinned value)

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    @property
    def free_cell_count(self) -> int:
        return len(self.cells) - len(self.prefix)

    def with_domains(self, domains: tuple[frozenset[int], ...]) -> "IdentityScheme":
        if len(domains) != len(self.cells):
            raise ValueError("one domain per cell required")
        return replace(self, domains=domains)

    def with_prefix(self, prefix: tuple[tuple[int, int], ...]) -> "IdentityScheme":
        seen = set()
        for ci, v in prefix:
            if not 0 <= ci < len(self.cells) or not 0 <= v < self.n or ci in seen:
                raise ValueError(f"bad prefix entry ({ci}, {v})")
            seen.add(ci)
        return replace(self, prefix=tuple(prefix))

    def with_cell_order(self, order: tuple[int, ...]) -> "IdentityScheme":
        """Same scheme with cells permuted; ``order[i]`` is the old index of
        the new i-th cell. Order only affects which witness the search meets
        first, never whether one exists."""
        if sorted(order) != list(range(len(self.cells))):
            raise ValueError("order must be a permutation of the cell indices")
        new_pos = {old: new for new, old in enumerate(order)}
        return replace(
            self,
            cells=tuple(self.cells[i] for i in order),
            domains=tuple(self.domains[i] for i in order),
            prefix=tuple(sorted((new_pos[ci], v) for ci, v in self.prefix)),
        )


@dataclass
class Assignment:
    """Partial map from cells to values; ``None`` marks unset cells."""

    values: tuple[int | None, ...]
    cursor: int = 0

    @property
    def complete(self) -> bool:
        return all(v is not None for v in self.values)


def _tuple_code(t: Tup, n: int) -> int:
    code = 0
    for d in t:
        code = code * n + d
    return code


@lru_cache(maxsize=None)
def tuple_digit_table(n: int, k: int) -> np.ndarray:
    """Digits of every packed tuple code, code order = lexicographic order."""
    table = np.empty((n**k, k), dtype=np.int8)
    for code, tup in enumerate(itertools.product(range(n), repeat=k)):
        table[code] = tup
    return table


def _full_domains(count: int, n: int) -> tuple[frozenset[int], ...]:
    dom = frozenset(range(n))
    return (dom,) * count


def _distinct_triples(n: int) -> list[Tup]:
    return [t for t in itertools.product(range(n), repeat=3) if len(set(t)) == 3]


def _ordered_pairs(n: int) -> list[tuple[int, int]]:
    return [(x, y) for x in range(n) for y in range(n) if x != y]


@lru_cache(maxsize=None)
def scheme_majority(n: int) -> IdentityScheme:
    """Free cells: distinct triples; every repeated-entry tuple is forced."""
    forced = []
    for t in itertools.product(range(n), repeat=3):
        if len(set(t)) < 3:
            rep = t[0] if t.count(t[0]) >= 2 else t[1]
            forced.append((t, rep))
    cells = tuple((t,) for t in _distinct_triples(n))
    return IdentityScheme("majority", n, 3, cells, tuple(forced), _full_domains(len(cells), n))


@lru_cache(maxsize=None)
def scheme_wnu2(n: int) -> IdentityScheme:
    forced = tuple((((x, x), x)) for x in range(n))
    cells = tuple((((x, y), (y, x))) for x, y in itertools.combinations(range(n), 2))
    return IdentityScheme("wnu2", n, 2, cells, forced, _full_domains(len(cells), n))


@lru_cache(maxsize=None)
def scheme_two_semilattice(n: int) -> IdentityScheme:
    base = scheme_wnu2(n)
    return replace(base, kind="two_semilattice")


@lru_cache(maxsize=None)
def scheme_wnu3(n: int) -> IdentityScheme:
    """Pair cells (x,x,y)~(x,y,x)~(y,x,x) first, then distinct triples."""
    forced = tuple((((x, x, x), x)) for x in range(n))
    cells: list[tuple[Tup, ...]] = []
    for x, y in _ordered_pairs(n):
        cells.append(((x, x, y), (x, y, x), (y, x, x)))
    for t in _distinct_triples(n):
        cells.append((t,))
    return IdentityScheme("wnu3", n, 3, tuple(cells), forced, _full_domains(len(cells), n))


def scheme_p_given_q(n: int, q_table, g: Digraph | None = None) -> IdentityScheme:
    """Scheme for the first term of the two-term system, given the second.

    Layout: the (x,y,x) tuples come first as cells pinned to q(x,x,y); then
    one cell per ordered pair with linkage class {(x,x,y), (x,y,y)}; then the
    distinct triples. Diagonals are forced (q is idempotent). ``q_table`` must
    be a verified wnu3 witness; pass ``g`` to also check edge preservation.
    """
    q = np.asarray(q_table, dtype=np.int8)
    if q.shape != (n**3,):
        raise ValueError(f"q table must have {n**3} entries")
    if not _wnu3_identities_hold(q, n):
        raise ValueError("q table does not satisfy the wnu3 identities")
    if g is not None:
        if g.n != n:
            raise ValueError(f"digraph has n={g.n}, scheme n={n}")
        if not kernels.preserves_edges(g.adjacency(), tuple_digit_table(n, 3), 3, q):
            raise ValueError("q table does not preserve the digraph's edges")

    forced = tuple((((x, x, x), x)) for x in range(n))
    cells: list[tuple[Tup, ...]] = []
    prefix: list[tuple[int, int]] = []
    for x, y in _ordered_pairs(n):
        cells.append(((x, y, x),))
        prefix.append((len(cells) - 1, int(q[_tuple_code((x, x, y), n)])))
    for x, y in _ordered_pairs(n):
        cells.append(((x, x, y), (x, y, y)))
    for t in _distinct_triples(n):
        cells.append((t,))
    return IdentityScheme("pq", n, 3, tuple(cells), forced,
                          _full_domains(len(cells), n), tuple(prefix))


def build_scheme(kind: str, n: int, q_table=None, g: Digraph | None = None) -> IdentityScheme:
    if kind == "majority":
        return scheme_majority(n)
    if kind == "wnu2":
        return scheme_wnu2(n)
    if kind == "wnu3":
        return scheme_wnu3(n)
    if kind == "two_semilattice":
        return scheme_two_semilattice(n)
    if kind == "pq":
        if q_table is None:
            raise ValueError("the pq scheme needs a q witness table")
        return scheme_p_given_q(n, q_table, g)
    raise ValueError(f"unknown scheme kind {kind!r}; expected one of {KINDS}")


def _wnu3_identities_hold(table: np.ndarray, n: int) -> bool:
    for x in range(n):
        if table[_tuple_code((x, x, x), n)] != x:
            return False
        for y in range(n):
            a = table[_tuple_code((x, x, y), n)]
            if table[_tuple_code((x, y, x), n)] != a or table[_tuple_code((y, x, x), n)] != a:
                return False
    return True


@dataclass(frozen=True)
class CompiledScheme:
    """Scheme lowered to the primitive arrays the kernels consume."""

    n: int
    arity: int
    tup_digits: np.ndarray
    cell_ptr: np.ndarray
    cells_flat: np.ndarray
    forced_tuples: np.ndarray
    forced_values: np.ndarray
    domain_masks: np.ndarray
    fixed_mask: np.ndarray
    fixed_values: np.ndarray  # int8 per cell, -1 where free


@lru_cache(maxsize=256)
def compile_scheme(scheme: IdentityScheme) -> CompiledScheme:
    n, k = scheme.n, scheme.arity
    cell_ptr = np.zeros(len(scheme.cells) + 1, dtype=np.int32)
    flat: list[int] = []
    for ci, cell in enumerate(scheme.cells):
        flat.extend(_tuple_code(t, n) for t in cell)
        cell_ptr[ci + 1] = len(flat)
    forced_tuples = np.array([_tuple_code(t, n) for t, _ in scheme.forced], dtype=np.int32)
    forced_values = np.array([v for _, v in scheme.forced], dtype=np.int8)
    domain_masks = np.zeros(len(scheme.cells), dtype=np.int64)
    for ci, dom in enumerate(scheme.domains):
        for v in dom:
            domain_masks[ci] |= 1 << v
    fixed_mask = np.zeros(len(scheme.cells), dtype=np.uint8)
    fixed_values = np.full(len(scheme.cells), -1, dtype=np.int8)
    for ci, v in scheme.prefix:
        fixed_mask[ci] = 1
        fixed_values[ci] = v
    return CompiledScheme(
        n=n,
        arity=k,
        tup_digits=tuple_digit_table(n, k),
        cell_ptr=cell_ptr,
        cells_flat=np.array(flat, dtype=np.int32),
        forced_tuples=forced_tuples,
        forced_values=forced_values,
        domain_masks=domain_masks,
        fixed_mask=fixed_mask,
        fixed_values=fixed_values,
    )


def expand_to_table(scheme: IdentityScheme, assignment: Assignment | list[int] | np.ndarray) -> np.ndarray:
    """Total operation table on n**k tuple codes from a complete assignment."""
    if isinstance(assignment, Assignment):
        raw = assignment.values
    else:
        raw = tuple(assignment)
    if len(raw) != len(scheme.cells):
        raise ValueError(f"expected {len(scheme.cells)} cell values, got {len(raw)}")
    if any(v is None or not 0 <= int(v) < scheme.n for v in raw):
        raise ValueError("assignment is not complete")
    comp = compile_scheme(scheme)
    values = np.array([int(v) for v in raw], dtype=np.int8)
    table = kernels.expand_table(scheme.n**scheme.arity, comp.cell_ptr, comp.cells_flat,
                                 comp.forced_tuples, comp.forced_values, values)
    return table
