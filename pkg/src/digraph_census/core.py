"""Digraph representation, exhaustive generation and index arithmetic.

A digraph on ``n`` vertices is an ``n*n`` edge bitstring in row-major order:
position ``i*n + j`` is ``1`` iff there is an edge ``i -> j`` (loops allowed).
Read as a binary number with the ``(0,0)`` edge as the most significant bit,
the bitstring is the digraph's index in ``[0, 2**(n*n))``; generation is a
plain counter over indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

MIN_VERTICES = 2
MAX_VERTICES = 6


class CapacityError(Exception):
    """An instance exceeds the explicit size guard for exhaustive work."""


def _check_n(n: int) -> None:
    if not MIN_VERTICES <= n <= MAX_VERTICES:
        raise ValueError(f"vertex count must be in [{MIN_VERTICES}, {MAX_VERTICES}], got {n}")


@dataclass(frozen=True)
class Digraph:
    """Immutable digraph; ``index`` is the MSB-first edge bitstring value."""

    n: int
    index: int

    def __post_init__(self) -> None:
        _check_n(self.n)
        if not 0 <= self.index < 1 << (self.n * self.n):
            raise ValueError(f"index {self.index} out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[bool]) -> "Digraph":
        _check_n(n)
        if len(edges) != n * n:
            raise ValueError(f"expected {n * n} edge entries, got {len(edges)}")
        idx = 0
        for e in edges:
            idx = (idx << 1) | (1 if e else 0)
        return cls(n, idx)

    @classmethod
    def from_string(cls, text: str, n: int | None = None) -> "Digraph":
        text = text.strip()
        if n is None:
            root = int(round(len(text) ** 0.5))
            if root * root != len(text):
                raise ValueError(f"edge string length {len(text)} is not a square")
            n = root
        if len(text) != n * n or set(text) - {"0", "1"}:
            raise ValueError(f"malformed edge string {text!r} for n={n}")
        return cls(n, int(text, 2) if text else 0)

    @property
    def edges(self) -> tuple[bool, ...]:
        nsq = self.n * self.n
        return tuple(bool((self.index >> (nsq - 1 - t)) & 1) for t in range(nsq))

    def has_edge(self, i: int, j: int) -> bool:
        nsq = self.n * self.n
        return bool((self.index >> (nsq - 1 - (i * self.n + j))) & 1)

    def edge_count(self) -> int:
        return bin(self.index).count("1")

    def to_string(self) -> str:
        return format(self.index, f"0{self.n * self.n}b")

    def adjacency(self) -> np.ndarray:
        """Dense uint8 matrix, ``adj[i, j] = 1`` iff edge ``i -> j``."""
        bits = np.array(self.edges, dtype=np.uint8)
        return bits.reshape(self.n, self.n)

    def apply_permutation(self, perm: Sequence[int]) -> "Digraph":
        """Relabel vertices: the result has edge ``(p(i), p(j))`` iff ``self`` has ``(i, j)``."""
        n = self.n
        if sorted(perm) != list(range(n)):
            raise ValueError(f"{perm!r} is not a permutation of 0..{n - 1}")
        nsq = n * n
        out = 0
        for i in range(n):
            for j in range(n):
                if (self.index >> (nsq - 1 - (i * n + j))) & 1:
                    out |= 1 << (nsq - 1 - (perm[i] * n + perm[j]))
        return Digraph(n, out)

    def reversed(self) -> "Digraph":
        """Edge-reversed (dual) digraph."""
        n = self.n
        nsq = n * n
        out = 0
        for i in range(n):
            for j in range(n):
                if (self.index >> (nsq - 1 - (i * n + j))) & 1:
                    out |= 1 << (nsq - 1 - (j * n + i))
        return Digraph(n, out)


def index_of(g: Digraph) -> int:
    return g.index


def digraph_of(k: int, n: int) -> Digraph:
    _check_n(n)
    if not 0 <= k < 1 << (n * n):
        raise ValueError(f"index {k} out of range for n={n}")
    return Digraph(n, k)


def generate_all(n: int) -> Iterator[Digraph]:
    """All ``2**(n*n)`` digraphs in index order, starting from the edgeless one."""
    _check_n(n)
    for k in range(1 << (n * n)):
        yield Digraph(n, k)


def edge_count(g: Digraph) -> int:
    return g.edge_count()


def all_permutations(n: int) -> list[tuple[int, ...]]:
    """All n! vertex permutations, identity first (lexicographic)."""
    return list(itertools.permutations(range(n)))


def permutation_position_maps(n: int, include_identity: bool = True) -> np.ndarray:
    """Per permutation, where each edge-string position lands.

    ``maps[p, i*n + j] = perm_p(i)*n + perm_p(j)``; the kernels move set bits
    accordingly. Row 0 is the identity when included.
    """
    perms = all_permutations(n)
    if not include_identity:
        perms = perms[1:]
    maps = np.empty((len(perms), n * n), dtype=np.int8)
    for p, perm in enumerate(perms):
        for i in range(n):
            for j in range(n):
                maps[p, i * n + j] = perm[i] * n + perm[j]
    return maps


def write_digraph_lines(graphs: Iterable[Digraph], fh: TextIO) -> int:
    """One digraph per line, ``n*n`` chars of 0/1, newline-terminated."""
    count = 0
    for g in graphs:
        fh.write(g.to_string())
        fh.write("\n")
        count += 1
    return count


def read_digraph_lines(fh: TextIO, n: int | None = None) -> list[Digraph]:
    """Parse the text format; raises ValueError with the offending line number."""
    out: list[Digraph] = []
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            g = Digraph.from_string(line, n)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if n is None:
            n = g.n
        out.append(g)
    return out
