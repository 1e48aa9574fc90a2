"""Isomorphism-class dedupe: pairwise brute force, orbit sieve, canonical form.

Both dedupe methods produce the same flag vector: entry k is 1 iff digraph k
is a relabelled copy of some smaller-index digraph, so each class keeps its
least index as representative. ``canonical_index`` (least index over all
relabellings) is the oracle both are checked against.

On the numba backend the scans run as compiled kernels. The pure-Python
backend uses split-table lookups (a bit permutation distributes over disjoint
bit sets, so an index permutes as ``lut_hi[idx >> lo] | lut_lo[idx & mask]``)
and vectorizes over permutations; the flag semantics are identical.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .backend import USING_NUMBA
from .core import CapacityError, Digraph, permutation_position_maps

_MAX_FULL_SCAN_BITS = 25  # n=5; a full catalog scan beyond this is out of reach


@dataclass(frozen=True)
class ClassFlags:
    """Per-index copy flags; exactly one unflagged member (the least) per class."""

    n: int
    is_copy: np.ndarray  # uint8, length 2**(n*n)

    def representatives(self) -> np.ndarray:
        return np.flatnonzero(self.is_copy == 0)

    def class_count(self) -> int:
        return int(np.count_nonzero(self.is_copy == 0))


def _check_scan_size(n: int) -> int:
    nsq = n * n
    if nsq > _MAX_FULL_SCAN_BITS:
        raise CapacityError(f"full catalog scan for n={n} needs 2**{nsq} entries")
    return nsq


def _split_luts(n: int) -> tuple[int, np.ndarray, np.ndarray]:
    """Per-permutation lookup tables over the high/low halves of the index."""
    nsq = n * n
    maps = permutation_position_maps(n, include_identity=False)
    hi_bits = nsq // 2
    lo_bits = nsq - hi_bits
    lut_hi = np.zeros((maps.shape[0], 1 << hi_bits), dtype=np.int64)
    lut_lo = np.zeros((maps.shape[0], 1 << lo_bits), dtype=np.int64)
    hi_vals = np.arange(1 << hi_bits, dtype=np.int64)
    lo_vals = np.arange(1 << lo_bits, dtype=np.int64)
    for p in range(maps.shape[0]):
        for t in range(hi_bits):
            weight = np.int64(1) << (nsq - 1 - int(maps[p, t]))
            lut_hi[p] |= ((hi_vals >> (hi_bits - 1 - t)) & 1) * weight
        for t in range(hi_bits, nsq):
            weight = np.int64(1) << (nsq - 1 - int(maps[p, t]))
            lut_lo[p] |= ((lo_vals >> (nsq - 1 - t)) & 1) * weight
    return lo_bits, lut_hi, lut_lo


def _copies_of(k: int, lo_bits: int, lut_hi: np.ndarray, lut_lo: np.ndarray) -> np.ndarray:
    return lut_hi[:, k >> lo_bits] | lut_lo[:, k & ((1 << lo_bits) - 1)]


def _sieve_python(n: int) -> np.ndarray:
    nsq = n * n
    total = 1 << nsq
    lo_bits, lut_hi, lut_lo = _split_luts(n)
    flags = np.zeros(total, dtype=np.uint8)
    window = 1 << 14
    k = 0
    while k < total:
        chunk = flags[k : k + window]
        off = int(chunk.argmin())
        if chunk[off]:  # whole window flagged
            k += len(chunk)
            continue
        k += off
        copies = _copies_of(k, lo_bits, lut_hi, lut_lo)
        flags[copies[copies > k]] = 1
        k += 1
    return flags


def _bruteforce_python(n: int) -> np.ndarray:
    nsq = n * n
    total = 1 << nsq
    lo_bits, lut_hi, lut_lo = _split_luts(n)
    pop = np.bitwise_count(np.arange(total, dtype=np.int64))
    order = np.argsort(pop, kind="stable")
    flags = np.zeros(total, dtype=np.uint8)
    bucket_bounds = np.searchsorted(pop[order], np.arange(nsq + 2))
    for c in range(nsq + 1):
        lo, hi = int(bucket_bounds[c]), int(bucket_bounds[c + 1])
        bucket = order[lo:hi]
        for a in range(bucket.size):
            i = int(bucket[a])
            if flags[i]:
                continue
            later = bucket[a + 1 :]
            later = later[flags[later] == 0]
            if later.size == 0:
                continue
            copies = _copies_of(i, lo_bits, lut_hi, lut_lo)
            flags[later[np.isin(later, copies)]] = 1
    return flags


def dedupe_sieve(n: int) -> ClassFlags:
    """Ascending orbit sieve over the full catalog for ``n`` vertices."""
    nsq = _check_scan_size(n)
    if USING_NUMBA:
        maps = permutation_position_maps(n, include_identity=False)
        flags = kernels.sieve_flags(nsq, maps)
    else:
        flags = _sieve_python(n)
    return ClassFlags(n, flags)


def dedupe_bruteforce(n: int) -> ClassFlags:
    """Pairwise brute-force dedupe (equal edge counts only) over the catalog."""
    nsq = _check_scan_size(n)
    if USING_NUMBA:
        maps = permutation_position_maps(n, include_identity=False)
        flags = kernels.bruteforce_flags(nsq, maps)
    else:
        flags = _bruteforce_python(n)
    return ClassFlags(n, flags)


def canonical_index(g: Digraph) -> int:
    """Least index over all vertex relabellings of ``g``."""
    maps = permutation_position_maps(g.n, include_identity=False)
    return int(kernels.canonical_index(g.index, maps, g.n * g.n))


def canonical_indices(indices: np.ndarray, n: int) -> np.ndarray:
    """Vectorized canonical form for many digraph indices at once."""
    indices = np.asarray(indices, dtype=np.int64)
    if USING_NUMBA:
        maps = permutation_position_maps(n, include_identity=False)
        return kernels.canonical_many(indices, maps, n * n)
    lo_bits, lut_hi, lut_lo = _split_luts(n)
    best = indices.copy()
    mask = (1 << lo_bits) - 1
    for p in range(lut_hi.shape[0]):
        np.minimum(best, lut_hi[p][indices >> lo_bits] | lut_lo[p][indices & mask], out=best)
    return best


_BITMAP_MAGIC = b"DGCF"


def write_flag_bitmap(flags: ClassFlags, path: str | Path) -> None:
    """Raw little-endian bit file: 8-byte header (n, bit count), then packed bits."""
    packed = np.packbits(flags.is_copy, bitorder="little")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", flags.n, flags.is_copy.size))
        fh.write(packed.tobytes())


def read_flag_bitmap(path: str | Path) -> ClassFlags:
    with open(path, "rb") as fh:
        header = fh.read(8)
        if len(header) != 8:
            raise ValueError(f"{path}: truncated header")
        n, count = struct.unpack("<II", header)
        if count != 1 << (n * n):
            raise ValueError(f"{path}: bit count {count} does not match n={n}")
        data = np.frombuffer(fh.read(), dtype=np.uint8)
    bits = np.unpackbits(data, count=count, bitorder="little")
    return ClassFlags(n, bits.astype(np.uint8))
