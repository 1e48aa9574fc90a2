"""Hot kernels: dedupe scans, the backtracking engine, and table verification.

Everything here is written as plain loops over primitive numpy arrays so the
functions compile under numba and still run unchanged on the pure-Python
backend. Digraphs are passed either as integer indices (MSB-first edge
bitstrings) plus permutation position maps, or as dense ``adj`` matrices.

Search-engine conventions:

* a *tuple code* packs a k-tuple of vertices as a base-n number, most
  significant digit first, so code order is lexicographic tuple order;
* ``cells_flat``/``cell_ptr`` hold each cell's linkage class (CSR layout);
* ``fixed_mask`` marks cells whose value is pinned before the search
  (scheme prefixes, the q-derived values of the two-term system);
* search status codes: 1 found, 0 unsatisfiable, 2 undecided (budget).
"""

from __future__ import annotations

import numpy as np

from .backend import njit

FOUND = 1
UNSAT = 0
UNDECIDED = 2


@njit
def permuted_index(idx, pos_map, nsq):
    """Index of the relabelled digraph: bit t moves to position pos_map[t]."""
    out = 0
    for t in range(nsq):
        if (idx >> (nsq - 1 - t)) & 1:
            out |= 1 << (nsq - 1 - pos_map[t])
    return out


@njit
def popcount_table(nsq):
    total = 1 << nsq
    pop = np.zeros(total, dtype=np.int8)
    for i in range(1, total):
        pop[i] = pop[i >> 1] + (i & 1)
    return pop


@njit
def sieve_flags(nsq, pos_maps):
    """Ascending scan; each unflagged index flags its larger permuted copies.

    ``pos_maps`` must exclude the identity permutation.
    """
    total = 1 << nsq
    flags = np.zeros(total, dtype=np.uint8)
    n_perms = pos_maps.shape[0]
    for k in range(total):
        if flags[k]:
            continue
        for p in range(n_perms):
            idx = permuted_index(k, pos_maps[p], nsq)
            if idx > k:
                flags[idx] = 1
    return flags


@njit
def bruteforce_flags(nsq, pos_maps):
    """Pairwise isomorphism scan restricted to equal edge counts.

    For each unflagged index in ascending order, every later unflagged index
    with the same edge count is tested permutation by permutation and flagged
    when it is a relabelled copy. ``pos_maps`` excludes the identity.
    """
    total = 1 << nsq
    flags = np.zeros(total, dtype=np.uint8)
    pop = popcount_table(nsq)
    order = np.argsort(pop, kind="mergesort")  # stable: ascending index per bucket
    bucket_end = np.zeros(nsq + 2, dtype=np.int64)
    for i in range(total):
        bucket_end[pop[i] + 1] += 1
    for c in range(1, nsq + 2):
        bucket_end[c] += bucket_end[c - 1]
    n_perms = pos_maps.shape[0]
    for a in range(total):
        i = order[a]
        if flags[i]:
            continue
        for b in range(a + 1, bucket_end[pop[i] + 1]):
            j = order[b]
            if flags[j]:
                continue
            for p in range(n_perms):
                if permuted_index(i, pos_maps[p], nsq) == j:
                    flags[j] = 1
                    break
    return flags


@njit
def canonical_index(idx, pos_maps, nsq):
    """Least index over all relabellings; ``pos_maps`` excludes the identity."""
    best = idx
    for p in range(pos_maps.shape[0]):
        c = permuted_index(idx, pos_maps[p], nsq)
        if c < best:
            best = c
    return best


@njit
def canonical_many(indices, pos_maps, nsq):
    out = np.empty(indices.size, dtype=np.int64)
    for i in range(indices.size):
        out[i] = canonical_index(indices[i], pos_maps, nsq)
    return out


@njit
def _pair_ok(adj, tup_digits, k, s, t, vs, vt):
    """Edge-preservation constraint between two determined tuples, both ways."""
    ok = True
    for i in range(k):
        if adj[tup_digits[s, i], tup_digits[t, i]] == 0:
            ok = False
            break
    if ok and adj[vs, vt] == 0:
        return False
    ok = True
    for i in range(k):
        if adj[tup_digits[t, i], tup_digits[s, i]] == 0:
            ok = False
            break
    if ok and adj[vt, vs] == 0:
        return False
    return True


@njit
def check_cell_value(adj, tup_digits, k, cell_ptr, cells_flat,
                     forced_tuples, forced_values, values, ci, v):
    """Compatibility of assigning value ``v`` to cell ``ci``.

    Every tuple of the cell's linkage class is tested against every tuple with
    a determined value: forced tuples, the classes of all cells whose entry in
    ``values`` is set (fixed or already assigned), and the candidate class
    itself (including each tuple against itself).
    """
    n_cells = cell_ptr.size - 1
    for a in range(cell_ptr[ci], cell_ptr[ci + 1]):
        s = cells_flat[a]
        for f in range(forced_tuples.size):
            if not _pair_ok(adj, tup_digits, k, s, forced_tuples[f], v, forced_values[f]):
                return False
        for cj in range(n_cells):
            w = v if cj == ci else values[cj]
            if w < 0:
                continue
            for b in range(cell_ptr[cj], cell_ptr[cj + 1]):
                if not _pair_ok(adj, tup_digits, k, s, cells_flat[b], v, w):
                    return False
    return True


@njit
def _determined_consistent(adj, tup_digits, k, cell_ptr, cells_flat,
                           forced_tuples, forced_values, values):
    """Mutual consistency of the forced map and any pre-fixed cells."""
    nf = forced_tuples.size
    for f in range(nf):
        for g in range(f, nf):
            if not _pair_ok(adj, tup_digits, k, forced_tuples[f], forced_tuples[g],
                            forced_values[f], forced_values[g]):
                return False
    n_cells = cell_ptr.size - 1
    for ci in range(n_cells):
        if values[ci] < 0:
            continue
        if not check_cell_value(adj, tup_digits, k, cell_ptr, cells_flat,
                                forced_tuples, forced_values, values, ci, values[ci]):
            return False
    return True


@njit
def _build_compat(adj, tup_digits, k, cell_ptr, cells_flat, forced_tuples, forced_values, n):
    """State-independent compatibility tables, hoisted out of the search loop.

    ``solo_ok[ci, v]``: cell ci may take v against the forced tuples and its
    own linkage class (including each tuple against itself).
    ``pair_tab[ci*n+v, cj*n+w]``: classes ci@v and cj@w are mutually
    edge-consistent; symmetric because the underlying rule checks both
    directions.
    """
    n_cells = cell_ptr.size - 1
    solo_ok = np.ones((n_cells, n), dtype=np.uint8)
    for ci in range(n_cells):
        for v in range(n):
            ok = True
            for a in range(cell_ptr[ci], cell_ptr[ci + 1]):
                s = cells_flat[a]
                for f in range(forced_tuples.size):
                    if not _pair_ok(adj, tup_digits, k, s, forced_tuples[f], v, forced_values[f]):
                        ok = False
                        break
                if ok:
                    for b in range(cell_ptr[ci], cell_ptr[ci + 1]):
                        if not _pair_ok(adj, tup_digits, k, s, cells_flat[b], v, v):
                            ok = False
                            break
                if not ok:
                    break
            solo_ok[ci, v] = 1 if ok else 0
    pair_tab = np.ones((n_cells * n, n_cells * n), dtype=np.uint8)
    for ci in range(n_cells):
        for cj in range(ci + 1, n_cells):
            for v in range(n):
                for w in range(n):
                    ok = True
                    for a in range(cell_ptr[ci], cell_ptr[ci + 1]):
                        for b in range(cell_ptr[cj], cell_ptr[cj + 1]):
                            if not _pair_ok(adj, tup_digits, k,
                                            cells_flat[a], cells_flat[b], v, w):
                                ok = False
                                break
                        if not ok:
                            break
                    if not ok:
                        pair_tab[ci * n + v, cj * n + w] = 0
                        pair_tab[cj * n + w, ci * n + v] = 0
    return solo_ok, pair_tab


@njit
def run_search(adj, tup_digits, k, cell_ptr, cells_flat, forced_tuples, forced_values,
               domain_masks, fixed_mask, init_values, resume, budget):
    """Depth-first search for a compatible complete assignment.

    Cells are filled in scheme order, values ascending within each cell's
    domain, so the first solution is the lexicographically least one. With
    ``resume`` set, ``init_values`` must be a complete assignment and the scan
    continues from the next candidate after it (witness enumeration).
    ``budget`` caps compatibility checks; 0 or negative means unlimited.

    Returns ``(status, values, nodes, backtracks)``.
    """
    n_cells = cell_ptr.size - 1
    n = adj.shape[0]
    values = init_values.copy()
    nodes = 0
    backtracks = 0

    det_values = np.full(n_cells, -1, dtype=np.int8)
    for ci in range(n_cells):
        if fixed_mask[ci] == 1:
            det_values[ci] = values[ci]
    if not _determined_consistent(adj, tup_digits, k, cell_ptr, cells_flat,
                                  forced_tuples, forced_values, det_values):
        return UNSAT, values, nodes, backtracks

    free_cells = np.empty(n_cells, dtype=np.int64)
    n_free = 0
    for ci in range(n_cells):
        if fixed_mask[ci] == 0:
            free_cells[n_free] = ci
            n_free += 1

    if n_free == 0:
        if resume:
            return UNSAT, values, nodes, backtracks
        return FOUND, values, nodes, backtracks

    solo_ok, pair_tab = _build_compat(adj, tup_digits, k, cell_ptr, cells_flat,
                                      forced_tuples, forced_values, n)

    if resume:
        pos = n_free - 1
    else:
        for a in range(n_free):
            values[free_cells[a]] = -1
        pos = 0

    while True:
        ci = free_cells[pos]
        placed = False
        for v in range(values[ci] + 1, n):  # -1 on first arrival, so starts at 0
            if (domain_masks[ci] >> v) & 1 == 0:
                continue
            nodes += 1
            values[ci] = v
            ok = solo_ok[ci, v] == 1
            if ok:
                row = ci * n + v
                for cj in range(n_cells):
                    w = values[cj]
                    if w >= 0 and cj != ci and pair_tab[row, cj * n + w] == 0:
                        ok = False
                        break
            if ok:
                placed = True
                break
            if budget > 0 and nodes >= budget:
                return UNDECIDED, values, nodes, backtracks
        if placed:
            if pos == n_free - 1:
                return FOUND, values, nodes, backtracks
            pos += 1
        else:
            values[ci] = -1
            backtracks += 1
            pos -= 1
            if pos < 0:
                return UNSAT, values, nodes, backtracks


@njit
def expand_table(n_pow_k, cell_ptr, cells_flat, forced_tuples, forced_values, values):
    """Total operation table from forced entries plus per-cell values."""
    table = np.full(n_pow_k, -1, dtype=np.int8)
    for f in range(forced_tuples.size):
        table[forced_tuples[f]] = forced_values[f]
    n_cells = cell_ptr.size - 1
    for ci in range(n_cells):
        for a in range(cell_ptr[ci], cell_ptr[ci + 1]):
            table[cells_flat[a]] = values[ci]
    return table


@njit
def preserves_edges(adj, tup_digits, k, table):
    """Definition check: componentwise edges between tuples force an edge
    between their values."""
    m = table.size
    for s in range(m):
        for t in range(m):
            ok = True
            for i in range(k):
                if adj[tup_digits[s, i], tup_digits[t, i]] == 0:
                    ok = False
                    break
            if ok and adj[table[s], table[t]] == 0:
                return False
    return True


@njit
def absorption_holds(table, n):
    """Two-semilattice absorption f(f(x,y),x) = f(x,y) on a binary table."""
    for x in range(n):
        for y in range(n):
            v = table[x * n + y]
            if table[v * n + x] != v:
                return False
    return True


@njit
def run_oracle(adj, tup_digits, k, cell_ptr, cells_flat, forced_tuples, forced_values,
               dom_flat, dom_ptr, fixed_mask, init_values, absorption):
    """Exhaustive scan: first complete assignment whose table verifies.

    Assignments are enumerated lexicographically (cells in scheme order, the
    last free cell changing fastest) over the per-cell domain value lists in
    ``dom_flat``/``dom_ptr``; each one is expanded to a full table and tested
    directly against the edge relation (plus the two-semilattice absorption
    identity when ``absorption`` is set). Returns ``(status, values, tested)``.
    """
    n_cells = cell_ptr.size - 1
    n_pow_k = tup_digits.shape[0]
    values = init_values.copy()

    free_cells = np.empty(n_cells, dtype=np.int64)
    n_free = 0
    for ci in range(n_cells):
        if fixed_mask[ci] == 0:
            free_cells[n_free] = ci
            n_free += 1

    choice = np.zeros(max(n_free, 1), dtype=np.int64)
    for a in range(n_free):
        ci = free_cells[a]
        if dom_ptr[ci + 1] == dom_ptr[ci]:
            return UNSAT, values, 0
        values[ci] = dom_flat[dom_ptr[ci]]

    tested = 0
    while True:
        tested += 1
        table = expand_table(n_pow_k, cell_ptr, cells_flat,
                             forced_tuples, forced_values, values)
        ok = preserves_edges(adj, tup_digits, k, table)
        if ok and absorption:
            ok = absorption_holds(table, adj.shape[0])
        if ok:
            return FOUND, values, tested
        # odometer step
        a = n_free - 1
        while a >= 0:
            ci = free_cells[a]
            if choice[a] + 1 < dom_ptr[ci + 1] - dom_ptr[ci]:
                choice[a] += 1
                values[ci] = dom_flat[dom_ptr[ci] + choice[a]]
                break
            choice[a] = 0
            values[ci] = dom_flat[dom_ptr[ci]]
            a -= 1
        if a < 0:
            return UNSAT, values, tested


@njit
def table_closed_under(table, tup_digits, k, subset_mask):
    """Whether the operation maps tuples drawn from the subset back into it."""
    m = table.shape[0]
    for s in range(m):
        inside = True
        for i in range(k):
            if (subset_mask >> tup_digits[s, i]) & 1 == 0:
                inside = False
                break
        if inside and (subset_mask >> table[s]) & 1 == 0:
            return False
    return True
