from __future__ import annotations

import itertools

import numpy as np
import pytest

from digraph_census import (Assignment, Digraph, digraph_of, expand_to_table,
                            scheme_majority, scheme_p_given_q, scheme_two_semilattice,
                            scheme_wnu2, scheme_wnu3, search)
from digraph_census.schemes import build_scheme, compile_scheme, tuple_digit_table


def _edgeless_q(n):
    """A verified wnu3 witness to hang a p scheme on (edgeless digraph)."""
    return search(digraph_of(0, n), scheme_wnu3(n)).witness


@pytest.mark.parametrize("n,cells", [(2, 0), (3, 6), (4, 24), (5, 60), (6, 120)])
def test_majority_cell_counts(n, cells):
    scheme = scheme_majority(n)
    assert scheme.cell_count == cells == n * (n - 1) * (n - 2)
    assert len(scheme.forced) == n**3 - cells


@pytest.mark.parametrize("n,cells", [(2, 1), (3, 3), (4, 6), (5, 10), (6, 15)])
def test_wnu2_cell_counts(n, cells):
    scheme = scheme_wnu2(n)
    assert scheme.cell_count == cells == n * (n - 1) // 2
    assert len(scheme.domains[0]) ** scheme.cell_count == n ** cells


def test_wnu2_candidate_space_sizes():
    assert 4 ** scheme_wnu2(4).cell_count == 4096
    assert 5 ** scheme_wnu2(5).cell_count == 9765625


@pytest.mark.parametrize("n,pairs,triples", [(2, 2, 0), (3, 6, 6), (4, 12, 24),
                                             (5, 20, 60), (6, 30, 120)])
def test_wnu3_cell_counts_and_layout(n, pairs, triples):
    scheme = scheme_wnu3(n)
    assert scheme.cell_count == pairs + triples
    for cell in scheme.cells[:pairs]:
        assert len(cell) == 3  # (x,x,y), (x,y,x), (y,x,x)
    for cell in scheme.cells[pairs:]:
        assert len(cell) == 1
        assert len(set(cell[0])) == 3


def test_wnu3_cell_order_n4():
    scheme = scheme_wnu3(4)
    reps = [cell[0] for cell in scheme.cells[:12]]
    assert reps == [(0, 0, 1), (0, 0, 2), (0, 0, 3), (1, 1, 0), (1, 1, 2), (1, 1, 3),
                    (2, 2, 0), (2, 2, 1), (2, 2, 3), (3, 3, 0), (3, 3, 1), (3, 3, 2)]
    assert scheme.cells[12] == ((0, 1, 2),)
    assert scheme.cells[35] == ((3, 2, 1),)


def test_majority_cell_order_n4():
    scheme = scheme_majority(4)
    assert scheme.cells[0] == ((0, 1, 2),)
    assert scheme.cells[1] == ((0, 1, 3),)
    assert scheme.cells[2] == ((0, 2, 1),)
    assert scheme.cells[23] == ((3, 2, 1),)


@pytest.mark.parametrize("n,total,fixed", [(2, 4, 2), (4, 48, 12), (5, 100, 20)])
def test_pq_cell_counts(n, total, fixed):
    scheme = scheme_p_given_q(n, _edgeless_q(n))
    assert scheme.cell_count == total
    assert len(scheme.prefix) == fixed
    assert scheme.free_cell_count == total - fixed


def test_pq_layout_n4():
    scheme = scheme_p_given_q(4, _edgeless_q(4))
    assert [c[0] for c in scheme.cells[:12]] == [
        (0, 1, 0), (0, 2, 0), (0, 3, 0), (1, 0, 1), (1, 2, 1), (1, 3, 1),
        (2, 0, 2), (2, 1, 2), (2, 3, 2), (3, 0, 3), (3, 1, 3), (3, 2, 3)]
    assert scheme.cells[12] == ((0, 0, 1), (0, 1, 1))
    assert scheme.cells[23] == ((3, 3, 2), (3, 2, 2))
    assert len(scheme.cells[24]) == 1


def test_pq_prefix_values_come_from_q():
    n = 3
    q = _edgeless_q(n)
    scheme = scheme_p_given_q(n, q)
    for ci, value in scheme.prefix:
        (x, y, _x) = scheme.cells[ci][0]
        assert value == q[(x * n + x) * n + y]


def test_pq_rejects_bad_q():
    n = 3
    q = np.array(_edgeless_q(n), dtype=np.int8)
    q[0] = 1  # breaks idempotence at (0,0,0)
    with pytest.raises(ValueError, match="wnu3 identities"):
        scheme_p_given_q(n, q)


def test_pq_rejects_non_preserving_q():
    g = Digraph.from_string("010100000")  # two-cycle between 0 and 1
    q = np.zeros(27, dtype=np.int8)
    for x in range(3):
        q[(x * 3 + x) * 3 + x] = x
    # identities hold, but (0,0,1)->(1,1,0) componentwise forces an edge
    # q(0,0,1) -> q(1,1,0), i.e. 0 -> 0, which g lacks
    with pytest.raises(ValueError, match="preserve"):
        scheme_p_given_q(3, q, g)


@pytest.mark.parametrize("kind", ["majority", "wnu2", "wnu3", "two_semilattice", "pq"])
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_coverage_partition(kind, n):
    scheme = build_scheme(kind, n, q_table=_edgeless_q(n) if kind == "pq" else None)
    k = scheme.arity
    owners = {}
    for t, _ in scheme.forced:
        assert t not in owners
        owners[t] = "forced"
    for ci, cell in enumerate(scheme.cells):
        for t in cell:
            assert t not in owners, f"tuple {t} covered twice"
            owners[t] = ci
    assert len(owners) == n**k


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_forced_diagonals(n):
    for kind in ("majority", "wnu2", "wnu3"):
        scheme = build_scheme(kind, n)
        forced = dict(scheme.forced)
        for x in range(n):
            diag = (x,) * scheme.arity
            assert forced[diag] == x


def test_majority_forces_repeated_value():
    forced = dict(scheme_majority(4).forced)
    assert forced[(1, 1, 3)] == 1
    assert forced[(1, 3, 1)] == 1
    assert forced[(3, 1, 1)] == 1


def test_expand_boolean_majority_all_forced():
    scheme = scheme_majority(2)
    table = expand_to_table(scheme, Assignment(()))
    assert list(table) == [0, 0, 0, 1, 0, 1, 1, 1]


def test_expand_wnu2_example():
    scheme = scheme_wnu2(2)
    table = expand_to_table(scheme, [0])
    assert list(table) == [0, 0, 0, 1]  # f(0,0)=0 f(0,1)=f(1,0)=0 f(1,1)=1


def test_expand_spreads_value_over_linkage_class():
    scheme = scheme_wnu3(4)
    values = [x for x, y in itertools.product(range(4), repeat=2) if x != y]
    values += [t[0] for t in (c[0] for c in scheme.cells[12:])]
    table = expand_to_table(scheme, values)
    n = 4
    for ci, cell in enumerate(scheme.cells):
        for t in cell:
            code = (t[0] * n + t[1]) * n + t[2]
            assert table[code] == values[ci]


def test_expand_rejects_incomplete_assignment():
    scheme = scheme_wnu2(3)
    with pytest.raises(ValueError, match="complete"):
        expand_to_table(scheme, Assignment((0, None, 1)))
    with pytest.raises(ValueError, match="cell values"):
        expand_to_table(scheme, [0])


def test_with_prefix_validation():
    scheme = scheme_wnu3(3)
    with pytest.raises(ValueError):
        scheme.with_prefix(((99, 0),))
    with pytest.raises(ValueError):
        scheme.with_prefix(((0, 7),))
    with pytest.raises(ValueError):
        scheme.with_prefix(((0, 1), (0, 2)))


def test_two_semilattice_shares_wnu2_shape():
    a, b = scheme_two_semilattice(4), scheme_wnu2(4)
    assert a.cells == b.cells and a.forced == b.forced
    assert a.kind == "two_semilattice"


def test_compile_scheme_arrays():
    scheme = scheme_wnu3(3)
    comp = compile_scheme(scheme)
    assert comp.cell_ptr[-1] == comp.cells_flat.size
    assert comp.tup_digits.shape == (27, 3)
    assert comp.fixed_mask.sum() == 0
    digits = tuple_digit_table(3, 3)
    assert tuple(digits[13]) == (1, 1, 1)
