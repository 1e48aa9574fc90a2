from __future__ import annotations

import numpy as np
import pytest

from digraph_census import (Digraph, compute_subsets, digraph_of, enumerate_subsets,
                            restrict_domains, scheme_majority, scheme_wnu3, search)
from digraph_census.kernels import table_closed_under
from digraph_census.schemes import tuple_digit_table
from digraph_census.subsets import SubsetTable


def _graph_from_edges(n, edges):
    bits = ["0"] * (n * n)
    for i, j in edges:
        bits[i * n + j] = "1"
    return Digraph.from_string("".join(bits))


def test_enumeration_order_n4():
    assert enumerate_subsets(4) == (
        (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
        (0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3),
    )


def test_enumeration_sizes_n5():
    subsets = enumerate_subsets(5)
    assert len(subsets) == 25
    assert [len(s) for s in subsets] == [2] * 10 + [3] * 10 + [4] * 5


def test_enumeration_empty_for_n2():
    assert enumerate_subsets(2) == ()


def test_edgeless_digraph_marks_nothing():
    assert compute_subsets(digraph_of(0, 4)).marked() == ()


def test_complete_with_loops_marks_nothing():
    assert compute_subsets(digraph_of((1 << 16) - 1, 4)).marked() == ()


def test_in_neighborhood_and_support_checks():
    g = _graph_from_edges(4, [(2, 0), (3, 0)])
    assert compute_subsets(g).marked() == ((2, 3),)


def test_out_neighborhood_check():
    g = _graph_from_edges(4, [(0, 1), (0, 3)])
    table = compute_subsets(g)
    assert (1, 3) in table.marked()


def test_marks_from_multiple_checks():
    g = _graph_from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    assert compute_subsets(g).marked() == ((0, 1), (2, 3), (1, 2, 3))


def test_closure_marks_intersection_of_two_triples():
    # index 126: the direct checks mark {2,3}, {0,1,2} and {1,2,3}; the
    # closure pass must add their intersection {1,2}
    marked = compute_subsets(digraph_of(126, 4)).marked()
    assert marked == ((1, 2), (2, 3), (0, 1, 2), (1, 2, 3))


def test_restrict_domains_noop_without_marks():
    scheme = scheme_wnu3(4)
    table = compute_subsets(digraph_of(0, 4))
    assert restrict_domains(scheme, table) is scheme


def test_restrict_domains_pair_cell():
    scheme = scheme_wnu3(4)
    table = SubsetTable(4, enumerate_subsets(4),
                        tuple(s == (0, 1) for s in enumerate_subsets(4)))
    restricted = restrict_domains(scheme, table)
    ci = scheme.cells.index(((0, 0, 1), (0, 1, 0), (1, 0, 0)))
    assert restricted.domains[ci] == frozenset({0, 1})
    cj = scheme.cells.index(((0, 0, 2), (0, 2, 0), (2, 0, 0)))
    assert restricted.domains[cj] == frozenset({0, 1, 2, 3})


def test_restrict_domains_majority_triple():
    scheme = scheme_majority(4)
    table = SubsetTable(4, enumerate_subsets(4),
                        tuple(s == (1, 2, 3) for s in enumerate_subsets(4)))
    restricted = restrict_domains(scheme, table)
    ci = scheme.cells.index(((1, 2, 3),))
    assert restricted.domains[ci] == frozenset({1, 2, 3})


def test_restrict_domains_checks_n():
    with pytest.raises(ValueError):
        restrict_domains(scheme_majority(4), compute_subsets(digraph_of(0, 3)))


def test_marked_subsets_closed_under_found_witnesses(rng):
    digits3 = tuple_digit_table(4, 3)
    checked = 0
    for _ in range(200):
        g = digraph_of(rng.randrange(1 << 16), 4)
        table = compute_subsets(g)
        if not table.marks or not any(table.marks):
            continue
        for scheme in (scheme_majority(4), scheme_wnu3(4)):
            out = search(g, restrict_domains(scheme, table))
            if not out.found:
                continue
            for mask in table.marked_masks():
                assert table_closed_under(out.witness, digits3, 3, mask)
                checked += 1
    assert checked > 50
