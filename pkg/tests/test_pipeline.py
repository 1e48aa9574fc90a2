from __future__ import annotations

import io

import numpy as np
import pytest

from digraph_census import digraph_of, search, verify_table
from digraph_census.pipeline import (CensusOptions, CensusReport, classify_class,
                                     decide_with_relabel, degree_sorted_copy,
                                     duality_pairing, read_catalog, read_report,
                                     run_census, transport_table,
                                     two_semilattice_check, write_report)
from digraph_census.schemes import scheme_wnu3


def test_two_vertex_census():
    report = run_census(2)
    assert report.class_count == 10
    assert report.majority_count == 10
    assert report.wnu2_count == 0
    assert report.wnu3_minimal == []
    assert report.pq_satisfied == []
    assert report.undecided == []


@pytest.fixture(scope="module")
def census3():
    return run_census(3)


def test_three_vertex_census_counts(census3):
    assert census3.class_count == 104
    assert census3.wnu3_minimal == []
    assert census3.undecided == []


def test_three_vertex_witnesses_verify(census3):
    for index, res in census3.results.items():
        g = digraph_of(index, 3)
        for kind, table in res.witnesses.items():
            if kind in ("q", "p"):
                continue
            assert verify_table(g, np.array(table, dtype=np.int8), kind)


def test_three_vertex_wnu3_classes_have_majority_or_two_semilattice():
    flags = two_semilattice_check(3)
    assert len(flags) == 104
    for index, f in flags.items():
        if f["wnu3"]:
            assert f["majority"] or f["two_semilattice"], index


def test_duality_pairing_involution():
    reps = [0, 856]
    pairing = duality_pairing(reps, 4)
    for r in reps:
        d = pairing.partner[r]
        assert duality_pairing([d], 4).partner[d] == r


def test_edgeless_is_self_dual():
    pairing = duality_pairing([0], 4)
    assert pairing.self_dual == [0]
    assert pairing.pairs == []


def test_degree_sorted_copy_is_isomorphic():
    g = digraph_of(326, 4)
    h, perm = degree_sorted_copy(g)
    assert sorted(perm) == [0, 1, 2, 3]
    assert g.apply_permutation(perm) == h


def test_decide_with_relabel_on_hard_instance():
    g = digraph_of(326, 4)
    out, witness = decide_with_relabel(g, "wnu3", budget=100_000)
    assert out.decided and not out.found and witness is None


def test_transport_table_round_trip(rng):
    for _ in range(10):
        g = digraph_of(rng.randrange(1 << 16), 4)
        h, perm = degree_sorted_copy(g)
        out = search(h, scheme_wnu3(4), budget=20_000_000)
        if not out.found:
            continue
        table = transport_table(out.witness, perm, 4, 3)
        assert verify_table(g, np.array(table, dtype=np.int8), "wnu3")


def test_classify_class_stage_gating():
    res = classify_class(856, 4, CensusOptions(upto_stage="majority"))
    assert not res.majority and not res.wnu3 and res.witnesses == {}
    res = classify_class(856, 4, CensusOptions(upto_stage="wnu3"))
    assert res.wnu3 and "wnu3" in res.witnesses and "p" not in res.witnesses
    res = classify_class(856, 4, CensusOptions(upto_stage="pq"))
    assert res.pq and res.first_q is True and "p" in res.witnesses


def test_report_round_trip(census3):
    buf = io.StringIO()
    write_report(census3, buf)
    buf.seek(0)
    parsed = read_report(buf)
    assert parsed["counts"]["classes"] == 104
    assert parsed["counts"]["n"] == 3
    assert len(parsed["records"]) == 104
    rec = parsed["records"][0]
    assert rec["bits"] == "0" * 9
    assert rec["majority"] is True


def test_report_parse_errors():
    with pytest.raises(ValueError, match="line 1"):
        read_report(io.StringIO("not-a-report\n"))
    good_header = "digraph-census-report v1\nn=2 classes=1\n"
    with pytest.raises(ValueError, match="line 3"):
        read_report(io.StringIO(good_header + "0 0000\n"))
    with pytest.raises(ValueError, match="line 2"):
        read_report(io.StringIO("digraph-census-report v1\nnonsense\n"))


def test_read_catalog_round_trip(tmp_path):
    path = tmp_path / "reps.txt"
    graphs = [digraph_of(k, 3) for k in (0, 5, 511)]
    with open(path, "w") as fh:
        for g in graphs:
            fh.write(g.to_string() + "\n")
    with open(path) as fh:
        assert read_catalog(fh) == graphs


def test_read_catalog_empty(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("")
    with open(path) as fh:
        assert read_catalog(fh) == []


def test_persist_and_resume(tmp_path, census3):
    out_dir = tmp_path / "census"
    first = run_census(3, CensusOptions(out_dir=out_dir))
    assert (out_dir / "report.txt").exists()
    assert (out_dir / "flags.bits").exists()
    assert (out_dir / "classes.log").exists()
    with open(out_dir / "representatives.txt") as fh:
        assert len(read_catalog(fh)) == 104
    resumed = run_census(3, CensusOptions(out_dir=out_dir, resume=True))
    assert resumed.class_count == first.class_count
    assert resumed.majority_count == first.majority_count
    assert resumed.wnu2_count == first.wnu2_count
    assert {r: res.witnesses for r, res in resumed.results.items()} == \
        {r: res.witnesses for r, res in first.results.items()}
    # resumed run equals the in-memory run as well
    assert resumed.majority_count == census3.majority_count


def test_dedupe_only_stage():
    report = run_census(3, CensusOptions(upto_stage="dedupe"))
    assert report.class_count == 104
    assert report.majority_count == 0
    assert all(res.witnesses == {} for res in report.results.values())
