from __future__ import annotations

import threading

import pytest

from digraph_census.parallel import WorkerError, run_parallel
from digraph_census.pipeline import CensusOptions, run_census


def test_single_worker_matches_map():
    items = list(range(40))
    assert run_parallel(items, lambda x: x * x, 1) == [x * x for x in items]


def test_results_keep_item_order():
    items = list(range(101))
    got = run_parallel(items, lambda x: -x, 4, chunk_size=7)
    assert got == [-x for x in items]


def test_empty_items():
    assert run_parallel([], lambda x: x, 4) == []


def test_worker_count_validis_checked():
    with pytest.raises(ValueError):
        run_parallel([1], lambda x: x, 0)


def test_item_retried_once():
    lock = threading.Lock()
    failures = set()

    def flaky(x):
        with lock:
            if x == 13 and x not in failures:
                failures.add(x)
                raise RuntimeError("transient")
        return x + 1

    assert run_parallel(list(range(20)), flaky, 3) == [x + 1 for x in range(20)]


def test_persistent_failure_raises():
    def broken(x):
        if x == 5:
            raise RuntimeError("permanent")
        return x

    with pytest.raises(WorkerError) as info:
        run_parallel(list(range(10)), broken, 2, chunk_size=3)
    assert info.value.position == 5


def _report_fingerprint(report):
    return (
        report.class_count,
        report.majority_count,
        report.wnu2_count,
        tuple(report.wnu3_minimal),
        tuple(report.pq_satisfied),
        tuple(sorted((r, tuple(sorted(res.witnesses.items())))
                     for r, res in report.results.items())),
    )


def test_census_is_worker_count_invariant():
    serial = run_census(3, CensusOptions(workers=1))
    for workers in (2, 4):
        parallel = run_census(3, CensusOptions(workers=workers))
        assert _report_fingerprint(parallel) == _report_fingerprint(serial)
