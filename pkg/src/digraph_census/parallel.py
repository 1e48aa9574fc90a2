"""Deterministic in-process work distribution.

Work items are dispatched to a thread pool in index-keyed chunks and the
results are merged back in item order, so the output is identical to a serial
run regardless of worker count or scheduling (the compiled kernels release
the GIL, which is where the speedup comes from; under the pure-Python backend
threads still give correct, just not faster, runs). A failing item is retried
once before the whole run fails loudly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


class WorkerError(RuntimeError):
    """An item failed twice; carries the failing item's position."""

    def __init__(self, position: int, cause: BaseException):
        super().__init__(f"work item {position} failed twice: {cause!r}")
        self.position = position
        self.cause = cause


def _run_item(worker: Callable[[T], R], item: T, position: int) -> R:
    try:
        return worker(item)
    except Exception:
        try:
            return worker(item)  # single retry
        except Exception as exc:
            raise WorkerError(position, exc) from exc


def run_parallel(items: Sequence[T], worker: Callable[[T], R], worker_count: int,
                 chunk_size: int | None = None) -> list[R]:
    """Apply ``worker`` to every item; results come back in item order."""
    if worker_count < 1:
        raise ValueError("worker_count must be at least 1")
    items = list(items)
    if not items:
        return []
    if worker_count == 1:
        return [_run_item(worker, item, i) for i, item in enumerate(items)]
    if chunk_size is None:
        chunk_size = max(1, min(64, len(items) // (worker_count * 4) or 1))

    def run_chunk(start: int, chunk: Sequence[T]) -> list[tuple[int, R]]:
        return [(start + j, _run_item(worker, item, start + j))
                for j, item in enumerate(chunk)]

    results: list[R | None] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=worker_count) as pool:
        futures = []
        for start in range(0, len(items), chunk_size):
            chunk = items[start : start + chunk_size]
            futures.append(pool.submit(run_chunk, start, chunk))
        for fut in futures:
            for pos, res in fut.result():
                results[pos] = res
    return results  # type: ignore[return-value]
