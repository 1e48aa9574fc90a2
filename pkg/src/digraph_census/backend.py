"""Kernel backend selection.

Hot kernels are written as plain loops over numpy arrays and decorated with
:func:`njit`. By default that is numba's ``njit(cache=True, nogil=True)``;
setting ``DIGRAPH_CENSUS_BACKEND=python`` (or running without numba installed)
turns the decorator into a no-op so the same code runs as ordinary Python.
``nogil`` matters: the parallel harness uses threads, and compiled kernels
release the GIL.

``benchmarks/compare_backends.py`` times the two paths against each other.
"""

from __future__ import annotations

import functools
import os
import warnings

_ENV_VAR = "DIGRAPH_CENSUS_BACKEND"
_requested = os.environ.get(_ENV_VAR, "numba").strip().lower()

if _requested not in ("numba", "python"):
    raise RuntimeError(f"{_ENV_VAR} must be 'numba' or 'python', got {_requested!r}")

USING_NUMBA = False

if _requested == "numba":
    try:
        import numba

        njit = functools.partial(numba.njit, cache=True, nogil=True)
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - exercised only without numba
        warnings.warn(
            "numba is not installed; falling back to the pure-Python kernel path "
            "(correct but slow). Set DIGRAPH_CENSUS_BACKEND=python to silence.",
            stacklevel=2,
        )

if not USING_NUMBA:

    def njit(*args, **kwargs):
        if args and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap


def backend_name() -> str:
    return "numba" if USING_NUMBA else "python"
