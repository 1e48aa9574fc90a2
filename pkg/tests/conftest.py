from __future__ import annotations

import random

import pytest

from digraph_census import (digraph_of, exhaustive_oracle, scheme_majority,
                            scheme_wnu2, scheme_wnu3, search)
from digraph_census.pipeline import CensusOptions, run_census


@pytest.fixture(scope="session")
def rng() -> random.Random:
    return random.Random(20240601)


@pytest.fixture(scope="session")
def warm_kernels():
    """Force one compile of every hot kernel so timed tests measure the
    algorithms, not LLVM."""
    g = digraph_of(5, 2)
    for scheme in (scheme_majority(2), scheme_wnu2(2), scheme_wnu3(2)):
        search(g, scheme, budget=10)
        search(g, scheme)
        exhaustive_oracle(g, scheme)
    return True


@pytest.fixture(scope="session")
def census4():
    """The full four-vertex census, run serially once per session."""
    return run_census(4, CensusOptions(workers=1))
