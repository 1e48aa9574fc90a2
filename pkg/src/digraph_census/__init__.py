"""Census of small digraphs by the polymorphisms their algebras admit."""

from .backend import USING_NUMBA, backend_name
from .core import (CapacityError, Digraph, digraph_of, edge_count, generate_all,
                   index_of, read_digraph_lines, write_digraph_lines)
from .dedupe import (ClassFlags, canonical_index, canonical_indices,
                     dedupe_bruteforce, dedupe_sieve, read_flag_bitmap,
                     write_flag_bitmap)
from .schemes import (Assignment, IdentityScheme, build_scheme, expand_to_table,
                      scheme_majority, scheme_p_given_q, scheme_two_semilattice,
                      scheme_wnu2, scheme_wnu3)
from .search import (SearchOutcome, SearchStats, check_partial, exhaustive_oracle,
                     search, verify_table)
from .subsets import SubsetTable, compute_subsets, enumerate_subsets, restrict_domains

__all__ = [
    "Assignment",
    "CapacityError",
    "ClassFlags",
    "Digraph",
    "IdentityScheme",
    "SearchOutcome",
    "SearchStats",
    "SubsetTable",
    "USING_NUMBA",
    "backend_name",
    "build_scheme",
    "canonical_index",
    "canonical_indices",
    "check_partial",
    "compute_subsets",
    "dedupe_bruteforce",
    "dedupe_sieve",
    "digraph_of",
    "edge_count",
    "enumerate_subsets",
    "exhaustive_oracle",
    "expand_to_table",
    "generate_all",
    "index_of",
    "read_digraph_lines",
    "read_flag_bitmap",
    "restrict_domains",
    "scheme_majority",
    "scheme_p_given_q",
    "scheme_two_semilattice",
    "scheme_wnu2",
    "scheme_wnu3",
    "search",
    "verify_table",
    "write_digraph_lines",
    "write_flag_bitmap",
]

__version__ = "0.1.0"
