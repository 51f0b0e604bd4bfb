"""Minimum-cardinality complete symmetry breaks for simple graphs.

The library reduces complete symmetry breaking on order-n graphs to an
exact set-cover problem over vertex permutations, solves it with
backbone detection, SAT-based dominance pruning and matrix reductions,
and emits verifiable lex-constraint break files.
"""

from .graphs import (
    Graph,
    apply_perm,
    canonical_graph_ids,
    count_canonical,
    increment,
    is_canonical_bruteforce,
    vec_compare,
)
from .patterns import (
    Pattern,
    PatternSet,
    covered_by_set,
    enumerate_instances,
    instance_count,
    matches,
    merge_pattern_sets,
    pattern_at,
    patterns_of,
)
from .perms import (
    Permutation,
    all_permutations,
    non_identity_permutations,
    parse_permutation,
    transpositions,
)

__all__ = [
    "Graph",
    "Pattern",
    "PatternSet",
    "Permutation",
    "all_permutations",
    "apply_perm",
    "canonical_graph_ids",
    "count_canonical",
    "covered_by_set",
    "enumerate_instances",
    "increment",
    "instance_count",
    "is_canonical_bruteforce",
    "matches",
    "merge_pattern_sets",
    "non_identity_permutations",
    "parse_permutation",
    "pattern_at",
    "patterns_of",
    "transpositions",
    "vec_compare",
]

__version__ = "0.1.0"
