"""Mixed arithmetic-geometric mean inequality over k×l submatrices.

For a nonnegative m×n matrix and 2k > m, 2l > n, the geometric mean of
the submatrix arithmetic means is at least the arithmetic mean of the
submatrix geometric means. This package evaluates both sides at scale,
checks the averaging identity behind the proof, and ships slow exact
oracles to cross-check the fast paths.
"""

__version__ = "0.1.0"

from .combinatorics import (
    SubsetCursor,
    SwapStep,
    binomial,
    enumerate_lex,
    enumerate_revolving_door,
    rank,
    unrank,
)
from .core import (
    EXACT,
    FLOAT64,
    IndexSubset,
    Mode,
    NonnegMatrix,
    RangeParams,
    ScalarBackend,
    SubmatrixSelection,
    TheoremReport,
    Verdict,
    is_constant,
    parse_matrix,
    serialize_matrix,
)
from .inequality import evaluate_theorem, evaluate_unchecked, random_scan, counterexample_matrix
from .lemma import coefficient_check, holder_mixed, lemma_identity, proof_trace
from .means import (
    RowSetColumnProfile,
    SubmatrixStats,
    power_mean,
    scan_aggregate,
    scan_all_submatrices,
    submatrix_stats,
)
from .oracle import brute_lemma, brute_theorem, subset_inequality_1

__all__ = [
    "EXACT",
    "FLOAT64",
    "IndexSubset",
    "Mode",
    "NonnegMatrix",
    "RangeParams",
    "RowSetColumnProfile",
    "ScalarBackend",
    "SubmatrixSelection",
    "SubmatrixStats",
    "SubsetCursor",
    "SwapStep",
    "TheoremReport",
    "Verdict",
    "binomial",
    "brute_lemma",
    "brute_theorem",
    "coefficient_check",
    "enumerate_lex",
    "enumerate_revolving_door",
    "evaluate_theorem",
    "evaluate_unchecked",
    "holder_mixed",
    "is_constant",
    "lemma_identity",
    "parse_matrix",
    "power_mean",
    "proof_trace",
    "random_scan",
    "rank",
    "counterexample_matrix",
    "scan_aggregate",
    "scan_all_submatrices",
    "serialize_matrix",
    "submatrix_stats",
    "subset_inequality_1",
    "unrank",
]
