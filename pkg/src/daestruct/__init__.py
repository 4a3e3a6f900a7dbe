"""Structural analysis of differential-algebraic equation systems.

Build a signature matrix (from a DAE source or the exchange format),
permute it to block upper triangular form, and compute maximum-value
transversals, canonical offsets, the structural index and the structural
Jacobian pattern.
"""

__version__ = "0.1.0"

from .bench import BenchResult, GenConfig, fit_power_law, generate_sigma, run_bench
from .dm import (
    CoarseDecomposition,
    FineBtf,
    IncidenceGraph,
    Matching,
    btf,
    check_strong_hall,
    coarse_decompose,
    connected_components,
    fine_decompose,
    maximum_matching,
)
from .errors import (
    DaeStructError,
    DaeSyntaxError,
    DerOfNonVariable,
    DuplicateEntry,
    IndexOutOfRange,
    InputError,
    InsufficientPoints,
    NegativeOrder,
    NonPositiveDerOrder,
    NonPositiveTime,
    NonSquareModel,
    NotOptimalTransversal,
    NotPerfectlyMatched,
    ParseError,
    SizeMismatch,
    StructurallyIllPosed,
    TooLarge,
)
from .frontend import DaeModel, build_signature, parse_model
from .lap import Assignment, IllPosedWitness, brute_force_mvt, max_value_transversal
from .offsets import (
    AnalysisReport,
    InternalInvariantError,
    OffsetVectors,
    analyze,
    analyze_unblocked,
    block_offsets,
    global_offsets_fixed_point,
    jacobian_pattern,
    structural_index,
)
from .sigma import (
    Permutation,
    SignatureMatrix,
    from_triplets,
    permute,
    read_sigma_file,
    write_sigma_file,
)
