"""Sparse probabilistic Boolean network construction.

Decompose a transition probability matrix into a short convex
combination of Boolean-network matrices, bound the shortest possible
length, and turn the result into a probabilistic Boolean network.
"""

from .bounds import exact_min_length, lower_bound, upper_bounds
from .core import (
    BnMatrix,
    Decomposition,
    Tpm,
    block_double,
    in_support,
    lift_block_double,
    positive_count,
    verify_decomposition,
)
from .corpus import corpus, corpus_names
from .errors import (
    ContractError,
    DimensionError,
    InfeasibleSizeError,
    OracleTimeout,
    ParseError,
    SolverError,
    SparsePbnError,
    ValidationError,
    VerificationError,
)
from .greedy import ger_decompose, ser1_decompose, ser2_decompose
from .io import parse_tpm
from .momp import momp_decompose
from .pbn import Pbn, assemble_pbn, bn_to_truth_table, pbn_to_tpm

__version__ = "0.1.0"

__all__ = [
    "BnMatrix",
    "ContractError",
    "Decomposition",
    "DimensionError",
    "InfeasibleSizeError",
    "OracleTimeout",
    "ParseError",
    "Pbn",
    "SolverError",
    "SparsePbnError",
    "Tpm",
    "ValidationError",
    "VerificationError",
    "assemble_pbn",
    "block_double",
    "bn_to_truth_table",
    "corpus",
    "corpus_names",
    "exact_min_length",
    "ger_decompose",
    "in_support",
    "lift_block_double",
    "lower_bound",
    "momp_decompose",
    "parse_tpm",
    "pbn_to_tpm",
    "positive_count",
    "ser1_decompose",
    "ser2_decompose",
    "upper_bounds",
    "verify_decomposition",
]
