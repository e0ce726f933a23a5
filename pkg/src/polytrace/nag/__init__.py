"""Witness sets and decompositions of positive-dimensional solution sets."""

from ..homotopy import AffineSlice
from .cascade import Decomposition, assemble, numerical_irreducible_decomposition, whole_space
from .monodromy import (
    MAX_LOOPS,
    TRACE_TOL,
    Partition,
    TraceData,
    decompose_witness,
    match_points,
    monodromy_action,
    monodromy_loop,
    orbit_partition,
    trace_data,
    trace_test,
)
from .monodromy_solve import STAGNATION_BUDGET, MonodromyResult, monodromy_solve, seed_pair
from .regeneration import FormProduct, regenerate
from .witness import (
    MATCH_TOL,
    WitnessSet,
    endpoint_usable,
    equidimensional_filter,
    membership_test,
    move_witness,
    randomizer,
    track_slices,
    witness_superset,
)

__all__ = [
    "MATCH_TOL",
    "MAX_LOOPS",
    "STAGNATION_BUDGET",
    "TRACE_TOL",
    "AffineSlice",
    "Decomposition",
    "FormProduct",
    "MonodromyResult",
    "Partition",
    "TraceData",
    "WitnessSet",
    "assemble",
    "decompose_witness",
    "endpoint_usable",
    "equidimensional_filter",
    "match_points",
    "membership_test",
    "monodromy_action",
    "monodromy_loop",
    "monodromy_solve",
    "move_witness",
    "numerical_irreducible_decomposition",
    "orbit_partition",
    "randomizer",
    "regenerate",
    "seed_pair",
    "trace_data",
    "trace_test",
    "track_slices",
    "whole_space",
    "witness_superset",
]
