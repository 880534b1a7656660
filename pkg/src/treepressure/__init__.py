"""Partition functions and pressure of nearest-neighbour tree shifts of finite type
on restricted trees, with brute-force oracles and asymptotic-pressure diagnostics."""

from .errors import (
    BackendMismatchError,
    DegenerateInteractionError,
    DomainError,
    EmptySystemError,
    HypothesisViolationError,
    InvalidDimensionError,
    InvalidParameterError,
    ResourceCapError,
    TreePressureError,
)
from .interaction import (
    InteractionSpec,
    PotentialSpec,
    build_interaction,
    essential_alphabet,
    from_potentials,
    full_shift,
    golden_mean,
    max_row_sum,
)
from .restriction import (
    LevelCounts,
    RestrictionMatrix,
    SpectralInfo,
    classify,
    collapsed_fibonacci,
    level_counts,
    make_full_tree,
    make_generalized_fibonacci,
    residue_table,
    spectral,
)
from .transfer import PressureSeries, partition_function, pressure, pressure_series, transfer_table
from .oracle import brute_force_partition, enumerate_tree, pattern_is_extendable
from .asymptotics import (
    estimate_limit_pressure,
    lemma_ratio_check,
    periodic_ratio_limits,
    sweep_k,
    theorem_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BackendMismatchError",
    "DegenerateInteractionError",
    "DomainError",
    "EmptySystemError",
    "HypothesisViolationError",
    "InteractionSpec",
    "InvalidDimensionError",
    "InvalidParameterError",
    "LevelCounts",
    "PotentialSpec",
    "PressureSeries",
    "ResourceCapError",
    "RestrictionMatrix",
    "SpectralInfo",
    "TreePressureError",
    "brute_force_partition",
    "build_interaction",
    "classify",
    "collapsed_fibonacci",
    "enumerate_tree",
    "essential_alphabet",
    "estimate_limit_pressure",
    "from_potentials",
    "full_shift",
    "golden_mean",
    "lemma_ratio_check",
    "level_counts",
    "make_full_tree",
    "make_generalized_fibonacci",
    "max_row_sum",
    "partition_function",
    "pattern_is_extendable",
    "periodic_ratio_limits",
    "pressure",
    "pressure_series",
    "residue_table",
    "spectral",
    "sweep_k",
    "theorem_bounds",
    "transfer_table",
]
