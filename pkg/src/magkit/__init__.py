"""Exact and approximate metric magnitude for finite point clouds."""

__version__ = "0.1.0"

from .bordered import BorderedMagnitude
from .clustering import ClusteringResult, PersistenceProfile, cluster, persistence_sweep
from .exact import (
    MagnitudeEstimate,
    Weighting,
    magnitude_1d,
    magnitude_exact,
    magnitude_homogeneous_cross,
    magnitude_two_point,
    pmag,
)
from .hierarchy import CoverHierarchy, approx_magnitude_topdown, build_hierarchy
from .iterative import ConvergenceTrace, SolverConfig, solve_gd, solve_iter_norm
from .metric import MetricSpace, SimilarityMatrix, build_space, build_space_from_dist, similarity
from .oracles import (
    SubmodularityReport,
    brute_force_best_subset,
    check_submodular_1d,
    check_submodular_3pt,
    counterexample_gap,
    cross_polytope,
    limit_gap,
)
from .scale import ScaleSweep, magnitude_dimension, magnitude_function
from .subset import SelectionCurve, estimate_param_magnitude, greedy_select, random_select

__all__ = [
    "BorderedMagnitude",
    "ClusteringResult",
    "ConvergenceTrace",
    "CoverHierarchy",
    "MagnitudeEstimate",
    "MetricSpace",
    "PersistenceProfile",
    "ScaleSweep",
    "SelectionCurve",
    "SimilarityMatrix",
    "SolverConfig",
    "SubmodularityReport",
    "Weighting",
    "approx_magnitude_topdown",
    "brute_force_best_subset",
    "build_hierarchy",
    "build_space",
    "build_space_from_dist",
    "check_submodular_1d",
    "check_submodular_3pt",
    "cluster",
    "counterexample_gap",
    "cross_polytope",
    "estimate_param_magnitude",
    "greedy_select",
    "limit_gap",
    "magnitude_1d",
    "magnitude_dimension",
    "magnitude_exact",
    "magnitude_function",
    "magnitude_homogeneous_cross",
    "magnitude_two_point",
    "persistence_sweep",
    "pmag",
    "random_select",
    "similarity",
    "solve_gd",
    "solve_iter_norm",
]
