"""Expand/reduce search for minimum subgraphs with the key property."""

from .expand import (
    PointOrbit,
    Reserve,
    build_reserve,
    expand,
    expansion_moves,
    neighbor_counts,
    parse_schedule,
    universe_orbits,
)
from .hyper import (
    Hypergraph,
    PropertyLostError,
    batch_8421,
    build_hypergraph,
    evaluate,
)
from .loop import MinimizationState, RunLog, Strategy, initial_state, iterate, reduce_once
from .reduce import (
    PHASE2_BUDGET,
    ReduceResult,
    candidate_deletions,
    maximal_independent_sets,
    reduce,
)
from .rough import (
    RoughOptions,
    RoughResult,
    fixed_vertices,
    indicators,
    orbit_feasibility,
    peel,
    rough_reduce,
)

__all__ = [
    "Hypergraph",
    "MinimizationState",
    "PHASE2_BUDGET",
    "PointOrbit",
    "PropertyLostError",
    "ReduceResult",
    "Reserve",
    "RoughOptions",
    "RoughResult",
    "RunLog",
    "Strategy",
    "batch_8421",
    "build_hypergraph",
    "build_reserve",
    "candidate_deletions",
    "evaluate",
    "expand",
    "expansion_moves",
    "fixed_vertices",
    "indicators",
    "initial_state",
    "iterate",
    "maximal_independent_sets",
    "neighbor_counts",
    "orbit_feasibility",
    "parse_schedule",
    "peel",
    "reduce",
    "reduce_once",
    "rough_reduce",
    "universe_orbits",
]
