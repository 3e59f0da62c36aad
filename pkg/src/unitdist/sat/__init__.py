"""Coloring formulas and their solvers."""

from .backend import (
    Backend,
    BackendError,
    EmbeddedBackend,
    ExternalBackend,
    SolveResult,
    parse_backend,
    parse_solver_output,
    solve,
)
from .cdcl import CDCLSolver, luby, solve_clauses
from .cnf import (
    CnfFormula,
    DimacsError,
    SplitFormula,
    add_clique_break,
    add_equal_chain,
    encode_coloring,
    encode_k_coloring,
    equal_chain_clauses,
    from_dimacs,
    split_common,
    to_dimacs,
    verify_model,
)

__all__ = [
    "Backend",
    "BackendError",
    "CDCLSolver",
    "CnfFormula",
    "DimacsError",
    "EmbeddedBackend",
    "ExternalBackend",
    "SolveResult",
    "SplitFormula",
    "add_clique_break",
    "add_equal_chain",
    "encode_coloring",
    "encode_k_coloring",
    "equal_chain_clauses",
    "from_dimacs",
    "luby",
    "parse_backend",
    "parse_solver_output",
    "solve",
    "solve_clauses",
    "split_common",
    "to_dimacs",
    "verify_model",
]
