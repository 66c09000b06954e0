"""Exact shift-operator algebra, tree-structured operator Cholesky
factorisation, and sparse network control laws."""

from .cholesky import (
    Factorisation,
    cholesky_tree,
    diag_invertible,
    enumerate_permutation_cholesky,
    relate_triangular_factors,
)
from .errors import ShiftCholError
from .graphs import (
    DirectedGraph,
    UndirectedGraph,
    build_cycle_matrix,
    cycle_schur_closed_form,
    edge_graph,
    has_cycle_geq,
    is_chordal,
    is_forest,
    is_tree,
)
from .lqr import (
    Network,
    StateSpace,
    build_operator_matrix,
    build_rhs,
    build_state_space,
    dp_riccati_gain,
    solve_lqr,
    verify,
)
from .op_matrix import OpMatrix, Permutation, SparsityPattern, dominates, is_in_MG
from .seq_engine import Triple
from .shift_algebra import Monomial, PartialSums, ShiftOp
from .solver import (
    ControlLaw,
    extract_dense_gain,
    extract_sparse_law,
    solve_lower,
    solve_normal,
    solve_upper_adjoint,
)

__version__ = "0.1.0"

__all__ = [
    "ControlLaw",
    "DirectedGraph",
    "Factorisation",
    "Monomial",
    "Network",
    "OpMatrix",
    "PartialSums",
    "Permutation",
    "ShiftCholError",
    "ShiftOp",
    "SparsityPattern",
    "StateSpace",
    "Triple",
    "UndirectedGraph",
    "build_cycle_matrix",
    "build_operator_matrix",
    "build_rhs",
    "build_state_space",
    "cholesky_tree",
    "cycle_schur_closed_form",
    "diag_invertible",
    "dominates",
    "dp_riccati_gain",
    "edge_graph",
    "enumerate_permutation_cholesky",
    "extract_dense_gain",
    "extract_sparse_law",
    "has_cycle_geq",
    "is_chordal",
    "is_forest",
    "is_in_MG",
    "is_tree",
    "relate_triangular_factors",
    "solve_lower",
    "solve_lqr",
    "solve_normal",
    "solve_upper_adjoint",
    "verify",
]
