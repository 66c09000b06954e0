"""Permuted operator Cholesky factorisation for tree-structured matrices.

The factorisation computes a lower-triangular L with diagonal entries in
the pointwise-scaling sub-ring, and a column permutation P, such that
L L* = (MP)* MP.  The recursion eliminates one leaf-edge column at a
time; when the sparsity graph contains a cycle no leaf edge exists and
the algorithm reports the obstruction instead of filling in.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MalformedColumn,
    NoLeafEdge,
    PreconditionViolated,
    Singular,
    TooLarge,
)
from . import shift_algebra
from .op_matrix import OpMatrix, Permutation, SparsityPattern, dominates
from .shift_algebra import Monomial, ShiftOp

FACTOR_TOL = 1e-8
ENUMERATION_MAX_COLS = 6


@dataclass(frozen=True)
class Factorisation:
    """The pair (L, P) with L lower triangular and L L* = (MP)* MP."""

    L: OpMatrix
    P: Permutation

    def to_json(self, M: OpMatrix | None = None) -> dict:
        out = {"L": self.L.to_json(), "P": list(self.P.image)}
        if M is not None:
            out["checks"] = {
                "identity_resid": factorisation_residual(M, self),
                "fill_in_free": is_fill_in_free(M, self),
            }
        return out


def _nonzero_rows(M: OpMatrix, col: int) -> list:
    return [i for i in range(M.rows) if M[i, col].coeffs]


def _row_exclusive(M: OpMatrix, row: int, col: int) -> bool:
    """True iff row is zero outside the given column."""
    return all(not M[row, j].coeffs for j in range(M.cols) if j != col)


def _is_leaf_column(M: OpMatrix, col: int) -> bool:
    """A column is eliminable when one of its endpoints has degree one.

    Columns with a single nonzero entry are also eliminable: the second
    incident vertex has no row in the matrix, which plays the same role
    as a degree-one endpoint.
    """
    rows = _nonzero_rows(M, col)
    if len(rows) > 2:
        raise MalformedColumn(f"column {col} has {len(rows)} nonzero entries")
    if len(rows) <= 1:
        return True
    return any(_row_exclusive(M, r, col) for r in rows)


def leaf_edge_first_permutation(M: OpMatrix) -> Permutation:
    """Swap the first eliminable column into position 0 (scan order)."""
    for c in range(M.cols):
        if _is_leaf_column(M, c):
            return Permutation.swap(M.cols, 0, c)
    raise NoLeafEdge("no column with a degree-one endpoint: graph has a cycle")


def vertices_first_permutation(M: OpMatrix) -> Permutation:
    """Row permutation placing column 0's leaf endpoint first.

    The degree-one endpoint's row goes to position 0 and the shared
    (internal) endpoint's row to position 1; remaining rows keep their
    order.  When column 0 has a single nonzero row, that row goes first.
    """
    rows = _nonzero_rows(M, 0)
    if len(rows) > 2:
        raise MalformedColumn(f"column 0 has {len(rows)} nonzero entries")
    if len(rows) <= 1:
        head = rows
    else:
        exclusive = [r for r in rows if _row_exclusive(M, r, 0)]
        if not exclusive:
            raise MalformedColumn("column 0 is not a leaf edge")
        leaf = min(exclusive)
        shared = rows[0] if rows[1] == leaf else rows[1]
        head = [leaf, shared]
    rest = [i for i in range(M.rows) if i not in head]
    return Permutation(tuple(head + rest))


def schur_reduce(M: OpMatrix):
    """One elimination step on a matrix in canonical leaf-first form.

    Returns (n11, n21, M_red, dropped_leaf_row) where n11 is the Gram of
    column 0, n21 the remaining first Gram column, and M_red the reduced
    matrix whose Gram equals the Schur complement.
    """
    rows = _nonzero_rows(M, 0)
    if len(rows) > 2:
        raise MalformedColumn(f"column 0 has {len(rows)} nonzero entries")

    leaf_present = bool(rows) and rows[0] == 0 and _row_exclusive(M, 0, 0)
    if rows and not leaf_present and (rows[0] != 0 or len(rows) == 2):
        raise MalformedColumn("column 0 not in canonical leaf-first row order")

    m11 = M[0, 0] if leaf_present else ShiftOp.zero()
    if leaf_present:
        shared_row = rows[1] if len(rows) == 2 else None
        if shared_row is not None and shared_row != 1:
            raise MalformedColumn("shared endpoint row must be second")
    else:
        shared_row = rows[0] if rows else None
    m21 = M[shared_row, 0] if shared_row is not None else ShiftOp.zero()

    n11 = m11.adjoint() * m11 + m21.adjoint() * m21
    other_cols = list(range(1, M.cols))
    other_rows = [
        i for i in range(M.rows) if i != (0 if leaf_present else -1)
    ]

    if shared_row is not None:
        shared = M.submatrix([shared_row], other_cols)  # 1 x (m-1)
        n21 = shared.adjoint().matmul(M.submatrix([shared_row], [0]))
        # scale the shared row by sqrt(1 - m21 n11^+ m21*)
        proj = ShiftOp.identity() - m21 * n11.pinv_rinf() * m21.adjoint()
        scaled = shared.scale_op(proj.sqrt_rinf())
        rest_rows = [i for i in other_rows if i != shared_row]
        red_rows = list(scaled.entries) + list(
            M.submatrix(rest_rows, other_cols).entries
        )
        M_red = OpMatrix(tuple(red_rows))
    else:
        n21 = OpMatrix.zeros(len(other_cols), 1)
        M_red = M.submatrix(other_rows, other_cols)

    return n11, n21, M_red, leaf_present


def _cholesky_recursive(M: OpMatrix, fixed_order: bool) -> Factorisation:
    m = M.cols
    if m == 0:
        return Factorisation(OpMatrix.zeros(0, 0), Permutation.identity(0))
    if m == 1:
        n11 = M.gram()[0, 0]
        L = OpMatrix.from_rows([[n11.sqrt_rinf()]])
        return Factorisation(L, Permutation.identity(1))

    if fixed_order:
        if not _is_leaf_column(M, 0):
            raise NoLeafEdge("column 0 is not eliminable in fixed order")
        P_e = Permutation.identity(m)
    else:
        P_e = leaf_edge_first_permutation(M)
    M1 = M.permute_cols(P_e)
    M_bar = M1.permute_rows(vertices_first_permutation(M1))

    n11, n21, M_red, _ = schur_reduce(M_bar)
    red = _cholesky_recursive(M_red, fixed_order)

    sqrt_n11 = n11.sqrt_rinf()
    pinv_sqrt = sqrt_n11.pinv_rinf()
    n21_perm = [n21[red.P.image[i], 0] for i in range(m - 1)]

    L = [[ShiftOp.zero()] * m for _ in range(m)]
    L[0][0] = sqrt_n11
    for i in range(1, m):
        L[i][0] = n21_perm[i - 1] * pinv_sqrt
        for j in range(1, m):
            L[i][j] = red.L[i - 1, j - 1]
    block = Permutation(tuple([0] + [s + 1 for s in red.P.image]))
    return Factorisation(OpMatrix.from_rows(L), P_e.compose(block))


def factorisation_residual(M: OpMatrix, F: Factorisation) -> float:
    MP = M.permute_cols(F.P)
    diff = F.L.matmul(F.L.adjoint()) - MP.gram()
    return diff.max_abs_coeff()


def is_fill_in_free(M: OpMatrix, F: Factorisation) -> bool:
    MP = M.permute_cols(F.P)
    return dominates(MP.gram().sparsity(), F.L.sparsity())


def cholesky_tree(
    M: OpMatrix, fixed_order: bool = False, verify_tol: float = FACTOR_TOL
) -> Factorisation:
    """Factorise a forest-structured operator matrix.

    Raises NoLeafEdge when the sparsity graph contains a cycle (no valid
    factorisation of this form exists).  The returned factor is
    re-verified against the Gram identity and the no-fill-in property;
    an inconsistent result is a loud failure, never a silent one.
    """
    F = _cholesky_recursive(M, fixed_order)
    resid = factorisation_residual(M, F)
    if resid > verify_tol:
        raise PreconditionViolated(
            f"factorisation residual {resid:.3e} exceeds {verify_tol}"
        )
    if not is_fill_in_free(M, F):
        raise PreconditionViolated("factor has fill-in relative to the Gram")
    return F


def diag_invertible(F: Factorisation) -> bool:
    """True iff back substitution through this factor is well posed."""
    for k in range(F.L.cols):
        d = F.L[k, k]
        if not d.is_rinf():
            return False
        p = d.to_partial_sums()
        tol = shift_algebra.INV_TOL
        if any(abs(s) <= tol for s in p.sigma) or abs(p.sigma_inf) <= tol:
            return False
    return True


def relate_triangular_factors(
    L1: OpMatrix, L2: OpMatrix, tol: float = FACTOR_TOL
) -> bool:
    """Check L2 = L1 · diag(L1)^{-1} · diag(L2) for equal-Gram factors.

    Both inputs must be square lower triangular with invertible
    diagonal-sub-ring diagonals; their Grams must agree within tol,
    otherwise PreconditionViolated is raised.
    """
    for L in (L1, L2):
        if L.rows != L.cols or not L.is_lower_triangular():
            raise PreconditionViolated("inputs must be square lower triangular")
        F = Factorisation(L, Permutation.identity(L.cols))
        if not diag_invertible(F):
            raise PreconditionViolated("diagonal not invertible")
    g1 = L1.matmul(L1.adjoint())
    g2 = L2.matmul(L2.adjoint())
    if not g1.isclose(g2, tol):
        raise PreconditionViolated("Grams differ beyond tolerance")
    n = L1.cols
    rhs = [[ShiftOp.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rhs[i][j] = L1[i, j] * L1[j, j].inv_rinf() * L2[j, j]
    return L2.isclose(OpMatrix.from_rows(rhs), tol)


def enumerate_permutation_cholesky(M: OpMatrix) -> dict:
    """Survey all column orders of M for sparsity-compatible factors.

    For each permutation the real Cholesky factor of the coefficient-sum
    Gram is computed and tested against the Gram's own sparsity.  For the
    compatible orders, the operator factorisation is run in that fixed
    order and the diagonal (q*)q coefficients are recorded.
    """
    m = M.cols
    if m > ENUMERATION_MAX_COLS:
        raise TooLarge(f"{m} columns exceeds the {ENUMERATION_MAX_COLS}! guard")
    results = []
    for perm in itertools.permutations(range(m)):
        P = Permutation(perm)
        MP = M.permute_cols(P)
        gram = MP.gram()
        N = gram.coefficient_sum()
        entry = {"permutation": list(perm)}
        try:
            R = np.linalg.cholesky(N)
        except np.linalg.LinAlgError:
            entry["indefinite"] = True
            entry["compatible"] = False
            results.append(entry)
            continue
        chol_pattern = SparsityPattern(np.abs(R) > 1e-12)
        entry["compatible"] = dominates(gram.sparsity(), chol_pattern)
        if entry["compatible"]:
            F = cholesky_tree(MP, fixed_order=True)
            diag_qstarq = [
                F.L[k, k].coefficient(1, 1) for k in range(F.L.cols)
            ]
            entry["diag_qstarq"] = diag_qstarq
            entry["has_qstarq_diag"] = any(abs(c) > 1e-9 for c in diag_qstarq)
        results.append(entry)
    n_compat = sum(1 for e in results if e["compatible"])
    return {
        "n_permutations": len(results),
        "n_compatible": n_compat,
        "results": results,
    }
