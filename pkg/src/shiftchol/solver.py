"""Triangular solves over sequence realizations and control-law extraction.

Back substitution never inverts operators symbolically: diagonal entries
live in the pointwise-scaling sub-ring, so dividing by them is a
pointwise scaling by the reciprocal weights, applied directly to the
sequence triples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cholesky import Factorisation, diag_invertible
from .errors import DimensionMismatch, NotLemma3Shape, Singular
from .op_matrix import OpMatrix
from . import shift_algebra
from .seq_engine import Triple
from .shift_algebra import Monomial, ShiftOp


@dataclass(frozen=True)
class ControlLaw:
    """The implicit law K1 u[k] = K2 x[k] plus the dense gain K.

    K1 is None when the factor is not of the real-plus-forward-shift
    shape; the dense gain is always present.  The optimal input is
    u[k] = -K x[k].
    """

    K1: np.ndarray | None
    K2: np.ndarray
    K: np.ndarray

    def pattern(self, tol: float = 1e-9) -> dict:
        out = {"K2": (np.abs(self.K2) > tol).astype(int).tolist()}
        out["K1"] = (
            (np.abs(self.K1) > tol).astype(int).tolist()
            if self.K1 is not None
            else None
        )
        return out

    def to_json(self) -> dict:
        return {
            "K1": self.K1.tolist() if self.K1 is not None else None,
            "K2": self.K2.tolist(),
            "K": self.K.tolist(),
            "pattern": self.pattern(),
        }


def _inv_partial_sums(d: ShiftOp):
    if not d.is_rinf():
        raise Singular("diagonal entry not a pointwise scaling")
    p = d.to_partial_sums()
    tol = shift_algebra.INV_TOL
    if any(abs(s) <= tol for s in p.sigma) or abs(p.sigma_inf) <= tol:
        raise Singular("diagonal scaling weight too close to zero")
    return p.map(lambda s: 1.0 / s)


def solve_lower(L: OpMatrix, w: list) -> list:
    """Solve L v = w for triples, first entry to last."""
    if L.cols != len(w):
        raise DimensionMismatch(f"{L.cols} columns vs {len(w)} right-hand sides")
    v = []
    for k in range(L.cols):
        acc = w[k]
        for i in range(k):
            if L[k, i].coeffs:
                acc = acc - v[i].apply_shiftop(L[k, i])
        v.append(acc.scale_pointwise(_inv_partial_sums(L[k, k])).prune())
    return v


def solve_upper_adjoint(L: OpMatrix, v: list) -> list:
    """Solve L* y = v for triples, last entry to first."""
    if L.cols != len(v):
        raise DimensionMismatch(f"{L.cols} columns vs {len(v)} right-hand sides")
    y = [None] * L.cols
    for k in reversed(range(L.cols)):
        acc = v[k]
        for i in range(k + 1, L.cols):
            if L[i, k].coeffs:
                acc = acc - y[i].apply_shiftop(L[i, k].adjoint())
        y[k] = acc.scale_pointwise(_inv_partial_sums(L[k, k])).prune()
    return y


def solve_normal(F: Factorisation, w: list) -> list:
    """Solve (M P)* (M P) in original column order: M*M z = w.

    Permutes the right-hand side into elimination order, runs the two
    triangular solves, and scatters the solution back.
    """
    if not diag_invertible(F):
        raise Singular("factor diagonal not invertible")
    w_bar = [w[F.P.image[i]] for i in range(len(w))]
    y = solve_upper_adjoint(F.L, solve_lower(F.L, w_bar))
    z = [None] * len(w)
    for i in range(len(w)):
        z[F.P.image[i]] = y[i]
    return z


def _split_lemma3(L: OpMatrix):
    """Decompose L = L0 + L1·q with L0 lower triangular and L1 strictly so."""
    n = L.rows
    L0 = np.zeros((n, n))
    L1 = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            x = L[i, j]
            for (istar, jq), c in x.coeffs.items():
                if (istar, jq) == (0, 0):
                    L0[i, j] = c
                elif (istar, jq) == (0, 1):
                    if i == j:
                        raise NotLemma3Shape("forward-shift term on the diagonal")
                    L1[i, j] = c
                else:
                    raise NotLemma3Shape(
                        f"entry ({i},{j}) contains monomial (q*)^{istar} q^{jq}"
                    )
    if np.any(np.abs(np.diag(L0)) <= shift_algebra.INV_TOL):
        raise Singular("constant part of the diagonal not invertible")
    return L0, L1


def extract_sparse_law(L: OpMatrix, r: float, K2: np.ndarray):
    """Sparse implicit law from a real-plus-forward-shift factor.

    With L = L0 + L1·q, the solution of L L* z = (r^k K2 x0)_k satisfies
    (L0 + L1 r) L0ᵀ z[0] = K2 x0, so K1 = (L0 + L1 r) L0ᵀ.
    """
    L0, L1 = _split_lemma3(L)
    K1 = (L0 + r * L1) @ L0.T
    return K1, np.asarray(K2, dtype=float)


def extract_dense_gain(F: Factorisation, w_builder, n_x: int) -> np.ndarray:
    """Dense map x0 -> z[0] via one bundled back substitution.

    ``w_builder`` receives an n_x x n_x initial-condition basis and must
    return one triple per column of the factored matrix, each carrying
    the full basis bundle.
    """
    w = w_builder(np.eye(n_x))
    z = solve_normal(F, w)
    return np.vstack([t.first() for t in z])
