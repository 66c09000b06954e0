"""Desk-scale demonstrations of the two impossibility results.

The cycle demo checks the closed-form Schur complement of a cycle's
Gram against a dense finite truncation, exhibiting the diagonal-sub-ring
obstruction that rules out tree-style factorisations of cycles.  The
spectral demo builds the 5x4 alternating-direction line matrix whose
operator factor necessarily carries (q*)q diagonal terms, showing that
no sparsity-preserving forward-shift-only factor exists.
"""

from __future__ import annotations

import math

import numpy as np

from .cholesky import enumerate_permutation_cholesky
from .graphs import build_cycle_matrix, cycle_schur_closed_form
from .op_matrix import OpMatrix
from .shift_algebra import ShiftOp


def cycle_schur_truncation_residual(n: int, T: int = 96, margin: int = None) -> float:
    """Residual between the dense-truncation Schur complement and the
    closed form, on an interior window away from the truncation edge.

    The last coordinates of the T-sample model read past the window and
    are meaningless; the comparison drops a margin at the trailing edge.
    """
    if margin is None:
        margin = T // 2
    N = build_cycle_matrix(n).gram().to_truncation(T)
    m = (n - 1) * T
    A, B = N[:m, :m], N[:m, m:]
    S = N[m:, m:] - B.T @ np.linalg.solve(A, B)
    S_ref = cycle_schur_closed_form(n).to_truncation(T)
    w = T - margin
    return float(np.max(np.abs(S[:w, :w] - S_ref[:w, :w])))


def cycle_demo(n: int) -> dict:
    closed = cycle_schur_closed_form(n)
    return {
        "n": n,
        "closed_form": closed.to_json(),
        "in_rinf": closed.is_rinf(),
        "q_power_n_coefficient": closed.coefficient(0, n),
        "truncation_residual": cycle_schur_truncation_residual(n),
    }


def alternating_line_matrix() -> OpMatrix:
    """The 5x4 line matrix with alternating transportation directions."""
    z = ShiftOp.zero()
    m1 = ShiftOp.constant(-1.0)
    rqs = ShiftOp.monomial(1, 0, 1.0 / math.sqrt(2.0))
    return OpMatrix.from_rows(
        [
            [m1, z, z, z],
            [rqs, m1, z, z],
            [z, rqs, rqs, z],
            [z, z, m1, rqs],
            [z, z, z, m1],
        ]
    )


def spectral_demo() -> dict:
    M = alternating_line_matrix()
    N = M.gram().coefficient_sum()
    report = enumerate_permutation_cholesky(M)
    compatible = [e for e in report["results"] if e["compatible"]]
    return {
        "limit_matrix": N.tolist(),
        "n_permutations": report["n_permutations"],
        "n_compatible": report["n_compatible"],
        "compatible": [
            {
                "permutation": e["permutation"],
                "diag_qstarq": e["diag_qstarq"],
                "has_qstarq_diag": e["has_qstarq_diag"],
            }
            for e in compatible
        ],
    }
