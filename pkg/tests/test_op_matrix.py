"""Unit tests for operator matrices, permutations, and sparsity."""

import numpy as np
import pytest

from shiftchol import OpMatrix, Permutation, ShiftOp, SparsityPattern, dominates
from shiftchol.errors import DimensionMismatch
from shiftchol.graphs import UndirectedGraph
from shiftchol.op_matrix import is_in_MG

from conftest import random_forest_matrix, random_shiftop


def random_opmatrix(rng, rows, cols):
    return OpMatrix.from_rows(
        [[random_shiftop(rng) for _ in range(cols)] for _ in range(rows)]
    )


def test_permutation_basics():
    P = Permutation((2, 0, 1))
    assert P.apply(["a", "b", "c"]) == ["c", "a", "b"]
    assert P.compose(P.inverse()).image == (0, 1, 2)
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_permutation_matrix_consistency(rng):
    for _ in range(10):
        img = tuple(rng.permutation(5).tolist())
        P = Permutation(img)
        M = random_opmatrix(rng, 3, 5)
        left = M.permute_cols(P).coefficient_sum()
        right = M.coefficient_sum() @ P.to_matrix()
        assert np.allclose(left, right)


def test_permutation_compose_matches_matrix_product(rng):
    a = Permutation(tuple(rng.permutation(6).tolist()))
    b = Permutation(tuple(rng.permutation(6).tolist()))
    assert np.allclose(
        a.compose(b).to_matrix(), a.to_matrix() @ b.to_matrix()
    )


def test_matmul_matches_truncation(rng):
    T = 32
    A = random_opmatrix(rng, 2, 3)
    B = random_opmatrix(rng, 3, 2)
    lhs = (A @ B).to_truncation(T)
    rhs = A.to_truncation(T) @ B.to_truncation(T)
    # interior agreement: compare the leading window of each block
    w = T - 8
    for i in range(2):
        for j in range(2):
            bl = lhs[i * T : i * T + w, j * T : j * T + w]
            br = rhs[i * T : i * T + w, j * T : j * T + w]
            assert np.allclose(bl, br, atol=1e-10)


def test_gram_is_self_adjoint(rng):
    M = random_opmatrix(rng, 4, 3)
    G = M.gram()
    assert G.isclose(G.adjoint(), 1e-12)


def test_adjoint_reverses_products(rng):
    A = random_opmatrix(rng, 2, 3)
    B = random_opmatrix(rng, 3, 2)
    assert (A @ B).adjoint().isclose(B.adjoint() @ A.adjoint(), 1e-12)


def test_dimension_mismatch():
    A = OpMatrix.zeros(2, 3)
    with pytest.raises(DimensionMismatch):
        A @ A


def test_dominates():
    a = SparsityPattern(np.array([[1, 1], [0, 1]], dtype=bool))
    b = SparsityPattern(np.array([[1, 0], [0, 1]], dtype=bool))
    assert dominates(a, b)
    assert not dominates(b, a)


def test_sparsity_and_lower_triangular():
    z, one = ShiftOp.zero(), ShiftOp.identity()
    L = OpMatrix.from_rows([[one, z], [one, one]])
    assert L.is_lower_triangular()
    assert L.sparsity().count() == 3
    assert not OpMatrix.from_rows([[z, one], [z, z]]).is_lower_triangular()


def test_coefficient_sum_maps_shifts_to_one():
    x = ShiftOp.q().scale(2.0) + ShiftOp.qstar().scale(-0.5)
    M = OpMatrix.from_rows([[x]])
    assert M.coefficient_sum()[0, 0] == pytest.approx(1.5)


def test_is_in_MG(rng):
    M, G = random_forest_matrix(rng, max_edges=8)
    assert is_in_MG(M, G)
    # a nonzero entry at a non-incident slot breaks membership
    for i in range(M.rows):
        u, v = G.edges[0]
        if i not in (u, v):
            bad = M.with_entry(i, 0, ShiftOp.identity())
            assert not is_in_MG(bad, G)
            break


def test_is_in_MG_rejects_mixed_offsets():
    G = UndirectedGraph(2, ((0, 1),))
    x = ShiftOp.identity() + ShiftOp.q()  # offsets 0 and 1
    M = OpMatrix.zeros(2, 1).with_entry(0, 0, x)
    assert not is_in_MG(M, G)


def test_json_roundtrip(rng):
    M = random_opmatrix(rng, 3, 2)
    assert OpMatrix.from_json(M.to_json()).isclose(M, 0.0)
