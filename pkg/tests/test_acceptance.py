"""Acceptance suite: one test (and one printed pass/fail line) per criterion.

Tolerances are fixed constants next to each criterion; the random
criteria use a fixed seed so failures are reproducible.
"""

import math

import numpy as np
import pytest

from shiftchol import (
    Factorisation,
    Network,
    OpMatrix,
    Permutation,
    ShiftOp,
    Triple,
    build_cycle_matrix,
    build_state_space,
    cholesky_tree,
    cycle_schur_closed_form,
    dp_riccati_gain,
    edge_graph,
    extract_sparse_law,
    has_cycle_geq,
    is_chordal,
    relate_triangular_factors,
    solve_lqr,
    solve_normal,
)
from shiftchol.cholesky import (
    factorisation_residual,
    is_fill_in_free,
    schur_reduce,
)
from shiftchol.demos import cycle_schur_truncation_residual, spectral_demo
from shiftchol.errors import NoLeafEdge, PreconditionViolated
from shiftchol.graphs import DirectedGraph

from conftest import (
    all_connected_graphs,
    interleave_indices,
    line_network,
    random_forest_matrix,
    random_lemma3_factor,
    random_psd_rinf,
    random_rinf,
    random_shiftop,
    random_stable_triple,
)

R = 1.0 / math.sqrt(2.0)
SEED = 20250824


def report(num, label, ok):
    print(f"[criterion {num:2d}] {label}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({label}) failed"


def test_criterion_01_intro_example():
    """4-link line, r = 1/sqrt(2): printed K1 and K2, tol 1e-9."""
    law = solve_lqr(line_network(5, R))
    K1_expect = np.array(
        [
            [3 / 2, 0, 0, 0],
            [-1 / 2, 7 / 6, 0, 0],
            [0, -1 / 2, 15 / 14, 0],
            [0, 0, -1 / 2, 31 / 30],
        ]
    )
    K2_printed = (1.0 / math.sqrt(2.0)) * np.array(
        [
            [1 / 2, 1 / 2, -1, -1, 0, 0, 0, 0, 0],
            [0, 0, 1 / 2, 1 / 2, -1, -1, 0, 0, 0],
            [0, 0, 0, 0, 1 / 2, 1 / 2, -1, -1, 0],
            [0, 0, 0, 0, 0, 0, 1 / 2, 1 / 2, -1],
        ]
    )
    K2_got = law.K2[:, interleave_indices(5)]
    ok = (
        law.K1 is not None
        and np.max(np.abs(law.K1 - K1_expect)) <= 1e-9
        and np.max(np.abs(K2_got - K2_printed)) <= 1e-9
    )
    report(1, "intro 4-link line printed K1/K2", ok)


def test_criterion_02_three_link_reproduction():
    """3-link line: factor entries and printed K1/K2, tol 1e-9."""
    net = line_network(4, R)
    from shiftchol.lqr import build_operator_matrix

    F = cholesky_tree(build_operator_matrix(net))
    L_expect = OpMatrix.from_rows(
        [
            [ShiftOp.constant(math.sqrt(1.5)), ShiftOp.zero(), ShiftOp.zero()],
            [
                ShiftOp.monomial(0, 1, -1.0 / math.sqrt(3.0)),
                ShiftOp.constant(math.sqrt(7.0 / 6.0)),
                ShiftOp.zero(),
            ],
            [
                ShiftOp.zero(),
                ShiftOp.monomial(0, 1, -math.sqrt(3.0 / 7.0)),
                ShiftOp.constant(math.sqrt(15.0 / 14.0)),
            ],
        ]
    )
    law = solve_lqr(net)
    K1_expect = np.array(
        [[3 / 2, 0, 0], [-1 / 2, 7 / 6, 0], [0, -1 / 2, 15 / 14]]
    )
    K2_printed = (1.0 / (2.0 * math.sqrt(2.0))) * np.array(
        [
            [1, 1, -2, -2, 0, 0, 0],
            [0, 0, 1, 1, -2, -2, 0],
            [0, 0, 0, 0, 1, 1, -2],
        ]
    )
    K2_got = law.K2[:, interleave_indices(4)]
    ok = (
        F.L.isclose(L_expect, 1e-9)
        and law.K1 is not None
        and np.max(np.abs(law.K1 - K1_expect)) <= 1e-9
        and np.max(np.abs(K2_got - K2_printed)) <= 1e-9
    )
    report(2, "3-link line factor and printed K1/K2", ok)


def test_criterion_03_worked_recursion():
    """Line matrix elimination: both reduced matrices, the base case
    2/sqrt(3), and the final factor with identity permutation, tol 1e-9."""
    z = ShiftOp.zero()
    qs = ShiftOp.qstar()
    m1 = ShiftOp.constant(-1.0)
    M = OpMatrix.from_rows([[qs, z, z], [m1, qs, z], [z, m1, qs], [z, z, m1]])

    _, _, M_red1, _ = schur_reduce(M)
    red1_ok = M_red1.isclose(
        OpMatrix.from_rows(
            [
                [ShiftOp.monomial(1, 0, 1 / math.sqrt(2.0)), z],
                [m1, qs],
                [z, m1],
            ]
        ),
        1e-9,
    )
    _, _, M_red2, _ = schur_reduce(M_red1)
    red2_ok = M_red2.isclose(
        OpMatrix.from_rows([[ShiftOp.monomial(1, 0, 1 / math.sqrt(3.0))], [m1]]),
        1e-9,
    )
    base = M_red2.gram()[0, 0].sqrt_rinf()
    base_ok = base.isclose(ShiftOp.constant(2.0 / math.sqrt(3.0)), 1e-9)

    F = cholesky_tree(M)
    L_expect = OpMatrix.from_rows(
        [
            [ShiftOp.constant(math.sqrt(2.0)), z, z],
            [
                ShiftOp.monomial(0, 1, -1.0 / math.sqrt(2.0)),
                ShiftOp.constant(math.sqrt(1.5)),
                z,
            ],
            [
                z,
                ShiftOp.monomial(0, 1, -math.sqrt(2.0 / 3.0)),
                ShiftOp.constant(2.0 / math.sqrt(3.0)),
            ],
        ]
    )
    final_ok = F.P.image == (0, 1, 2) and F.L.isclose(L_expect, 1e-9)
    report(3, "worked recursion intermediates and factor",
           red1_ok and red2_ok and base_ok and final_ok)


def test_criterion_04_identity_and_fill_in():
    """200 random forests: residual <= 1e-8 and no fill-in; cycles
    n = 3..8 raise the obstruction."""
    rng = np.random.default_rng(SEED)
    ok = True
    for _ in range(200):
        M, _ = random_forest_matrix(rng, max_edges=20)
        F = cholesky_tree(M)
        ok = ok and factorisation_residual(M, F) <= 1e-8
        ok = ok and is_fill_in_free(M, F)
    for n in range(3, 9):
        try:
            cholesky_tree(build_cycle_matrix(n))
            ok = False
        except NoLeafEdge:
            pass
    report(4, "200 random forests + cycle obstruction", ok)


def test_criterion_05_oracle_equivalence():
    """Factorisation gain equals the Riccati value-iteration gain within
    1e-6 on the three 5-vertex topologies, the 21-node tree, and 50
    random trees with r in {0.5, 1/sqrt(2), 0.9}."""
    tol = 1e-6
    ok = True

    fixed = [
        ((3, 1), (4, 2), (4, 3), (5, 4)),      # line with one branch point
        ((3, 1), (2, 4), (3, 4), (5, 4)),      # arcs meeting at a hub
        ((1, 2), (2, 3), (4, 3), (5, 4)),      # alternating directions
    ]
    for arcs in fixed:
        net = Network(
            DirectedGraph(5, tuple((a - 1, b - 1) for a, b in arcs)), R
        )
        law = solve_lqr(net)
        G = dp_riccati_gain(build_state_space(net), net.r)
        ok = ok and np.max(np.abs(law.K - G)) <= tol

    # 21-node two-level star: centre 20 feeds hubs, hubs feed leaves
    arcs = [(20, 4), (20, 9), (20, 14), (20, 19)]
    for hub, leaves in [(4, range(0, 4)), (9, range(5, 9)),
                        (14, range(10, 14)), (19, range(15, 19))]:
        arcs += [(hub, leaf) for leaf in leaves]
    net = Network(DirectedGraph(21, tuple(arcs)), R)
    law = solve_lqr(net)
    G = dp_riccati_gain(build_state_space(net), net.r)
    ok = ok and np.max(np.abs(law.K - G)) <= tol

    from conftest import random_tree_network

    rng = np.random.default_rng(SEED)
    for i in range(50):
        for r in (0.5, R, 0.9):
            net = random_tree_network(rng, max_nodes=12, r=r)
            law = solve_lqr(net)
            G = dp_riccati_gain(build_state_space(net), net.r)
            ok = ok and np.max(np.abs(law.K - G)) <= tol
    report(5, "LQR gain vs Riccati oracle", ok)


def test_criterion_06_forward_shift_impossibility():
    """Limit matrix within 1e-12 of the printed one; 8 of 24 orders
    compatible; every compatible factor carries (q*)q on the diagonal."""
    out = spectral_demo()
    N = np.array(out["limit_matrix"])
    expect = np.array(
        [
            [1.5, -R, 0.0, 0.0],
            [-R, 1.5, 0.5, 0.0],
            [0.0, 0.5, 1.5, -R],
            [0.0, 0.0, -R, 1.5],
        ]
    )
    ok = np.max(np.abs(N - expect)) <= 1e-12
    ok = ok and out["n_permutations"] == 24 and out["n_compatible"] == 8
    ok = ok and len(out["compatible"]) == 8
    for entry in out["compatible"]:
        ok = ok and max(abs(c) for c in entry["diag_qstarq"]) > 1e-6
    report(6, "alternating line: 8/24 orders, (q*)q diagonals", ok)


def test_criterion_07_cycle_closed_form():
    """Closed-form cycle Schur complement vs truncation oracle (T = 96,
    interior block, tol 1e-8); outside the diagonal sub-ring; q^n
    coefficient -1/n within 1e-10."""
    ok = True
    for n in (3, 4, 5):
        s = cycle_schur_closed_form(n)
        ok = ok and cycle_schur_truncation_residual(n, T=96) <= 1e-8
        ok = ok and not s.is_rinf()
        ok = ok and abs(s.coefficient(0, n) + 1.0 / n) <= 1e-10
    report(7, "cycle Schur complement closed form", ok)


def test_criterion_08_chordality_biconditional():
    """All connected graphs on <= 6 vertices: cycle >= 4 iff the edge
    graph is not chordal."""
    counterexamples = 0
    for n in range(1, 7):
        for G in all_connected_graphs(n):
            if has_cycle_geq(G, 4) != (not is_chordal(edge_graph(G))):
                counterexamples += 1
    report(8, "edge-graph chordality biconditional (n <= 6)",
           counterexamples == 0)


def test_criterion_09_pseudoinverse_and_sqrt():
    """100 random diagonal scalars satisfy the Moore-Penrose axioms
    (residual <= 1e-10); 100 PSD scalars have PSD square roots."""
    rng = np.random.default_rng(SEED)
    ok = True
    for _ in range(100):
        x = random_rinf(rng, signed=True)
        p = x.pinv_rinf()
        ok = ok and (x * p * x).isclose(x, 1e-10)
        ok = ok and (p * x * p).isclose(p, 1e-10)
        ok = ok and (x * p).adjoint().isclose(x * p, 1e-10)
        ok = ok and (p * x).adjoint().isclose(p * x, 1e-10)
    for _ in range(100):
        y = random_psd_rinf(rng)
        s = y.sqrt_rinf()
        ok = ok and (s * s).isclose(y, 1e-10)
        ok = ok and s.is_psd_rinf()
    report(9, "pseudoinverse axioms and PSD square roots", ok)


def test_criterion_10_realization_faithfulness():
    """100 random (operator, realization) pairs agree with direct window
    application over 50 samples, tol 1e-10."""
    rng = np.random.default_rng(SEED)
    ok = True
    n = 50
    for _ in range(100):
        t = random_stable_triple(rng)
        x = random_shiftop(rng)
        direct = t.samples(n + x.max_degree() + 1)[:, 0, 0]
        win = x.apply(direct)
        got = t.apply_shiftop(x).samples(n)[:, 0, 0]
        ok = ok and np.max(np.abs(got - win.values[:n])) <= 1e-10
    report(10, "realization algebra vs window application", ok)


def test_criterion_11_back_substitution_contract():
    """50 random real-plus-forward-shift systems: K1 z[0] = K2 x0 within
    1e-9, z computed purely by triple back substitution."""
    rng = np.random.default_rng(SEED)
    ok = True
    for _ in range(50):
        m = int(rng.integers(2, 6))
        n_x = int(rng.integers(2, 7))
        L, _, _ = random_lemma3_factor(rng, m)
        r = float(rng.uniform(0.3, 0.9))
        K2 = rng.uniform(-1.0, 1.0, size=(m, n_x))
        x0 = rng.uniform(-1.0, 1.0, size=n_x)
        w = [Triple.geometric(K2[e : e + 1, :], r, x0) for e in range(m)]
        F = Factorisation(L, Permutation.identity(m))
        z = solve_normal(F, w)
        z0 = np.vstack([t.first() for t in z])[:, 0]
        K1, _ = extract_sparse_law(L, r, K2)
        ok = ok and np.max(np.abs(K1 @ z0 - K2 @ x0)) <= 1e-9
    report(11, "sparse law contract K1 z[0] = K2 x0", ok)


def test_criterion_12_factor_relation():
    """50 pairs (L1, L1 D) with diagonal +/-1 D pass the triangular-factor
    relation; perturbed pairs are rejected."""
    rng = np.random.default_rng(SEED)
    ok = True
    for _ in range(50):
        m = int(rng.integers(2, 6))
        L1, _, _ = random_lemma3_factor(rng, m)
        signs = rng.choice([-1.0, 1.0], size=m)
        L2 = OpMatrix.from_rows(
            [
                [L1[i, j].scale(signs[j]) for j in range(m)]
                for i in range(m)
            ]
        )
        ok = ok and relate_triangular_factors(L1, L2)
        bad = L2.with_entry(
            m - 1, 0, L2[m - 1, 0] + ShiftOp.constant(1e-3)
        )
        try:
            relate_triangular_factors(L1, bad)
            ok = False
        except PreconditionViolated:
            pass
    report(12, "related triangular factors accept/reject", ok)
