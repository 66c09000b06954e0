"""Transportation-network LQR front end.

A network is a directed forest of storage facilities (vertices) and
transportation links (arcs) with a discount rate r.  The module builds
the state-space and operator-matrix models, forms the least-squares
right-hand side, runs the operator factorisation pipeline to produce a
control law K1·u[k] = K2·x[k], and verifies the resulting dense gain
against an independent dynamic-programming Riccati iteration.

State ordering convention: all vertex levels first (vertex index
order), then one buffer state per arc (arc index order).  The optimal
input under the returned law is u[k] = -K x[k] with K = K1^{-1} K2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cholesky import Factorisation, cholesky_tree
from .errors import NoConvergence, NotAForest, NotLemma3Shape, SchemaError
from .graphs import DirectedGraph, is_forest
from .op_matrix import OpMatrix
from .seq_engine import Triple
from .shift_algebra import ShiftOp
from .solver import ControlLaw, extract_dense_gain, extract_sparse_law


@dataclass(frozen=True)
class Network:
    graph: DirectedGraph
    r: float

    def __post_init__(self):
        if not is_forest(self.graph.undirected()):
            raise NotAForest("transportation network contains a cycle")
        if not 0.0 < self.r < 1.0:
            raise SchemaError(f"discount {self.r} outside (0, 1)")

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def n_arcs(self) -> int:
        return len(self.graph.arcs)

    def to_json(self) -> dict:
        out = self.graph.to_json()
        out["discount"] = self.r
        return out

    @staticmethod
    def from_json(obj: dict) -> "Network":
        try:
            r = float(obj["discount"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad network document: {exc}") from exc
        return Network(DirectedGraph.from_json(obj), r)


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B.shape[1]


def build_state_space(net: Network) -> StateSpace:
    """Levels-then-buffers state-space model of the network.

    Each vertex level keeps itself plus whatever its incoming buffers
    delivered; each arc buffer holds the amount in transit, set to the
    arc's input each step; the input also leaves the source level.  The
    output selects the vertex levels.
    """
    n_v, n_a = net.n_vertices, net.n_arcs
    n_x = n_v + n_a
    A = np.zeros((n_x, n_x))
    B = np.zeros((n_x, n_a))
    for v in range(n_v):
        A[v, v] = 1.0
    for a, (src, dst) in enumerate(net.graph.arcs):
        A[dst, n_v + a] = 1.0
        B[n_v + a, a] = 1.0
        B[src, a] = -1.0
    C = np.hstack([np.eye(n_v), np.zeros((n_v, n_a))])
    return StateSpace(A, B, C)


def build_operator_matrix(net: Network) -> OpMatrix:
    """Vertex-by-arc flow-balance matrix: -1 out, r·q* (delayed) in."""
    rows = []
    for v in range(net.n_vertices):
        row = []
        for (src, dst) in net.graph.arcs:
            if src == v:
                row.append(ShiftOp.constant(-1.0))
            elif dst == v:
                row.append(ShiftOp.monomial(1, 0, net.r))
            else:
                row.append(ShiftOp.zero())
        rows.append(row)
    return OpMatrix.from_rows(rows)


def _shift_coefficient_parts(M: OpMatrix):
    """Real matrices M0, M1 of the decomposition M = M0 + M1·q*."""
    M0 = np.zeros(M.shape)
    M1 = np.zeros(M.shape)
    for i in range(M.rows):
        for j in range(M.cols):
            M0[i, j] = M[i, j].coefficient(0, 0)
            M1[i, j] = M[i, j].coefficient(1, 0)
    return M0, M1


def rhs_coefficient(net: Network, ss: StateSpace) -> np.ndarray:
    """The real matrix K2 with w[k] = -r^k · K2 · x0."""
    M0, M1 = _shift_coefficient_parts(build_operator_matrix(net))
    return (M0.T + net.r * M1.T) @ ss.C @ (net.r * ss.A)


def _resolvent(d: Triple, r: float) -> Triple:
    """Realize s with (1 - r q*) s = d, i.e. s[k] = sum r^(k-j) d[j]."""
    p, m = d.n_outputs, d.n_state
    A = np.block([[r * np.eye(p), d.C @ d.A], [np.zeros((m, p)), d.A]])
    C = np.hstack([np.eye(p), np.zeros((p, m))])
    x0 = np.vstack([d.C @ d.x0, d.x0])
    return Triple(C, A, x0)


def build_rhs(net: Network, ss: StateSpace, x0: np.ndarray) -> list:
    """Right-hand side triples of the normal equations, one per arc.

    Builds the initial-condition sequence d = (C x0, r C (A - I) x0,
    0, ...), feeds it through the geometric resolvent to obtain y_init,
    and applies -q·M* row by row.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim == 1:
        x0 = x0[:, None]
    r, A, C = net.r, ss.A, ss.C
    d = Triple.finite([C @ x0, r * C @ (A - np.eye(ss.n_x)) @ x0])
    y_init = _resolvent(d, r).prune()
    components = [
        Triple(y_init.C[v:v + 1, :], y_init.A, y_init.x0)
        for v in range(net.n_vertices)
    ]
    Mstar = build_operator_matrix(net).adjoint()
    q = ShiftOp.q()
    out = []
    for e in range(net.n_arcs):
        acc = Triple.zero(1, x0.shape[1])
        for v in range(net.n_vertices):
            entry = Mstar[e, v]
            if entry.coeffs:
                acc = acc + components[v].apply_shiftop((q * entry).scale(-1.0))
        out.append(acc.prune())
    return out


def build_rhs_simplified(net: Network, ss: StateSpace, x0: np.ndarray) -> list:
    """Closed-form right-hand side w[k] = -r^k K2 x0 (valid since A = A²)."""
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim == 1:
        x0 = x0[:, None]
    K2 = rhs_coefficient(net, ss)
    return [
        Triple.geometric(-K2[e:e + 1, :], net.r, x0) for e in range(net.n_arcs)
    ]


def solve_lqr(net: Network) -> ControlLaw:
    """Factorisation pipeline producing the sparse control law.

    When the factor is of the real-plus-forward-shift shape, the sparse
    pair (K1, K2) is read off directly (with K1 conjugated back to the
    original arc ordering); otherwise only the dense gain is returned.
    """
    ss = build_state_space(net)
    M = build_operator_matrix(net)
    F = cholesky_tree(M)
    K2 = rhs_coefficient(net, ss)

    builder = lambda basis: build_rhs_simplified(net, ss, basis)
    K = -extract_dense_gain(F, builder, ss.n_x)

    K1 = None
    try:
        K1_perm, _ = extract_sparse_law(F.L, net.r, K2)
        n_u = ss.n_u
        K1 = np.zeros((n_u, n_u))
        for i in range(n_u):
            for j in range(n_u):
                K1[F.P.image[i], F.P.image[j]] = K1_perm[i, j]
        resid = np.max(np.abs(np.linalg.solve(K1, K2) - K))
        if resid > 1e-8:
            raise NoConvergence(
                f"sparse and dense laws disagree by {resid:.3e}"
            )
    except NotLemma3Shape:
        pass
    return ControlLaw(K1, K2, K)


def dp_riccati_gain(
    ss: StateSpace,
    r: float,
    horizon: int = 10000,
    tol: float = 1e-12,
) -> np.ndarray:
    """Value iteration for the discounted problem; independent oracle.

    Returns G such that the optimal input is u[k] = -G x[k] for the
    dynamics x[k+1] = rA x[k] + B u[k] with cost sum ||C x||².
    """
    A_bar = r * ss.A
    Q = ss.C.T @ ss.C
    P = np.zeros_like(ss.A)
    resid = np.inf
    for _ in range(horizon):
        BtPB = ss.B.T @ P @ ss.B
        BtPA = ss.B.T @ P @ A_bar
        P_next = Q + A_bar.T @ P @ A_bar - BtPA.T @ np.linalg.pinv(
            BtPB, rcond=1e-10, hermitian=True
        ) @ BtPA
        # the exact iterate is symmetric PSD; symmetrising prevents
        # roundoff asymmetry from being amplified through the
        # ill-conditioned pseudoinverse
        P_next = (P_next + P_next.T) / 2.0
        resid = np.max(np.abs(P_next - P))
        P = P_next
        if resid <= tol:
            break
    else:
        if resid > 100 * tol:
            raise NoConvergence(f"Riccati residual {resid:.3e} after {horizon}")
    BtPB = ss.B.T @ P @ ss.B
    return np.linalg.pinv(BtPB, rcond=1e-10, hermitian=True) @ ss.B.T @ P @ A_bar


def closed_loop_cost(
    ss: StateSpace, r: float, G: np.ndarray, x0: np.ndarray, steps: int = 200
) -> float:
    x = np.asarray(x0, dtype=float)
    A_bar = r * ss.A
    cost = 0.0
    for _ in range(steps):
        cost += float(x @ ss.C.T @ ss.C @ x)
        x = A_bar @ x - ss.B @ (G @ x)
    return cost


def verify(net: Network, n_rollouts: int = 20, seed: int = 0) -> dict:
    """Compare the factorisation gain with the Riccati oracle."""
    law = solve_lqr(net)
    ss = build_state_space(net)
    G = dp_riccati_gain(ss, net.r)
    deviation = float(np.max(np.abs(law.K - G)))
    rng = np.random.default_rng(seed)
    costs = []
    for _ in range(n_rollouts):
        x0 = rng.standard_normal(ss.n_x)
        costs.append(
            {
                "factorised": closed_loop_cost(ss, net.r, law.K, x0),
                "riccati": closed_loop_cost(ss, net.r, G, x0),
            }
        )
    return {
        "gain_deviation": deviation,
        "costs": costs,
        "pattern": law.pattern(),
        "sparse_pair_available": law.K1 is not None,
    }
