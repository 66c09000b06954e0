"""Shared random generators and oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from shiftchol import Network, OpMatrix, ShiftOp, Triple, UndirectedGraph
from shiftchol.graphs import DirectedGraph


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_rinf(rng, max_terms=3, lo=0.3, hi=2.0, signed=False):
    """Random diagonal-sub-ring element with well-conditioned weights.

    The partial sums are drawn directly (so inverses stay bounded) and
    converted back to coefficient form.
    """
    n = int(rng.integers(1, max_terms + 1))
    sums = rng.uniform(lo, hi, size=n)
    if signed:
        sums *= rng.choice([-1.0, 1.0], size=n)
    coeffs = np.diff(sums, prepend=0.0)
    return ShiftOp.diagonal(coeffs)


def random_psd_rinf(rng, max_terms=3):
    x = random_rinf(rng, max_terms)
    return x * x


def random_shiftop(rng, max_deg=2, max_terms=4, scale=1.0):
    out = ShiftOp.zero()
    for _ in range(int(rng.integers(1, max_terms + 1))):
        i = int(rng.integers(0, max_deg + 1))
        j = int(rng.integers(0, max_deg + 1))
        out = out + ShiftOp.monomial(i, j, scale * rng.uniform(-1.0, 1.0))
    return out


def random_forest_graph(rng, max_edges=20):
    """Random labelled forest with between 1 and max_edges edges."""
    n_edges = int(rng.integers(1, max_edges + 1))
    n_vertices = n_edges + int(rng.integers(1, 4))
    parents = {}
    order = rng.permutation(n_vertices)
    edges = []
    for idx in range(1, n_vertices):
        if len(edges) == n_edges:
            break
        # attach to a random earlier vertex; skipping some keeps forests
        if rng.uniform() < 0.9 or idx == 1:
            u = int(order[int(rng.integers(0, idx))])
            v = int(order[idx])
            edges.append((u, v))
    return UndirectedGraph(n_vertices, tuple(edges))


def random_forest_matrix(rng, max_edges=20):
    """Random member of the graph-structured class over a random forest.

    Each incident (vertex, edge) slot gets a random diagonal scalar
    (degree <= 2) composed with a shift q^k or (q*)^k, k <= 2.
    """
    G = random_forest_graph(rng, max_edges)
    M = OpMatrix.zeros(G.n_vertices, len(G.edges))
    for j, (u, v) in enumerate(G.edges):
        for vert in (u, v):
            if rng.uniform() < 0.1:
                continue  # occasionally leave an endpoint empty
            alpha = random_rinf(rng, max_terms=2, signed=True)
            k = int(rng.integers(0, 3))
            if rng.uniform() < 0.5:
                x = alpha * ShiftOp.q(k)
            else:
                x = ShiftOp.qstar(k) * alpha
            M = M.with_entry(vert, j, x)
    return M, G


def random_tree_network(rng, max_nodes=12, r=0.7):
    """Random directed spanning tree with random arc orientations."""
    n = int(rng.integers(2, max_nodes + 1))
    order = rng.permutation(n)
    arcs = []
    for idx in range(1, n):
        u = int(order[int(rng.integers(0, idx))])
        v = int(order[idx])
        if rng.uniform() < 0.5:
            u, v = v, u
        arcs.append((u, v))
    return Network(DirectedGraph(n, tuple(arcs)), r)


def random_lemma3_factor(rng, n):
    """Random lower-triangular L = L0 + L1·q with invertible real diag."""
    L0 = np.tril(rng.uniform(-1.0, 1.0, size=(n, n)), -1)
    np.fill_diagonal(L0, rng.uniform(0.5, 2.0, size=n) * rng.choice([-1, 1], n))
    L1 = np.tril(rng.uniform(-1.0, 1.0, size=(n, n)), -1)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            x = ShiftOp.constant(L0[i, j]) + ShiftOp.q().scale(L1[i, j])
            row.append(x)
        rows.append(row)
    return OpMatrix.from_rows(rows), L0, L1


def random_stable_triple(rng, n_state=4, n_outputs=1, n_basis=1, radius=0.8):
    A = rng.uniform(-1.0, 1.0, size=(n_state, n_state))
    eig = np.max(np.abs(np.linalg.eigvals(A)))
    if eig > 0:
        A *= radius / eig
    C = rng.uniform(-1.0, 1.0, size=(n_outputs, n_state))
    x0 = rng.uniform(-1.0, 1.0, size=(n_state, n_basis))
    return Triple(C, A, x0)


def line_network(n_vertices, r):
    """Uniformly oriented line: arc e carries flow from vertex e+1 to e."""
    arcs = tuple((i + 1, i) for i in range(n_vertices - 1))
    return Network(DirectedGraph(n_vertices, arcs), r)


def interleave_indices(n_vertices):
    """Map [vertices; buffers] state order to the alternating order
    (v0, b0, v1, b1, ..., v_last) used in the printed line examples."""
    out = []
    for i in range(n_vertices - 1):
        out.append(i)
        out.append(n_vertices + i)
    out.append(n_vertices - 1)
    return out


def brute_force_chordal(G: UndirectedGraph) -> bool:
    """Independent chordality oracle: greedy simplicial elimination.

    A graph is chordal iff vertices can be removed one at a time such
    that each removed vertex's remaining neighbourhood is a clique.
    """
    adj = [set(s) for s in G.adjacency()]
    alive = set(range(G.n_vertices))
    while alive:
        simplicial = None
        for v in alive:
            nbrs = adj[v] & alive
            if all(b in adj[a] for a in nbrs for b in nbrs if a < b):
                simplicial = v
                break
        if simplicial is None:
            return False
        alive.discard(simplicial)
    return True


def all_connected_graphs(n_vertices):
    """Yield every connected labelled graph on exactly n_vertices."""
    import itertools

    from shiftchol.graphs import is_connected

    pairs = list(itertools.combinations(range(n_vertices), 2))
    for bits in range(1 << len(pairs)):
        edges = tuple(pairs[i] for i in range(len(pairs)) if bits >> i & 1)
        G = UndirectedGraph(n_vertices, edges)
        if is_connected(G):
            yield G
