"""Graph utilities: trees and forests, edge graphs, chordality, cycle
search, and the cycle-matrix constructions behind the converse of the
tree-factorisation theorem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SchemaError, TooLarge
from .op_matrix import OpMatrix
from .shift_algebra import Monomial, ShiftOp

CYCLE_SEARCH_MAX_VERTICES = 12


@dataclass(frozen=True)
class UndirectedGraph:
    n_vertices: int
    edges: tuple  # tuple of sorted (u, v) pairs

    def __post_init__(self):
        edges = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise SchemaError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise SchemaError(f"edge ({u},{v}) out of range")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise SchemaError(f"duplicate edge {e}")
            seen.add(e)
            edges.append(e)
        object.__setattr__(self, "edges", tuple(edges))

    def adjacency(self) -> list:
        adj = [set() for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices, "edges": [list(e) for e in self.edges]}

    @staticmethod
    def from_json(obj: dict) -> "UndirectedGraph":
        try:
            return UndirectedGraph(int(obj["vertices"]),
                                   tuple(tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad graph document: {exc}") from exc


@dataclass(frozen=True)
class DirectedGraph:
    n_vertices: int
    arcs: tuple  # tuple of (from, to) pairs

    def __post_init__(self):
        arcs = tuple((int(a), int(b)) for a, b in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        # validates ranges, self-loops, and duplicate links
        self.undirected()

    def undirected(self) -> UndirectedGraph:
        return UndirectedGraph(self.n_vertices, self.arcs)

    def to_json(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "arcs": [{"from": a, "to": b} for a, b in self.arcs],
        }

    @staticmethod
    def from_json(obj: dict) -> "DirectedGraph":
        try:
            return DirectedGraph(
                int(obj["vertices"]),
                tuple((int(a["from"]), int(a["to"])) for a in obj["arcs"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad directed graph document: {exc}") from exc


# -- connectivity ------------------------------------------------------

def _components(G: UndirectedGraph) -> list:
    adj = G.adjacency()
    seen = [False] * G.n_vertices
    comps = []
    for s in range(G.n_vertices):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(comp)
    return comps


def is_connected(G: UndirectedGraph) -> bool:
    return len(_components(G)) <= 1


def is_forest(G: UndirectedGraph) -> bool:
    # acyclic iff every component has |edges| = |vertices| - 1
    return len(G.edges) == G.n_vertices - len(_components(G))


def is_tree(G: UndirectedGraph) -> bool:
    return is_connected(G) and len(G.edges) == G.n_vertices - 1


# -- edge graph and chordality -----------------------------------------

def edge_graph(G: UndirectedGraph) -> UndirectedGraph:
    """Graph on the edges of G, adjacent when they share an endpoint."""
    m = len(G.edges)
    out = []
    for a in range(m):
        for b in range(a + 1, m):
            if set(G.edges[a]) & set(G.edges[b]):
                out.append((a, b))
    return UndirectedGraph(m, tuple(out))


def maximum_cardinality_search(G: UndirectedGraph) -> list:
    """Elimination ordering candidate; ties broken by lowest index."""
    adj = G.adjacency()
    weight = [0] * G.n_vertices
    placed = [False] * G.n_vertices
    order = []
    for _ in range(G.n_vertices):
        v = max(
            (u for u in range(G.n_vertices) if not placed[u]),
            key=lambda u: (weight[u], -u),
        )
        placed[v] = True
        order.append(v)
        for w in adj[v]:
            if not placed[w]:
                weight[w] += 1
    return order


def is_perfect_elimination_ordering(G: UndirectedGraph, order: list) -> bool:
    adj = G.adjacency()
    pos = {v: i for i, v in enumerate(order)}
    # eliminate in reverse of the search order
    for v in order:
        later = [w for w in adj[v] if pos[w] > pos[v]]
        if not later:
            continue
        parent = min(later, key=lambda w: pos[w])
        if not set(later) - {parent} <= adj[parent]:
            return False
    return True


def is_chordal(G: UndirectedGraph) -> bool:
    order = maximum_cardinality_search(G)
    order.reverse()
    return is_perfect_elimination_ordering(G, order)


def has_cycle_geq(G: UndirectedGraph, k: int) -> bool:
    """Exhaustive search for a simple cycle of length >= k."""
    if k < 3:
        raise ValueError("cycle length threshold must be at least 3")
    if G.n_vertices > CYCLE_SEARCH_MAX_VERTICES:
        raise TooLarge(
            f"{G.n_vertices} vertices exceeds the "
            f"{CYCLE_SEARCH_MAX_VERTICES}-vertex cycle-search guard"
        )
    adj = G.adjacency()
    found = False

    def dfs(start, v, visited):
        nonlocal found
        if found:
            return
        for w in adj[v]:
            if w == start and len(visited) >= k:
                found = True
                return
            if w > start and w not in visited:
                visited.add(w)
                dfs(start, w, visited)
                visited.discard(w)

    for s in range(G.n_vertices):
        dfs(s, s, {s})
        if found:
            return True
    return False


# -- cycle matrices ----------------------------------------------------

def build_cycle_matrix(n: int) -> OpMatrix:
    """n x n matrix with -1 diagonal, q* subdiagonal, q* top-right."""
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    z = ShiftOp.zero()
    qs = ShiftOp.qstar()
    minus1 = ShiftOp.constant(-1.0)
    rows = []
    for i in range(n):
        row = [z] * n
        row[i] = minus1
        row[(i - 1) % n] = qs
        rows.append(tuple(row))
    return OpMatrix(tuple(rows))


def cycle_graph(n: int) -> UndirectedGraph:
    return UndirectedGraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def cycle_schur_closed_form(n: int) -> ShiftOp:
    """Schur complement of the cycle Gram after eliminating n-1 columns.

    Exact rational coefficients, assembled with fractions then cast to
    float: ((n+1)/n)·1 − (1/n)q^n − (1/n)(q*)^n − Σ 1/(i(i+1)) (q*)^i q^i.
    The sign of the Σ term is pinned by three independent computations:
    a dense finite-section Schur complement, the bi-infinite bulk symbol
    (2 − z^n − conj(z)^n)/n, and an exact elimination carried out in the
    operator algebra itself.
    """
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    coeffs = {
        Monomial(0, 0): float(Fraction(n + 1, n)),
        Monomial(0, n): float(Fraction(-1, n)),
        Monomial(n, 0): float(Fraction(-1, n)),
    }
    for i in range(1, n):
        coeffs[Monomial(i, i)] = float(Fraction(-1, i * (i + 1)))
    return ShiftOp(coeffs)
