"""Deterministic JSON output and the graph-generator input format.

All documents are emitted with sorted keys and floats printed with 17
significant digits, so identical inputs produce byte-identical output.
"""

from __future__ import annotations

import json
import math

from .errors import SchemaError
from .graphs import UndirectedGraph
from .op_matrix import OpMatrix
from .shift_algebra import ShiftOp


def _encode(obj) -> str:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float {obj} in output document")
        return format(obj, ".17g")
    if isinstance(obj, dict):
        items = sorted(obj.items())
        body = ",".join(f"{json.dumps(str(k))}:{_encode(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    return _encode(obj) + "\n"


def matrix_from_generator(doc: dict) -> tuple:
    """Build a graph-structured operator matrix from a generator spec.

    Document shape::

        {"graph": {"vertices": n, "edges": [[u, v], ...]},
         "entries": [{"vertex": i, "edge": j, "alpha": [a0, a1, ...],
                      "k": 0, "shift": "q" | "qstar"}, ...]}

    Each entry places the operator diag(alpha)·q^k (or (q*)^k·diag(alpha))
    at an incident (vertex, edge) slot.  ``alpha`` is the partial-sums
    profile of a diagonal scalar; a bare number is shorthand for the
    constant scalar.  Returns (matrix, graph).
    """
    try:
        graph = UndirectedGraph.from_json(doc["graph"])
        entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad generator document: {exc}") from exc
    M = OpMatrix.zeros(graph.n_vertices, len(graph.edges))
    for e in entries:
        try:
            i, j = int(e["vertex"]), int(e["edge"])
            raw = e["alpha"]
            alpha = [float(raw)] if isinstance(raw, (int, float)) else [
                float(a) for a in raw
            ]
            k = int(e.get("k", 0))
            shift = e.get("shift", "qstar")
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad generator entry {e}: {exc}") from exc
        if not (0 <= j < len(graph.edges)) or i not in graph.edges[j]:
            raise SchemaError(
                f"entry at vertex {i}, edge {j} is not an incident slot"
            )
        if k < 0 or shift not in ("q", "qstar"):
            raise SchemaError(f"bad shift specification in entry {e}")
        base = ShiftOp.diagonal(alpha)
        op = ShiftOp.q(k) if shift == "q" else ShiftOp.qstar(k)
        x = base * op if shift == "q" else op * base
        M = M.with_entry(i, j, M[i, j] + x)
    return M, graph


def parse_matrix_document(doc: dict) -> tuple:
    """Accept either a raw operator-matrix document or a generator spec.

    Returns (matrix, graph-or-None).
    """
    if "entries" in doc and "graph" in doc:
        return matrix_from_generator(doc)
    if "entries" in doc and "rows" in doc:
        try:
            return OpMatrix.from_json(doc), None
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad matrix document: {exc}") from exc
    raise SchemaError("expected a matrix document or a generator spec")
