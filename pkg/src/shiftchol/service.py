"""HTTP surface wrapping the factorisation and control-law pipeline.

Error mapping: malformed documents come back as 400, structural
obstructions (cycles where a forest is required) as 409, and numerical
failures (singular diagonals, indefiniteness) as 422.  The response body
always carries the originating error class name so thin clients can map
it onto exit codes without parsing messages.
"""

from __future__ import annotations

import contextlib

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import demos, lqr
from .cholesky import cholesky_tree
from .errors import (
    DimensionMismatch,
    MalformedColumn,
    NoConvergence,
    NoLeafEdge,
    NotAForest,
    NotPSD,
    PreconditionViolated,
    SchemaError,
    ShiftCholError,
    Singular,
    TooLarge,
    WindowTooShort,
)
from .graphs import UndirectedGraph, edge_graph, has_cycle_geq, is_chordal, is_tree
from .schemas import (
    ChordalRequest,
    FactorRequest,
    LqrRequest,
    ToleranceOverrides,
)
from .serialize import parse_matrix_document
from .shift_algebra import tolerances

STRUCTURAL = (NoLeafEdge, NotAForest, MalformedColumn, TooLarge)
SCHEMA = (SchemaError, DimensionMismatch)
NUMERICAL = (Singular, NotPSD, NoConvergence, PreconditionViolated, WindowTooShort)

app = FastAPI(title="shiftchol", version="0.1.0")


@app.exception_handler(ShiftCholError)
async def _domain_error(request: Request, exc: ShiftCholError):
    if isinstance(exc, STRUCTURAL):
        status = 409
    elif isinstance(exc, SCHEMA):
        status = 400
    else:
        status = 422
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.exception_handler(RequestValidationError)
async def _validation_error(request: Request, exc: RequestValidationError):
    return JSONResponse(
        status_code=400,
        content={"error": "SchemaError", "detail": str(exc)},
    )


def _overrides(t: ToleranceOverrides):
    return tolerances(t.zero_tol, t.psd_tol, t.inv_tol)


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/factor")
def factor(req: FactorRequest):
    with _overrides(req.tolerances):
        M, _ = parse_matrix_document(req.matrix)
        F = cholesky_tree(M)
        # cholesky_tree re-verifies identity and fill-in before returning,
        # so reaching this point means the checks passed
        return F.to_json(M if req.check else None)


@app.post("/lqr")
def lqr_endpoint(req: LqrRequest):
    with _overrides(req.tolerances):
        net = lqr.Network.from_json(req.network.to_plain())
        law = lqr.solve_lqr(net)
        out = law.to_json()
        if req.oracle:
            out["report"] = lqr.verify(net)
        return out


@app.post("/chordal")
def chordal(req: ChordalRequest):
    G = UndirectedGraph(req.graph.vertices, tuple(req.graph.edges))
    long_cycle = has_cycle_geq(G, 4)
    eg_chordal = is_chordal(edge_graph(G))
    return {
        "is_tree": is_tree(G),
        "has_cycle_geq_4": long_cycle,
        "edge_graph_chordal": eg_chordal,
        "biconditional_holds": long_cycle == (not eg_chordal),
    }


@app.get("/cycle-demo")
def cycle_demo(n: int):
    if not 3 <= n <= 8:
        return JSONResponse(
            status_code=400,
            content={"error": "SchemaError", "detail": f"n={n} outside 3..8"},
        )
    return demos.cycle_demo(n)


@app.get("/spectral-demo")
def spectral_demo():
    return demos.spectral_demo()
