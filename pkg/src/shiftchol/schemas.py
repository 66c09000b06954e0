"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class ToleranceOverrides(BaseModel):
    zero_tol: Optional[float] = Field(default=None, gt=0)
    psd_tol: Optional[float] = Field(default=None, gt=0)
    inv_tol: Optional[float] = Field(default=None, gt=0)


class GraphDoc(BaseModel):
    vertices: int
    edges: list[tuple[int, int]]


class ArcDoc(BaseModel):
    from_: int = Field(alias="from")
    to: int

    model_config = {"populate_by_name": True}


class NetworkDoc(BaseModel):
    vertices: int
    arcs: list[ArcDoc]
    discount: float

    def to_plain(self) -> dict:
        return {
            "vertices": self.vertices,
            "arcs": [{"from": a.from_, "to": a.to} for a in self.arcs],
            "discount": self.discount,
        }


class FactorRequest(BaseModel):
    # either a raw operator-matrix document or a generator spec
    matrix: dict
    check: bool = False
    tolerances: ToleranceOverrides = ToleranceOverrides()


class LqrRequest(BaseModel):
    network: NetworkDoc
    oracle: bool = False
    tolerances: ToleranceOverrides = ToleranceOverrides()


class ChordalRequest(BaseModel):
    graph: GraphDoc


class ErrorBody(BaseModel):
    error: str
    detail: str


class ChordalResponse(BaseModel):
    is_tree: bool
    has_cycle_geq_4: bool
    edge_graph_chordal: bool
    biconditional_holds: bool


class CycleDemoRequest(BaseModel):
    n: int = Field(ge=3, le=8)
