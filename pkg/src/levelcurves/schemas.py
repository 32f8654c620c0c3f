"""Request and response models for the level-curve service.

Polynomials travel as arrays of [re, im] coefficient pairs in ascending
degree; configurations travel as the recursive node schema produced by
``configuration.config_to_json``.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field

CoeffList = list[list[float]]       # [[re, im], ...]


class PolyPayload(BaseModel):
    coeffs: CoeffList


class CountRequest(BaseModel):
    n: int = Field(ge=2)


class CountResponse(BaseModel):
    n: int
    count: int


class EnumerateRequest(BaseModel):
    n: Optional[int] = Field(default=None, ge=2)
    values: Optional[CoeffList] = None
    seed: int = 0


class EnumerateResponse(BaseModel):
    n: int
    count: int
    values: CoeffList
    configurations: list[Any]


class ExtractRequest(BaseModel):
    coeffs: CoeffList
    normalize: bool = True
    tol: float = 1e-12


class ExtractResponse(BaseModel):
    configuration: Any
    scale_applied: float
    canonical_code: str
    critical_values: CoeffList


class RealizeRequest(BaseModel):
    configuration: Any
    seed: int = 0
    n_starts: int = 400
    tol: float = 1e-12


class RealizeResponse(BaseModel):
    coeffs: CoeffList
    verified: bool
    candidates_tried: int
    critical_values: CoeffList


class PerturbRequest(BaseModel):
    configuration: Any
    nu: float = Field(gt=0)


class PerturbResponse(BaseModel):
    configuration: Any
    degree_before: int
    degree_after: int
    value_shift: float


class EquivRequest(BaseModel):
    poly_a: CoeffList
    poly_b: CoeffList
    normalize: bool = True


class EquivResponse(BaseModel):
    equivalent: bool
    code_a: str
    code_b: str


class TraceRequest(BaseModel):
    coeffs: CoeffList
    levels: Optional[list[float]] = None
    normalize: bool = True


class CurvePayload(BaseModel):
    level: float
    kind: str                        # "critical" | "level"
    points: CoeffList
    args: list[float]
    moduli: list[float]


class TraceResponse(BaseModel):
    scale_applied: float
    curves: list[CurvePayload]


class RenderRequest(BaseModel):
    coeffs: CoeffList
    levels: list[float]
    normalize: bool = True
    show_gradients: bool = False
    width: int = 640


class BocherRequest(BaseModel):
    instances: int = 200
    seed: int = 0
    max_degree: int = 6


class BocherResponse(BaseModel):
    instances: int
    failures: int
    hull_instances: int
    hull_failures: int
