"""HTTP service exposing the level-curve operations.

All endpoints are stateless JSON-in/JSON-out wrappers over the core package;
randomized operations take explicit seeds so responses are reproducible.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from fastapi import FastAPI, HTTPException, Response

from . import bocher as bocher_mod
from . import schemas as S
from .configuration import (
    canonical_code,
    config_from_json,
    config_to_json,
    critical_values_of,
    scatter_perturb,
    sorted_value_vector,
    validate,
)
from .enumeration import count_generic, enumerate_generic
from .extraction import ExtractionError, extract_configuration
from .polynomials import ComplexPoly, atypicality_degree, eval_poly
from .realization import RealizationError, equivalent, realize
from .render import RenderOptions, render_svg, trace_level_set
from .tracer import Tract, TracingError, critical_level_curves

app = FastAPI(title="levelcurves", version="0.1.0")


def _poly(coeffs) -> ComplexPoly:
    try:
        return ComplexPoly.from_json(coeffs)
    except (ValueError, TypeError) as exc:
        raise HTTPException(422, f"invalid polynomial: {exc}")


def _tract(p: ComplexPoly, normalize: bool) -> Tract:
    try:
        return Tract.normalized(p) if normalize else Tract.from_poly(p)
    except ValueError as exc:
        raise HTTPException(422, str(exc))


def _config(data):
    try:
        cfg = config_from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise HTTPException(422, f"invalid configuration: {exc}")
    problems = validate(cfg)
    if problems:
        raise HTTPException(422, "invalid configuration: " + "; ".join(problems))
    return cfg


def _pairs(values):
    return [[v.real, v.imag] for v in values]


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/count", response_model=S.CountResponse)
def count(req: S.CountRequest):
    return S.CountResponse(n=req.n, count=count_generic(req.n))


def _random_generic_values(n, seed):
    rng = np.random.default_rng(seed)
    while True:
        mods = np.sort(rng.uniform(0.1, 0.9, n - 1))
        gaps = np.diff(mods, prepend=0.0)
        if np.min(gaps) < 0.3 / n:
            continue
        args = rng.uniform(0.0, 2 * math.pi, n - 1)
        return [m * cmath.exp(1j * a) for m, a in zip(mods, args)]


@app.post("/enumerate", response_model=S.EnumerateResponse)
def enumerate_(req: S.EnumerateRequest):
    if req.values is not None:
        values = [complex(re, im) for re, im in req.values]
        n = len(values) + 1
    elif req.n is not None:
        n = req.n
        values = _random_generic_values(n, req.seed)
    else:
        raise HTTPException(422, "provide either n or an explicit value vector")
    try:
        configs = enumerate_generic(values)
    except ValueError as exc:
        raise HTTPException(422, str(exc))
    return S.EnumerateResponse(
        n=n,
        count=len(configs),
        values=_pairs(values),
        configurations=[config_to_json(c) for c in configs],
    )


@app.post("/extract", response_model=S.ExtractResponse)
def extract(req: S.ExtractRequest):
    tract = _tract(_poly(req.coeffs), req.normalize)
    try:
        cfg = extract_configuration(tract)
    except (TracingError, ExtractionError) as exc:
        raise HTTPException(500, f"extraction failed: {exc}")
    return S.ExtractResponse(
        configuration=config_to_json(cfg),
        scale_applied=tract.scale_applied,
        canonical_code=canonical_code(cfg).hex(),
        critical_values=_pairs(critical_values_of(cfg)),
    )


@app.post("/realize", response_model=S.RealizeResponse)
def realize_(req: S.RealizeRequest):
    cfg = _config(req.configuration)
    try:
        result = realize(cfg, n_starts=req.n_starts, seed=req.seed, tol=req.tol)
    except RealizationError as exc:
        raise HTTPException(500, f"realization failed: {exc}")
    except ValueError as exc:
        raise HTTPException(422, str(exc))
    return S.RealizeResponse(
        coeffs=result.poly.to_json(),
        verified=True,
        candidates_tried=result.candidates_tried,
        critical_values=_pairs(sorted_value_vector(cfg)),
    )


@app.post("/perturb", response_model=S.PerturbResponse)
def perturb(req: S.PerturbRequest):
    cfg = _config(req.configuration)
    before = sorted_value_vector(cfg)
    deg_before = atypicality_degree(before)
    try:
        out = scatter_perturb(cfg, req.nu)
    except ValueError as exc:
        raise HTTPException(422, str(exc))
    after = sorted_value_vector(out)
    shift = max(
        (abs(a - b) for a, b in zip(before, after)), default=0.0
    )
    return S.PerturbResponse(
        configuration=config_to_json(out),
        degree_before=deg_before,
        degree_after=atypicality_degree(after),
        value_shift=shift,
    )


@app.post("/equiv", response_model=S.EquivResponse)
def equiv(req: S.EquivRequest):
    ta = _tract(_poly(req.poly_a), req.normalize)
    tb = _tract(_poly(req.poly_b), req.normalize)
    try:
        ca = extract_configuration(ta)
        cb = extract_configuration(tb)
    except (TracingError, ExtractionError) as exc:
        raise HTTPException(500, f"extraction failed: {exc}")
    code_a, code_b = canonical_code(ca), canonical_code(cb)
    return S.EquivResponse(
        equivalent=code_a == code_b, code_a=code_a.hex(), code_b=code_b.hex()
    )


@app.post("/trace", response_model=S.TraceResponse)
def trace(req: S.TraceRequest):
    tract = _tract(_poly(req.coeffs), req.normalize)
    curves = []

    def payload(points, level, kind):
        vals = [eval_poly(tract.poly, z) for z in points]
        return S.CurvePayload(
            level=level,
            kind=kind,
            points=[[z.real, z.imag] for z in points],
            args=[cmath.phase(v) for v in vals],
            moduli=[abs(v) for v in vals],
        )

    try:
        for g in critical_level_curves(tract):
            for e in g.edges:
                curves.append(payload(e.points, g.level, "critical"))
        for eps in req.levels or []:
            for chain in trace_level_set(tract, eps):
                curves.append(payload(chain, eps, "level"))
    except TracingError as exc:
        raise HTTPException(500, f"tracing failed: {exc}")
    return S.TraceResponse(scale_applied=tract.scale_applied, curves=curves)


@app.post("/render")
def render(req: S.RenderRequest):
    tract = _tract(_poly(req.coeffs), req.normalize)
    try:
        svg = render_svg(
            tract,
            req.levels,
            RenderOptions(width=req.width, show_gradients=req.show_gradients),
        )
    except (TracingError, ValueError) as exc:
        raise HTTPException(500, f"rendering failed: {exc}")
    return Response(content=svg, media_type="image/svg+xml")


@app.post("/check-bocher", response_model=S.BocherResponse)
def check_bocher_(req: S.BocherRequest):
    rng = np.random.default_rng(req.seed)
    failures = 0
    for _ in range(req.instances):
        n = int(rng.integers(1, req.max_degree + 1))
        c1 = complex(*rng.uniform(-3, 3, 2))
        r1 = float(rng.uniform(0.5, 1.5))
        while True:
            c2 = complex(*rng.uniform(-3, 3, 2))
            r2 = float(rng.uniform(0.5, 1.5))
            if abs(c1 - c2) > r1 + r2 + 0.2:
                break
        zeros = [c1 + r1 * z for z in _unit_disk_points(rng, n)]
        poles = [c2 + r2 * z for z in _unit_disk_points(rng, n)]
        ok, _ = bocher_mod.check_bocher(
            zeros, poles, bocher_mod.Disk(c1, r1), bocher_mod.Disk(c2, r2)
        )
        failures += not ok
    hull_failures = 0
    for _ in range(req.instances):
        n = int(rng.integers(2, req.max_degree + 1))
        zeros = [complex(*rng.uniform(-2, 2, 2)) for _ in range(n)]
        crit = bocher_mod.rational_critical_points(zeros, [])
        for w in crit:
            if not bocher_mod.convex_hull_contains(zeros, w, 1e-9):
                hull_failures += 1
                break
    return S.BocherResponse(
        instances=req.instances,
        failures=failures,
        hull_instances=req.instances,
        hull_failures=hull_failures,
    )


def _unit_disk_points(rng, n):
    out = []
    while len(out) < n:
        z = complex(*rng.uniform(-1, 1, 2))
        if abs(z) <= 1.0:
            out.append(z)
    return out
