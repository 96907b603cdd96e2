"""HTTP prediction service: /health, /baseline, /predict, /whatif.

One immutable checkpoint per process; requests share the loaded model
read-only.  Malformed bodies return 400 with the offending field path,
out-of-envelope inputs 422, numeric failures 500.  Schemas are documented
in api.md.
"""

import base64

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .. import __version__
from ..errors import NumericError
from ..oracle.geometry import N_PLANES, N_ROWS
from ..errors import OutOfEnvelopeError
from .predictor import Predictor


class BuildBody(BaseModel):
    clearance: list[float] = Field(min_length=N_ROWS, max_length=N_ROWS)
    roughness: list[float] = Field(min_length=N_ROWS, max_length=N_ROWS)


class PredictRequest(BuildBody):
    include_profiles: bool = False
    include_contours: bool = False
    planes: list[int] = Field(default_factory=list)


class WhatIfVariant(BuildBody):
    name: str = ""


class WhatIfRequest(BaseModel):
    base: BuildBody
    variants: list[WhatIfVariant]


def _overall_payload(breakdown):
    return {
        "mdot": breakdown.mdot,
        "pr": breakdown.pr,
        "eta_p": breakdown.eta_p,
        "deltas": {k: breakdown.deltas[k]
                   for k in ("mdot_pct", "pr_pct", "eta_p_pts")},
    }


def _stages_payload(breakdown):
    return [{
        "stage": s.stage, "pr": s.pr, "eta_p": s.eta_p,
        "delta_pr_pct": breakdown.deltas["stage_pr_pct"][i],
        "delta_eta_p_pts": breakdown.deltas["stage_eta_p_pts"][i],
    } for i, s in enumerate(breakdown.stages)]


def create_app(checkpoint_path=None, predictor=None):
    predictor = predictor or Predictor(checkpoint_path)
    app = FastAPI(title="compressor build advisor", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc):
        errors = [{"field": ".".join(str(p) for p in e["loc"]),
                   "message": e["msg"]} for e in exc.errors()]
        return JSONResponse(status_code=400,
                            content={"detail": "malformed request body",
                                     "errors": errors})

    @app.exception_handler(OutOfEnvelopeError)
    async def out_of_envelope(request: Request, exc):
        return JSONResponse(status_code=422,
                            content={"detail": str(exc), "field": exc.field,
                                     "row": exc.row, "value": exc.value})

    @app.exception_handler(NumericError)
    async def numeric_failure(request: Request, exc):
        return JSONResponse(status_code=500,
                            content={"detail": f"numeric failure: {exc}"})

    @app.get("/health")
    def health():
        return {"status": "ok", "model_id": predictor.model_id,
                "version": __version__,
                "grid": list(predictor.arch.grid),
                "n_planes": N_PLANES}

    @app.get("/baseline")
    def baseline():
        b = predictor.baseline
        return {"model_id": predictor.model_id,
                "build": {"clearance": predictor.design.clearance.tolist(),
                          "roughness": predictor.design.roughness.tolist()},
                "overall": _overall_payload(b),
                "stages": _stages_payload(b)}

    @app.post("/predict")
    def predict(req: PredictRequest):
        field, breakdown, latency = predictor.predict(req.clearance,
                                                      req.roughness)
        planes = [p for p in req.planes if 0 <= p < N_PLANES]
        resp = {"model_id": predictor.model_id,
                "latency_ms": 1000.0 * latency,
                "overall": _overall_payload(breakdown),
                "stages": _stages_payload(breakdown)}
        if req.include_profiles:
            resp["profiles"] = {
                "span_pct": (100 * predictor.grid.span_fractions).tolist(),
                "planes": predictor.radial_profiles(
                    field, planes or range(N_PLANES)),
            }
        if req.include_contours:
            resp["contours"] = [
                {**{k: s[k] for k in ("plane", "variable", "shape", "dtype")},
                 "data_b64": base64.b64encode(s["data"].tobytes()).decode()}
                for s in predictor.contour_slices(field, planes)]
        return resp

    @app.post("/whatif")
    def whatif(req: WhatIfRequest):
        _, base_bd, _ = predictor.predict(req.base.clearance,
                                          req.base.roughness)
        rows = []
        for i, variant in enumerate(req.variants):
            _, bd, _ = predictor.predict(variant.clearance, variant.roughness)
            rows.append({
                "name": variant.name or f"variant-{i}",
                "eta_p": bd.eta_p, "mdot": bd.mdot, "pr": bd.pr,
                "delta_eta_p_pts": 100.0 * (bd.eta_p - base_bd.eta_p),
                "delta_mdot_pct": 100.0 * (bd.mdot / base_bd.mdot - 1.0),
                "delta_pr_pct": 100.0 * (bd.pr / base_bd.pr - 1.0),
            })
        rows.sort(key=lambda r: r["delta_eta_p_pts"], reverse=True)
        return {"model_id": predictor.model_id,
                "base": _overall_payload(base_bd), "variants": rows}

    return app
