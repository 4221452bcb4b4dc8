"""HTTP facade over the design, concordance, and simulation operations.

Stateless JSON-in/JSON-out endpoints under /api/v1 returning exactly the
library's numbers; every non-2xx response body is a single error object
with code, message, and an optional offending field.  The built web
calculator, when present, is served as static files under /.
"""

from __future__ import annotations

import argparse
import os
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import io
from .concordance import mcnemar_test
from .design import LegacyTrial, design_report
from .errors import BridgeError, ValidationError
from .simulator import simulate_with_trace

__all__ = ["create_app", "main"]

# Larger simulation requests belong to the CLI; the service stays synchronous.
MAX_SERVICE_REPLICATES = 2000

SWEEPABLE_FIELDS = ("cr12", "cr21", "completion", "unit_cost",
                    "p_c1", "p_c0", "p_d1", "p_d0")


def _api_error(status: int, code: str, message: str, field: Optional[str] = None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "field": field})


def _canonical(document) -> Response:
    # Number formatting must match the file serializations byte for byte.
    return Response(content=io.canonical_json(document), media_type="application/json")


async def _json_body(request: Request) -> Any:
    try:
        return await request.json()
    except Exception:
        raise ValidationError("request body is not valid JSON") from None


def _apply_sweep_value(spec, field: str, value: float):
    if field in ("cr12", "cr21", "unit_cost"):
        return replace(spec, **{field: value})
    if field == "completion":
        if spec.legacy is None:
            raise ValidationError("cannot sweep completion without a legacy trial",
                                  field="sweep")
        return replace(spec, legacy=LegacyTrial(n1=spec.legacy.n1, k1=spec.legacy.k1,
                                                completion=value))
    if field in ("p_c1", "p_c0", "p_d1", "p_d0"):
        return replace(spec, rates=replace(spec.rates, **{field: value}))
    raise ValidationError(f"unsupported sweep field {field!r}", field="sweep")


def create_app(webui_dir: Optional[str | Path] = None) -> FastAPI:
    app = FastAPI(title="bridge-trials", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    @app.exception_handler(ValidationError)
    async def _validation_handler(request: Request, exc: ValidationError):
        message = str(exc)
        status = 422 if "effect equals margin" in message else 400
        return _api_error(status, "validation_error", message, getattr(exc, "field", None))

    @app.exception_handler(BridgeError)
    async def _bridge_handler(request: Request, exc: BridgeError):
        return _api_error(400, "bad_request", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _request_handler(request: Request, exc: RequestValidationError):
        return _api_error(400, "bad_request", "malformed request")

    @app.exception_handler(StarletteHTTPException)
    async def _http_handler(request: Request, exc: StarletteHTTPException):
        codes = {404: "not_found", 405: "method_not_allowed"}
        return _api_error(exc.status_code, codes.get(exc.status_code, "error"),
                          str(exc.detail))

    @app.get("/api/v1/health")
    async def health():
        return {"status": "ok", "schema_version": io.SCHEMA_VERSION}

    @app.post("/api/v1/design")
    async def design(request: Request):
        spec = io.design_spec_from_dict(await _json_body(request))
        result = design_report(spec)
        return _canonical(io.to_document(result))

    @app.post("/api/v1/design/sensitivity")
    async def design_sensitivity(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or "sweep" not in body:
            raise ValidationError("body must contain 'spec' and 'sweep'", field="sweep")
        sweep = body["sweep"]
        if not isinstance(sweep, dict):
            raise ValidationError("sweep must be an object", field="sweep")
        field = sweep.get("field")
        values = sweep.get("values")
        if field not in SWEEPABLE_FIELDS:
            raise ValidationError(
                f"sweep field must be one of {SWEEPABLE_FIELDS}, got {field!r}",
                field="sweep")
        if not isinstance(values, list) or not values:
            raise ValidationError("sweep values must be a non-empty array", field="sweep")
        spec = io.design_spec_from_dict(body.get("spec"))
        points = []
        for value in values:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"sweep value {value!r} is not a number",
                                      field="sweep")
            result = design_report(_apply_sweep_value(spec, field, float(value)))
            points.append({"value": value, "n2": result.n2, "n2_prime": result.n2_prime,
                           "savings": result.savings})
        return _canonical(points)

    @app.post("/api/v1/concordance")
    async def concordance_counts(request: Request):
        # Aggregate-level only: the service never receives patient rows.
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise ValidationError("body must be an object")
        cells = {}
        for name in ("n11", "n10", "n01", "n00"):
            value = body.get(name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValidationError(f"{name} must be a non-negative integer", field=name)
            cells[name] = value
        r2 = cells["n11"] + cells["n01"]
        r1 = cells["n11"] + cells["n10"]
        statistic, p = mcnemar_test(cells["n10"], cells["n01"],
                                    body.get("mcnemar_mode", "auto"))
        return _canonical({
            "schema_version": io.SCHEMA_VERSION,
            "cr12": cells["n11"] / r2 if r2 else None,
            "cr21": cells["n11"] / r1 if r1 else None,
            "mcnemar_statistic": statistic,
            "mcnemar_p": p,
        })

    @app.post("/api/v1/simulate")
    async def simulate(request: Request):
        scenario = io.scenario_from_dict(await _json_body(request))
        if scenario.replicates > MAX_SERVICE_REPLICATES:
            raise ValidationError(
                f"service requests are capped at {MAX_SERVICE_REPLICATES} replicates; "
                "use the CLI for larger studies", field="replicates")
        oc, _ = simulate_with_trace(scenario)
        return _canonical(io.to_document(oc))

    static_dir = _resolve_webui_dir(webui_dir)
    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webui")
    return app


def _resolve_webui_dir(explicit: Optional[str | Path]) -> Optional[Path]:
    candidates = []
    if explicit:
        candidates.append(Path(explicit))
    env = os.environ.get("BRIDGE_WEBUI_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    for path in candidates:
        if path.is_dir():
            return path
    return None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bridge-server",
                                     description="Serve the design calculator API and web UI.")
    parser.add_argument("--host", default=os.environ.get("BRIDGE_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int,
                        default=int(os.environ.get("BRIDGE_PORT", "8000")))
    parser.add_argument("--webui", help="directory of built web UI assets")
    args = parser.parse_args(argv)

    import uvicorn

    uvicorn.run(create_app(webui_dir=args.webui), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    import sys

    sys.exit(main())
