"""HTTP face of the worker: POST /render and GET /healthz.

Success returns raw PNG bytes; every rejection is a JSON object with an
"error" field. A worker whose model failed to load stays up and answers
503 on both routes.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .model import DEFAULT_MODEL, RequestError, WorkerModel


def create_app(model: WorkerModel | None = None,
               model_name: str = DEFAULT_MODEL) -> FastAPI:
    """Build the app, loading the named model unless one is injected.

    A load failure is remembered rather than raised so the process can
    still report its state over HTTP.
    """
    load_error = None
    if model is None:
        try:
            model = WorkerModel(model_name)
        except Exception as exc:
            load_error = str(exc)

    app = FastAPI(title="gan-worker")
    app.state.model = model

    @app.get("/healthz")
    def healthz():
        if model is None:
            return JSONResponse(
                {"status": "unavailable", "error": load_error}, status_code=503
            )
        return {
            "status": "ok",
            "model": model.name,
            "native_resolution": model.native_resolution,
            "max_resolution": model.max_resolution,
            "classes": model.n_classes,
            "latent_dim": model.latent_dim,
        }

    @app.post("/render")
    async def render(request: Request):
        if model is None:
            return JSONResponse({"error": "model not loaded"}, status_code=503)
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "body must be JSON"}, status_code=422)
        try:
            png = model.render(body)
        except RequestError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        return Response(content=png, media_type="image/png")

    return app
