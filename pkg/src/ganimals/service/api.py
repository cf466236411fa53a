"""HTTP surface over the service engine.

Thin translation layer only: pydantic bodies in, JSON payloads out, domain
errors mapped to status codes. All behavior lives in ``Service``.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..errors import (
    BackendUnavailable,
    EmptyRecord,
    GanimalsError,
    IdenticalParents,
    InsufficientData,
    NotInWorld,
    RatingOutOfRange,
    RenderRejected,
    UnknownFeature,
    UnknownGanimal,
    UnknownMetric,
    ValidationError,
    WrongGeneration,
)
from .state import Service

_STATUS_BY_ERROR = (
    (UnknownGanimal, 404),
    (NotInWorld, 403),
    (IdenticalParents, 409),
    (WrongGeneration, 422),
    (InsufficientData, 409),
    (BackendUnavailable, 503),
    (RenderRejected, 502),
    (EmptyRecord, 400),
    (RatingOutOfRange, 400),
    (UnknownMetric, 400),
    (UnknownFeature, 400),
    (ValidationError, 400),
)


def _status_for(exc: GanimalsError) -> int:
    for err_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, err_type):
            return status
    return 400


class AssignBody(BaseModel):
    user_id: str


class DiscoverBody(BaseModel):
    user_id: str


class FeedBody(BaseModel):
    user_id: str
    ganimal_id: str


class BreedBody(BaseModel):
    user_id: str
    parent_a: str
    parent_b: str
    name: str | None = None


class AnnotateBody(BaseModel):
    user_id: str
    ganimal_id: str
    morphology: dict[str, bool] | None = None
    ratings: dict[str, int] | None = None


class TickBody(BaseModel):
    world_id: str | None = None


def create_app(service: Service) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        stop = threading.Event()
        ticker = None
        if service.config.tick_seconds > 0:

            def run():
                while not stop.wait(service.config.tick_seconds):
                    service.tick_worlds()

            ticker = threading.Thread(target=run, daemon=True)
            ticker.start()
        yield
        stop.set()
        if ticker is not None:
            ticker.join(timeout=2.0)
        service.close()

    app = FastAPI(title="ganimals", lifespan=lifespan)
    app.state.service = service

    @app.exception_handler(GanimalsError)
    async def domain_error(request: Request, exc: GanimalsError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "worlds": len(service.worlds)}

    @app.post("/api/assign")
    def api_assign(body: AssignBody):
        return service.assign(body.user_id)

    @app.post("/api/discover")
    def api_discover(body: DiscoverBody):
        return service.discover(body.user_id)

    @app.post("/api/feed")
    def api_feed(body: FeedBody):
        try:
            return service.feed_ganimal(body.user_id, body.ganimal_id)
        except NotInWorld as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/api/breed")
    def api_breed(body: BreedBody):
        return service.breed(body.user_id, body.parent_a, body.parent_b, body.name)

    @app.post("/api/annotate")
    def api_annotate(body: AnnotateBody):
        return service.annotate(
            body.user_id, body.ganimal_id, morphology=body.morphology, ratings=body.ratings
        )

    @app.post("/api/tick")
    def api_tick(body: TickBody | None = None):
        world_id = body.world_id if body is not None else None
        return service.tick_worlds(world_id)

    @app.get("/api/world/{user_id}")
    def api_world(user_id: str):
        return service.world_view(user_id)

    @app.get("/api/leaderboard")
    def api_leaderboard(user_id: str, characteristic: str):
        return service.leaderboard_view(user_id, characteristic)

    @app.get("/api/stats")
    def api_stats(metric: str, predicate: str):
        return service.stats(metric, predicate).to_dict()

    @app.get("/g/{ganimal_id}")
    def permalink(ganimal_id: str):
        return service.get_ganimal(ganimal_id)

    @app.get("/images/{digest}.png")
    def image(digest: str):
        data = service.image_bytes(digest)
        return Response(content=data, media_type="image/png")

    return app
