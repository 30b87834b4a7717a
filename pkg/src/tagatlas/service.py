"""HTTP service over a loaded hashtag atlas.

The atlas is read once at startup and never mutated, so every handler is a
pure read and safe under any concurrency. Endpoints deliberately parse
their own query parameters: the contract wants plain 400s with an error
body, not framework validation errors.
"""
from __future__ import annotations

from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .atlas import HashtagAtlas, load_atlas
from .errors import UnknownHashtag
from .knn import top_k

DEFAULT_K = 100
MAX_K = 1000
STATIC_DIR = Path(__file__).parent / "static"


@dataclass(frozen=True)
class ServiceConfig:
    atlas_path: str | Path
    host: str = "127.0.0.1"
    port: int = 8765
    default_k: int = DEFAULT_K
    max_k: int = MAX_K

    def __post_init__(self):
        if not 1 <= self.default_k <= self.max_k:
            raise ValueError("need 1 <= default_k <= max_k")


class NeighborOut(BaseModel):
    tag: str
    similarity: float
    x: float
    y: float


class NeighborsOut(BaseModel):
    query: str
    x: float
    y: float
    neighbors: list[NeighborOut]


class HealthOut(BaseModel):
    status: str
    n: int
    dim: int


def create_app(config: ServiceConfig, static_dir: str | Path | None = None,
               atlas: HashtagAtlas | None = None) -> FastAPI:
    preloaded = atlas

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.atlas = preloaded if preloaded is not None else load_atlas(config.atlas_path)
        yield

    app = FastAPI(title="hashtag atlas", lifespan=lifespan,
                  docs_url=None, redoc_url=None, openapi_url=None)
    app.state.atlas = None
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["GET"], allow_headers=["*"])

    # sync handlers on purpose: they run in the threadpool and the similarity
    # kernel releases the GIL, so concurrent queries overlap on multicore
    @app.get("/api/health")
    def health() -> JSONResponse:
        atlas = app.state.atlas
        if atlas is None:
            return JSONResponse({"status": "loading"}, status_code=503)
        body = HealthOut(status="ok", n=len(atlas), dim=atlas.dim)
        return JSONResponse(body.model_dump())

    @app.get("/api/neighbors")
    def neighbors(request: Request) -> JSONResponse:
        atlas = app.state.atlas
        if atlas is None:
            return JSONResponse({"status": "loading"}, status_code=503)
        params = request.query_params
        tag = params.get("tag")
        if not tag:
            return JSONResponse({"error": "missing required parameter: tag"},
                                status_code=400)
        raw_k = params.get("k")
        if raw_k is None:
            k = config.default_k
        else:
            try:
                k = int(raw_k)
            except ValueError:
                return JSONResponse({"error": f"k must be an integer, got {raw_k!r}"},
                                    status_code=400)
            if k < 1:
                return JSONResponse({"error": "k must be >= 1"}, status_code=400)
            k = min(k, config.max_k)
        try:
            res = top_k(atlas, tag, k)
        except UnknownHashtag:
            return JSONResponse({"error": "unknown-hashtag"}, status_code=404)
        body = NeighborsOut(
            query=res.query, x=res.query_point[0], y=res.query_point[1],
            neighbors=[NeighborOut(tag=nb.tag, similarity=round(nb.similarity, 6),
                                   x=nb.x, y=nb.y) for nb in res.neighbors])
        return JSONResponse(body.model_dump())

    sdir = Path(static_dir) if static_dir is not None else STATIC_DIR
    if sdir.is_dir():
        app.mount("/", StaticFiles(directory=sdir, html=True), name="ui")
    return app


def run_service(config: ServiceConfig, static_dir: str | Path | None = None,
                atlas: HashtagAtlas | None = None) -> None:
    """Blocks until shutdown. The atlas loads in startup, before the
    listener accepts traffic."""
    import uvicorn

    app = create_app(config, static_dir, atlas)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
