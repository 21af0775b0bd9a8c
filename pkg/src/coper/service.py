"""HTTP service exposing search, document lookup, and corpus stats.

Score fields are serialized with exactly six decimal places so clients
(the browser UI included) can render scores without floating-point
drift: the JSON bytes are the display format. Requests that do not parse
against the schema get 400; a syntactically valid omega outside [0, 1]
gets 422; lookups of unknown documents get 404; every data endpoint
returns 503 until an engine is loaded.
"""

from __future__ import annotations

import json
import logging
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import EngineConfig
from .engine import Engine, load_engine
from .errors import CoperError, UnknownDocumentError

logger = logging.getLogger(__name__)

SNIPPET_CHARS = 160


def render_json(obj: Any) -> str:
    """JSON text with every float printed as exactly six decimals."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return f"{obj:.6f}"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(render_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        parts = []
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            parts.append(json.dumps(key, ensure_ascii=False) + ":" + render_json(value))
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def fixed_json(obj: Any, status_code: int = 200) -> Response:
    return Response(
        content=render_json(obj),
        status_code=status_code,
        media_type="application/json",
    )


def make_snippet(body: str, limit: int = SNIPPET_CHARS) -> str:
    """Lead of the body, cut at a word boundary."""
    if len(body) <= limit:
        return body
    cut = body.rfind(" ", 0, limit + 1)
    if cut <= 0:
        cut = limit
    return body[:cut].rstrip() + "…"


class SearchRequest(BaseModel):
    query: str
    k: int | None = None
    omega: float | None = None


def create_app(
    config: EngineConfig | None = None,
    engine: Engine | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """Assemble the application.

    With an engine given it is used as-is; otherwise one is loaded from
    the configuration's data directory at startup. A failed load leaves
    the service up but answering 503 on data endpoints, so deploys
    surface a clear error rather than crash-looping.
    """

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if app.state.engine is None and config is not None:
            try:
                app.state.engine = load_engine(config)
            except (CoperError, OSError) as exc:
                logger.warning("engine not loaded: %s", exc)
        yield

    app = FastAPI(title="coper", lifespan=lifespan)
    app.state.engine = engine
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def need_engine() -> Engine | Response:
        loaded = app.state.engine
        if loaded is None:
            return JSONResponse(
                status_code=503,
                content={"detail": "engine not loaded; ingest and build first"},
            )
        return loaded

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.post("/api/search")
    async def api_search(request: SearchRequest) -> Response:
        loaded = need_engine()
        if isinstance(loaded, Response):
            return loaded
        if request.omega is not None and not 0.0 <= request.omega <= 1.0:
            return JSONResponse(
                status_code=422,
                content={"detail": f"omega must be within [0, 1], got {request.omega}"},
            )
        if request.k is not None and request.k < 1:
            return JSONResponse(
                status_code=422,
                content={"detail": f"k must be >= 1, got {request.k}"},
            )
        results = loaded.search(request.query, k=request.k, omega=request.omega)
        if results:
            omega = results[0].omega
        elif request.omega is not None:
            omega = request.omega
        else:
            omega = loaded.analyze_query(request.query).omega
        payload = {
            "omega": omega,
            "results": [
                {
                    "doc_id": r.doc_id,
                    "title": loaded.doc(r.doc_id).title,
                    "rank": r.rank,
                    "jss": r.jss,
                    "bm25": r.bm25,
                    "tfidf_sim": r.tfidf_sim,
                    "sem_sim": r.sem_sim,
                    "snippet": make_snippet(loaded.doc(r.doc_id).body),
                }
                for r in results
            ],
        }
        return fixed_json(payload)

    @app.get("/api/doc/{doc_id}")
    async def api_doc(doc_id: str) -> Response:
        loaded = need_engine()
        if isinstance(loaded, Response):
            return loaded
        try:
            doc = loaded.doc(doc_id)
        except UnknownDocumentError:
            return JSONResponse(
                status_code=404, content={"detail": f"unknown document: {doc_id}"}
            )
        return fixed_json(
            {
                "doc_id": doc.id,
                "title": doc.title,
                "body": doc.body,
                "url": doc.url,
                "published_at": doc.published_at,
                "noun_phrases": loaded.doc_phrases(doc.id),
            }
        )

    @app.get("/api/stats")
    async def api_stats() -> Response:
        loaded = need_engine()
        if isinstance(loaded, Response):
            return loaded
        return fixed_json(loaded.stats().to_dict())

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
