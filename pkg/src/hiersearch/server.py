"""HTTP adapter for the session service."""

from __future__ import annotations

import errno
import socket
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import BadParameter, HierSearchError
from .service import SessionService


class HierarchyBody(BaseModel):
    edges: str
    id: str | None = None
    weights: dict[str, float] | None = None
    costs: dict[str, float] | None = None


class SessionBody(BaseModel):
    hierarchy_id: str
    policy: str = "greedy_tree"
    mode: str = "offline"
    object_ref: str = ""


class AnswerBody(BaseModel):
    ordinal: int
    answer: bool | str


_STATUS_BY_CODE = {
    "unknown_hierarchy": 404,
    "unknown_session": 404,
    "unknown_node": 400,
    "ordinal_mismatch": 409,
    "session_closed": 409,
    "already_resolved": 409,
}


def _parse_answer(raw) -> bool:
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, str):
        low = raw.strip().lower()
        if low in ("yes", "y", "true", "1"):
            return True
        if low in ("no", "n", "false", "0"):
            return False
    raise BadParameter(f"answer must be yes or no, got {raw!r}")


def create_app(service: SessionService) -> FastAPI:
    @asynccontextmanager
    async def _lifespan(app: FastAPI):
        yield
        service.close()

    app = FastAPI(title="hiersearch", docs_url=None, redoc_url=None,
                  lifespan=_lifespan)
    app.state.service = service
    # The labeling UI is served as static files from another origin.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(HierSearchError)
    async def _domain_error(request: Request, exc: HierSearchError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status,
                            content={"code": exc.code, "message": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/hierarchies", status_code=201)
    def add_hierarchy(body: HierarchyBody):
        return service.add_hierarchy(body.edges, hierarchy_id=body.id,
                                     weights=body.weights, costs=body.costs)

    @app.get("/hierarchies/{hierarchy_id}/stats")
    def hierarchy_stats(hierarchy_id: str):
        return service.hierarchy_stats(hierarchy_id)

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionBody):
        return service.create_session(body.hierarchy_id, policy=body.policy,
                                      mode=body.mode, object_ref=body.object_ref)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return service.get_session(session_id)

    @app.post("/sessions/{session_id}/answers")
    def post_answer(session_id: str, body: AnswerBody):
        return service.post_answer(session_id, body.ordinal,
                                   _parse_answer(body.answer))

    return app


def run_server(service: SessionService, host: str = "127.0.0.1",
               port: int = 8000) -> None:
    """Serve until interrupted; raises BadParameter when the port is taken.

    The socket is bound here rather than inside uvicorn, which would
    swallow a bind failure and exit with its own status code.
    """
    import uvicorn

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        if exc.errno == errno.EADDRINUSE:
            raise BadParameter(f"port {port} is already in use") from exc
        raise

    app = create_app(service)
    config = uvicorn.Config(app, host=host, port=port, log_level="warning")
    server = uvicorn.Server(config)
    try:
        server.run(sockets=[sock])
    finally:
        sock.close()
