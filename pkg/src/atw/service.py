"""FastAPI service exposing the warping engine over HTTP.

Every endpoint operates on server-local paths and mirrors one CLI subcommand;
the CLI posts the exact same request models when pointed at a server.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__, jobs
from .errors import AtwError, IoFailure
from .schemas import (
    AnimateRequest,
    AnimateResponse,
    BenchRequest,
    BenchResponse,
    DecomposeRequest,
    DecomposeResponse,
    ErrorInfo,
    HealthResponse,
    MockgenRequest,
    MockgenResponse,
    ReswarpRequest,
    ReswarpResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="atw", version=__version__,
                  description="Residual-warping animation engine")

    @app.exception_handler(AtwError)
    async def _domain_error(_: Request, exc: AtwError):
        status = 404 if isinstance(exc, IoFailure) else 422
        payload = ErrorInfo(error=type(exc).__name__, message=str(exc))
        return JSONResponse(status_code=status, content=payload.model_dump())

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/decompose", response_model=DecomposeResponse)
    def decompose(req: DecomposeRequest):
        return jobs.run_decompose(req)

    @app.post("/reswarp", response_model=ReswarpResponse)
    def reswarp(req: ReswarpRequest):
        return jobs.run_reswarp(req)

    @app.post("/animate", response_model=AnimateResponse)
    def animate(req: AnimateRequest):
        return jobs.run_animate(req)

    @app.post("/mockgen", response_model=MockgenResponse)
    def mockgen(req: MockgenRequest):
        return jobs.run_mockgen(req)

    @app.post("/bench", response_model=BenchResponse)
    def bench(req: BenchRequest):
        return jobs.run_bench(req)

    return app


app = create_app()
