"""HTTP front end: one POST endpoint per command plus a generic job route.

Validation problems map to 422, numerical refusals (rank deficiency,
unsolvable supports, missing limits at a zero eigenvalue, and so on) to
400 with the exception class named in the detail.
"""

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import PurigeoError
from . import handlers
from .schemas import (
    ConvertRequest,
    HolonomyRequest,
    JobSpec,
    MetricRequest,
    NoiseRequest,
    Report,
    SelftestRequest,
    TransportRequest,
    VnRequest,
)


def _execute(job: JobSpec) -> Report:
    try:
        return handlers.run(job)
    except handlers.VALIDATION_FAILURES as exc:
        raise HTTPException(
            status_code=422,
            detail={"kind": "validation", "error": type(exc).__name__, "message": str(exc)},
        ) from exc
    except PurigeoError as exc:
        raise HTTPException(
            status_code=400,
            detail={"kind": "numerical", "error": type(exc).__name__, "message": str(exc)},
        ) from exc


def create_app() -> FastAPI:
    app = FastAPI(
        title="purigeo",
        version=__version__,
        description="Connections, monotone metrics, and holonomy for purified density operators.",
    )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/jobs", response_model=Report)
    def jobs(job: JobSpec) -> Report:
        return _execute(job)

    def _register(command: str, model):
        @app.post(f"/v1/{command}", response_model=Report, name=command)
        def endpoint(req: model, seed: int = 0) -> Report:  # type: ignore[valid-type]
            return _execute(
                JobSpec(command=command, parameters=req.model_dump(exclude_none=True), seed=seed)
            )

        return endpoint

    _register("convert", ConvertRequest)
    _register("metric", MetricRequest)
    _register("transport", TransportRequest)
    _register("vn", VnRequest)
    _register("holonomy", HolonomyRequest)
    _register("noise", NoiseRequest)
    _register("selftest", SelftestRequest)
    return app


app = create_app()
