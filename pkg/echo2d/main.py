"""echo2d HTTP API - FastAPI application."""

import sys
import time
from collections.abc import AsyncGenerator, Awaitable, Callable
from contextlib import asynccontextmanager

import structlog
from dotenv import load_dotenv
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from echo2d import __version__
from echo2d.config import configure_logging, get_settings
from echo2d.errors import Echo2DError
from echo2d.routes import oracle, pathways, spectra, units
from echo2d.schemas.api import HealthResponse
from echo2d.services.simulation import (
    get_simulation_service,
    init_simulation_service,
    shutdown_simulation_service,
)

load_dotenv()
configure_logging()
logger = structlog.get_logger()


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator[None, None]:
    """Application lifespan context manager."""
    settings = get_settings()
    logger.info(
        "Starting echo2d API",
        environment=settings.environment,
        python_version=sys.version.split()[0],
        version=__version__,
    )

    try:
        await init_simulation_service(settings.threads)
        logger.info("Simulation service initialized successfully")
    except Exception as e:
        logger.error("Failed to initialize simulation service", error=str(e))
        raise

    yield

    logger.info("Shutting down echo2d API")
    try:
        await shutdown_simulation_service()
        logger.info("Simulation service shut down successfully")
    except Exception as e:
        logger.error("Error shutting down simulation service", error=str(e))


app = FastAPI(
    title="echo2d API",
    description=(
        "Third-order response pathways and 2D coherent spectra of exciton systems"
    ),
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(units.router)
app.include_router(pathways.router)
app.include_router(spectra.router)
app.include_router(oracle.router)


@app.middleware("http")
async def logging_middleware(
    request: Request, call_next: Callable[[Request], Awaitable[Response]]
) -> Response:
    """Log all HTTP requests with structured logging."""
    start_time = time.perf_counter()
    logger.info(
        "Request started",
        method=request.method,
        url=str(request.url),
        client_ip=request.client.host if request.client else None,
    )

    response = await call_next(request)

    logger.info(
        "Request completed",
        method=request.method,
        url=str(request.url),
        status_code=response.status_code,
        process_time_ms=round((time.perf_counter() - start_time) * 1000, 2),
    )
    return response


@app.get("/ping", response_model=HealthResponse, tags=["Health"])
async def health_check() -> HealthResponse:
    """Liveness check."""
    logger.debug("Health check requested")
    return HealthResponse(
        pong=True, environment=get_settings().environment, version=__version__
    )


@app.get("/health", tags=["Health"])
async def detailed_health_check() -> dict[str, object]:
    """Health including the simulation service."""
    try:
        simulation = await get_simulation_service().health_check()
    except RuntimeError:
        simulation = {"status": "not_initialized"}
    return {
        "status": "healthy" if simulation.get("status") == "healthy" else "degraded",
        "environment": get_settings().environment,
        "version": __version__,
        "services": {"api": "healthy", "simulation": simulation},
    }


@app.get("/", include_in_schema=False)
async def root() -> dict[str, str]:
    return {
        "message": "echo2d API",
        "version": __version__,
        "environment": get_settings().environment,
        "docs": "/docs",
        "health": "/ping",
    }


@app.exception_handler(Echo2DError)
async def echo2d_error(request: Request, exc: Echo2DError) -> JSONResponse:
    """Library errors are client errors: bad parameters or unreachable peaks."""
    logger.error(
        "Request rejected",
        error=str(exc),
        error_type=type(exc).__name__,
        url=str(request.url),
        method=request.method,
    )
    return JSONResponse(
        status_code=400, content={"error": str(exc), "status_code": 400}
    )


@app.exception_handler(500)
async def internal_server_error(request: Request, exc: Exception) -> JSONResponse:
    logger.error(
        "Internal server error",
        error=str(exc),
        url=str(request.url),
        method=request.method,
        exc_info=True,
    )
    return JSONResponse(
        status_code=500, content={"error": "Internal server error", "status_code": 500}
    )


@app.exception_handler(404)
async def not_found_error(request: Request, exc: Exception) -> JSONResponse:
    logger.warning("Endpoint not found", url=str(request.url), method=request.method)
    return JSONResponse(
        status_code=404, content={"error": "Endpoint not found", "status_code": 404}
    )


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    uvicorn.run(
        "echo2d.main:app",
        host="0.0.0.0",
        port=8000,
        reload=settings.environment == "development",
        log_level=settings.log_level.lower(),
    )
