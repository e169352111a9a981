"""Pathway enumeration endpoint."""

import structlog
from fastapi import APIRouter, Depends
from starlette.concurrency import run_in_threadpool

from echo2d.schemas.api import PathwaysRequest, PathwaysResponse
from echo2d.services.simulation import SimulationService, get_simulation_service

router = APIRouter(prefix="/pathways", tags=["pathways"])
logger = structlog.get_logger()


@router.post(
    "",
    response_model=PathwaysResponse,
    responses={
        400: {"description": "Invalid level scheme"},
        422: {"description": "Validation error"},
    },
    summary="Enumerate Liouville pathways",
    description=(
        "List every surviving pathway of one experiment with its dipole product, "
        "interval frequencies and classification, optionally with rendered diagrams."
    ),
)
async def list_pathways(
    request: PathwaysRequest,
    service: SimulationService = Depends(get_simulation_service),
) -> PathwaysResponse:
    result = await run_in_threadpool(
        service.pathways,
        request.system,
        request.kind,
        request.include_diagrams,
        request.pulses,
    )
    logger.info("Pathways listed", kind=request.kind.value, count=result["count"])
    return PathwaysResponse(**result)
