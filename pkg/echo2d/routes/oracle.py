"""Oracle triangle endpoint."""

import structlog
from fastapi import APIRouter, Depends
from starlette.concurrency import run_in_threadpool

from echo2d.schemas.api import OracleCheckRequest, OracleCheckResponse
from echo2d.services.simulation import SimulationService, get_simulation_service

router = APIRouter(prefix="/oracle", tags=["oracle"])
logger = structlog.get_logger()


@router.post(
    "/check",
    response_model=OracleCheckResponse,
    responses={422: {"description": "Validation error"}},
    summary="Cross-check the evaluation routes",
    description=(
        "Evaluate random dimers by pathway sum, dense-matrix propagation and the "
        "closed-form expressions, and report the worst pairwise deviations."
    ),
)
async def check_oracle(
    request: OracleCheckRequest,
    service: SimulationService = Depends(get_simulation_service),
) -> OracleCheckResponse:
    report = await run_in_threadpool(
        service.oracle_check,
        request.sets,
        request.samples,
        request.seed,
        request.tolerance,
    )
    if not report.passed:
        logger.warning("Oracle routes disagree", worst=report.worst)
    return OracleCheckResponse(**report.to_dict())
