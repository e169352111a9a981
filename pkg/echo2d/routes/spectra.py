"""Stick spectrum endpoint."""

import structlog
from fastapi import APIRouter, Depends
from starlette.concurrency import run_in_threadpool

from echo2d.schemas.api import (
    ComplexValue,
    StickPeakResponse,
    SticksRequest,
    SticksResponse,
)
from echo2d.services.simulation import SimulationService, get_simulation_service

router = APIRouter(prefix="/spectra", tags=["spectra"])
logger = structlog.get_logger()


@router.post(
    "/sticks",
    response_model=SticksResponse,
    responses={
        400: {"description": "Invalid system or nonzero linewidths"},
        422: {"description": "Validation error"},
    },
    summary="Zero-width 2D spectrum",
    description="Delta-peak positions and complex amplitudes at one fixed delay.",
)
async def stick_peaks(
    request: SticksRequest,
    service: SimulationService = Depends(get_simulation_service),
) -> SticksResponse:
    spectrum = await run_in_threadpool(
        service.sticks, request.system, request.kind, request.tau, request.pulses
    )
    logger.info(
        "Stick spectrum computed", kind=request.kind.value, peaks=len(spectrum.peaks)
    )
    return SticksResponse(
        kind=request.kind,
        tau=request.tau,
        axes=spectrum.axes,
        peaks=[
            StickPeakResponse(
                omega1=peak.omega1,
                omega3=peak.omega3,
                amplitude=ComplexValue.of(peak.amplitude),
            )
            for peak in spectrum.peaks
        ],
    )
