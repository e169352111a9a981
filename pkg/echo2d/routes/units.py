"""Unit conversion endpoint."""

import structlog
from fastapi import APIRouter, Query

from echo2d.schemas.api import UnitConversionResponse
from echo2d.services.units import DEFAULT_UNITS, FrequencyUnit

router = APIRouter(prefix="/units", tags=["units"])
logger = structlog.get_logger()


@router.get(
    "/convert",
    response_model=UnitConversionResponse,
    responses={422: {"description": "Unknown unit or non-numeric value"}},
    summary="Convert an energy or frequency",
    description="Express a value given in meV, THz or rad/fs in all three units.",
)
async def convert_units(
    value: float = Query(..., description="Value to convert"),
    unit: FrequencyUnit = Query(..., description="Unit of the value"),
) -> UnitConversionResponse:
    omega = DEFAULT_UNITS.to_rad_per_fs(value, unit)
    logger.debug("Converting units", value=value, unit=unit.value)
    return UnitConversionResponse(
        value=value, unit=unit, converted=DEFAULT_UNITS.all_units(omega)
    )
