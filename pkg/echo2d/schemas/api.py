"""Request and response models of the HTTP API."""

from typing import Any

from pydantic import BaseModel, Field

from echo2d.schemas.run import FieldConfig, SystemConfig
from echo2d.services.pathways import ExperimentKind
from echo2d.services.units import FrequencyUnit


class HealthResponse(BaseModel):
    pong: bool
    environment: str
    version: str


class UnitConversionResponse(BaseModel):
    value: float
    unit: FrequencyUnit
    converted: dict[str, float] = Field(
        ..., description="The value in meV, THz and rad/fs"
    )


class ComplexValue(BaseModel):
    re: float
    im: float

    @classmethod
    def of(cls, value: complex) -> "ComplexValue":
        return cls(re=value.real, im=value.imag)


class PathwaysRequest(BaseModel):
    system: SystemConfig
    kind: ExperimentKind = ExperimentKind.REPHASING
    include_diagrams: bool = Field(
        False, description="Also render the diagrams as text"
    )
    pulses: FieldConfig = Field(default_factory=FieldConfig)


class PathwaysResponse(BaseModel):
    kind: ExperimentKind
    count: int
    levels: list[str]
    pathways: list[dict[str, Any]]
    diagrams: str | None = None


class SticksRequest(BaseModel):
    system: SystemConfig
    kind: ExperimentKind = ExperimentKind.REPHASING
    tau: float = Field(
        0.0, ge=0, description="Fixed delay in fs: τ2, or τ1 for two-quantum"
    )
    pulses: FieldConfig = Field(default_factory=FieldConfig)


class StickPeakResponse(BaseModel):
    omega1: float
    omega3: float
    amplitude: ComplexValue


class SticksResponse(BaseModel):
    kind: ExperimentKind
    tau: float
    axes: tuple[str, str]
    peaks: list[StickPeakResponse]


class OracleCheckRequest(BaseModel):
    sets: int = Field(10, ge=1, le=500)
    samples: int = Field(5, ge=1, le=200)
    seed: int = 0
    tolerance: float = Field(1e-9, gt=0)


class OracleCheckResponse(BaseModel):
    n_sets: int
    n_samples: int
    seed: int
    tolerance: float
    max_deviation: dict[str, float]
    worst: float
    passed: bool
