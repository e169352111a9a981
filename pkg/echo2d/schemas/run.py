"""Run configuration file schema.

Every frequency or energy carries its unit; delays are in fs and rates
in 1/fs.
"""

import math
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from echo2d.services.pathways import ExperimentKind
from echo2d.services.units import FrequencyUnit


class Quantity(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    value: float
    unit: FrequencyUnit = Field(..., description="meV, THz or rad/fs")


def mev(value: float) -> Quantity:
    return Quantity(value=value, unit=FrequencyUnit.MEV)


class RatesConfig(BaseModel):
    """Per-level widths γ; coherences decay at Γ_ab = γ_a + γ_b."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    gamma: float | list[float] = Field(
        0.0, description="One γ for every level, or one per level"
    )
    unit: Literal["1/fs"] = "1/fs"
    population_relaxation: bool = Field(
        True, description="False zeroes Γ_aa so populations do not decay"
    )

    @field_validator("gamma")
    @classmethod
    def check_non_negative(cls, v: float | list[float]) -> float | list[float]:
        values = v if isinstance(v, list) else [v]
        if any(g < 0 for g in values):
            raise ValueError("rates must be non-negative")
        return v

    def per_level(self, n_levels: int) -> list[float]:
        if isinstance(self.gamma, list):
            if len(self.gamma) != n_levels:
                raise ValueError(f"expected {n_levels} rates, got {len(self.gamma)}")
            return list(self.gamma)
        return [self.gamma] * n_levels


class DimerSystemConfig(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    type: Literal["dimer"] = "dimer"
    omega_a: Quantity
    omega_b: Quantity
    coupling: Quantity = Field(default_factory=lambda: mev(0.0))
    mu_a: float
    mu_b: float
    biexciton_shift: Quantity = Field(default_factory=lambda: mev(0.0))
    rates: RatesConfig = Field(default_factory=RatesConfig)


class ExplicitSystemConfig(BaseModel):
    """A level scheme given directly in its eigenbasis."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    type: Literal["explicit"]
    energies: list[Quantity] = Field(..., min_length=2)
    bands: list[int]
    mu_plus: list[list[float]]
    labels: list[str] | None = None
    ground_index: int = 0
    rates: RatesConfig = Field(default_factory=RatesConfig)

    @model_validator(mode="after")
    def check_shapes(self) -> "ExplicitSystemConfig":
        n = len(self.energies)
        if len(self.bands) != n:
            raise ValueError("bands needs one entry per level")
        if len(self.mu_plus) != n or any(len(row) != n for row in self.mu_plus):
            raise ValueError(f"mu_plus must be {n}x{n}")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("labels needs one entry per level")
        return self


SystemConfig = Annotated[
    DimerSystemConfig | ExplicitSystemConfig, Field(discriminator="type")
]


class TauConfig(BaseModel):
    """Delays as an explicit list or as an inclusive start/stop/step range."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    values: list[float] | None = None
    start: float | None = None
    stop: float | None = None
    step: float | None = Field(None, gt=0)
    unit: Literal["fs"] = "fs"

    @model_validator(mode="after")
    def check_form(self) -> "TauConfig":
        if self.values is not None:
            if any(v is not None for v in (self.start, self.stop, self.step)):
                raise ValueError("give either values or start/stop/step, not both")
            if not self.values:
                raise ValueError("values must not be empty")
        elif self.start is None or self.stop is None or self.step is None:
            raise ValueError("give values or all of start, stop and step")
        elif self.stop < self.start:
            raise ValueError("stop must not precede start")
        if min(self.delays()) < 0:
            raise ValueError("delays must be non-negative")
        return self

    def delays(self) -> list[float]:
        if self.values is not None:
            return list(self.values)
        start, stop, step = self.start or 0.0, self.stop or 0.0, self.step or 1.0
        count = math.floor((stop - start) / step + 1e-9) + 1
        return [start + k * step for k in range(count)]


class GridConfig(BaseModel):
    """Frequency window; the first axis defaults to the detection window."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    omega_min: Quantity
    omega_max: Quantity
    n_points: int = Field(..., ge=2)
    first_min: Quantity | None = None
    first_max: Quantity | None = None


class OutputKind(StrEnum):
    REAL = "real"
    IMAG = "imag"
    ABS = "abs"
    STICKS = "sticks"
    PATHWAYS = "pathways"
    DIAGRAMS = "diagrams"
    TRACES = "traces"


GRID_CHANNELS = (OutputKind.REAL, OutputKind.IMAG, OutputKind.ABS)


class TracePeak(BaseModel):
    """Fixed (ω1, ω3) point followed along τ2; rephasing peaks have ω1 < 0."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    experiment: ExperimentKind
    omega1: Quantity
    omega3: Quantity
    label: str | None = Field(None, pattern=r"^[A-Za-z0-9_\-]+$")
    tolerance: float = Field(
        1e-6, gt=0, description="Stick mode: max distance (rad/fs) to the nearest peak"
    )

    @field_validator("experiment")
    @classmethod
    def check_experiment(cls, v: ExperimentKind) -> ExperimentKind:
        if v is ExperimentKind.TWO_QUANTUM:
            raise ValueError("traces follow rephasing or nonrephasing peaks")
        return v


class FieldConfig(BaseModel):
    """Pulse amplitudes and carrier phases (rad) in time order."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    amplitudes: tuple[float, float, float] = (1.0, 1.0, 1.0)
    phases: tuple[float, float, float] = (0.0, 0.0, 0.0)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    system: SystemConfig
    experiment: list[ExperimentKind] = Field(
        default_factory=lambda: [ExperimentKind.REPHASING, ExperimentKind.NONREPHASING]
    )
    tau2: TauConfig = Field(
        default_factory=lambda: TauConfig(values=[0.0]),
        description="Waiting times for rephasing and nonrephasing spectra",
    )
    tau1: TauConfig = Field(
        default_factory=lambda: TauConfig(values=[0.0]),
        description="Fixed first delay for two-quantum spectra",
    )
    grid: GridConfig | Literal["stick"] = "stick"
    outputs: set[OutputKind] = Field(
        default_factory=lambda: {OutputKind.STICKS, OutputKind.PATHWAYS}
    )
    trace_peaks: list[TracePeak] = Field(default_factory=list)
    trace_tau2: TauConfig | None = Field(
        None, description="Waiting-time grid for traces; defaults to tau2"
    )
    pulses: FieldConfig = Field(default_factory=FieldConfig)
    output_dir: Path = Path("output")

    @field_validator("experiment", mode="before")
    @classmethod
    def accept_single_kind(cls, v: object) -> object:
        return [v] if isinstance(v, str) else v

    @field_validator("experiment")
    @classmethod
    def check_unique(cls, v: list[ExperimentKind]) -> list[ExperimentKind]:
        if not v:
            raise ValueError("at least one experiment is required")
        if len(set(v)) != len(v):
            raise ValueError("experiments must not repeat")
        return v

    @model_validator(mode="after")
    def check_outputs(self) -> "RunConfig":
        if self.grid == "stick" and self.outputs & set(GRID_CHANNELS):
            raise ValueError("real/imag/abs outputs need a frequency grid")
        if OutputKind.TRACES in self.outputs and not self.trace_peaks:
            raise ValueError("traces output needs trace_peaks")
        for peak in self.trace_peaks:
            if peak.experiment not in self.experiment:
                raise ValueError(
                    f"trace peak for {peak.experiment.value}, which is not run"
                )
        return self

    @property
    def channels(self) -> list[OutputKind]:
        return [c for c in GRID_CHANNELS if c in self.outputs]

    def trace_delays(self) -> list[float]:
        return (self.trace_tau2 or self.tau2).delays()


class RunManifest(BaseModel):
    """Files written by one run, in write order."""

    output_dir: str
    files: list[str]
    config_hash: str
    version: str
