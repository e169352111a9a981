"""Frequency grid specification."""

from enum import StrEnum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator


class GridAxes(StrEnum):
    OMEGA1_OMEGA3 = "omega1_omega3"
    OMEGA2_OMEGA3 = "omega2_omega3"


class FrequencyGridSpec(BaseModel):
    """Uniform grid in rad/fs.

    ``omega_min``/``omega_max`` span the detection (ω3) axis. The first axis
    uses ``first_min``/``first_max`` when given, otherwise the same range for
    (ω1, ω3) grids and twice the range for (ω2, ω3) grids.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    omega_min: float
    omega_max: float
    n_points: int = Field(..., ge=2)
    axes: GridAxes = GridAxes.OMEGA1_OMEGA3
    first_min: float | None = None
    first_max: float | None = None

    @model_validator(mode="after")
    def check_ranges(self) -> "FrequencyGridSpec":
        if self.omega_max <= self.omega_min:
            raise ValueError("omega_max must exceed omega_min")
        if (self.first_min is None) != (self.first_max is None):
            raise ValueError("first_min and first_max must be given together")
        if self.first_min is not None and self.first_max is not None:
            if self.first_max <= self.first_min:
                raise ValueError("first_max must exceed first_min")
        return self

    def third_axis(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)

    def first_axis(self) -> npt.NDArray[np.float64]:
        if self.first_min is not None and self.first_max is not None:
            return np.linspace(self.first_min, self.first_max, self.n_points)
        if self.axes is GridAxes.OMEGA2_OMEGA3:
            return np.linspace(2 * self.omega_min, 2 * self.omega_max, self.n_points)
        return self.third_axis()
