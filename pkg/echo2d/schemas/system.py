"""Schemas describing the coupled two-site (dimer) model."""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SiteDimerParams(BaseModel):
    """Site-basis parameters of the heterodimer.

    Transition frequencies are angular (rad/fs); the coupling and the
    biexciton shift are energies in meV.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    omega_a: float = Field(..., description="Site a transition frequency (rad/fs)")
    omega_b: float = Field(..., description="Site b transition frequency (rad/fs)")
    J: float = Field(0.0, description="Coupling energy (meV)")
    mu_a: float = Field(..., description="Site a transition dipole")
    mu_b: float = Field(..., description="Site b transition dipole")
    biexciton_shift: float = Field(
        0.0, description="Red shift of the doubly excited state (meV)"
    )

    @model_validator(mode="after")
    def check_ordering(self) -> "SiteDimerParams":
        if self.omega_b < self.omega_a:
            raise ValueError("omega_b must be >= omega_a")
        return self


class MixingAngleReport(BaseModel):
    """Exciton-basis quantities derived from the site parameters."""

    model_config = ConfigDict(frozen=True)

    omega_bar: float
    Delta: float
    coupling: float = Field(..., description="J / hbar (rad/fs)")
    theta: float
    omega_alpha: float
    omega_beta: float
    omega_f: float
    mu_alpha_g: float
    mu_beta_g: float
    mu_f_alpha: float
    mu_f_beta: float

    @property
    def omega_beta_alpha(self) -> float:
        return self.omega_beta - self.omega_alpha
