"""Ready-made dimer systems."""

from echo2d.errors import ConfigError
from echo2d.schemas.run import DimerSystemConfig, Quantity, RatesConfig, mev
from echo2d.services.units import FrequencyUnit


def _thz(value: float) -> Quantity:
    return Quantity(value=value, unit=FrequencyUnit.THZ)


# unbroadened heterodimer with strong mixing
COUPLED_DIMER = DimerSystemConfig(
    omega_a=_thz(365.0),
    omega_b=_thz(397.0),
    coupling=mev(66.0),
    mu_a=-1.1,
    mu_b=1.5,
)

# same dimer with Γ_ij = 0.02 fs^-1 and no population decay
DEPHASING_DIMER = COUPLED_DIMER.model_copy(
    update={"rates": RatesConfig(gamma=0.01, population_relaxation=False)}
)

# heavy-hole / light-hole exciton pair of a quantum well with a red-shifted biexciton
QUANTUM_WELL_DIMER = DimerSystemConfig(
    omega_a=mev(1540.0),
    omega_b=mev(1546.0),
    coupling=mev(1.0),
    mu_a=1.0,
    mu_b=0.6,
    biexciton_shift=mev(1.5),
)

PRESETS: dict[str, DimerSystemConfig] = {
    "coupled": COUPLED_DIMER,
    "dephasing": DEPHASING_DIMER,
    "quantum-well": QUANTUM_WELL_DIMER,
}


def preset_system(name: str) -> DimerSystemConfig:
    try:
        return PRESETS[name]
    except KeyError as e:
        raise ConfigError(
            f"Unknown preset {name!r}; choose one of {', '.join(sorted(PRESETS))}"
        ) from e
