"""Level-scheme model: exciton systems, dimer diagonalization and linewidths."""

import dataclasses
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import structlog

from echo2d.errors import ConfigError
from echo2d.schemas.system import MixingAngleReport, SiteDimerParams
from echo2d.services.units import DEFAULT_UNITS, UnitContext

logger = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

DIMER_LABELS = ("g", "α", "β", "f")
DIMER_BANDS = (0, 1, 1, 2)


def _frozen(values: npt.ArrayLike, shape: tuple[int, ...], name: str) -> FloatArray:
    array = np.array(values, dtype=float)
    if array.shape != shape:
        raise ConfigError(f"{name} must have shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ConfigError(f"{name} must be finite")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ExcitonSystem:
    """An N-level band-structured system in its eigenbasis.

    ``mu_plus[a, b]`` is the raising part of the dipole operator, nonzero
    only when ``band[a] == band[b] + 1``. ``gamma`` holds the per-level
    ad-hoc widths and ``gamma_matrix`` the pairwise rates used by every
    propagator (element |a><b| decays at ``gamma_matrix[a, b]``).
    """

    energies: FloatArray
    band: tuple[int, ...]
    mu_plus: FloatArray
    gamma: FloatArray = field(default=None)  # type: ignore[assignment]
    gamma_matrix: FloatArray = field(default=None)  # type: ignore[assignment]
    ground_index: int = 0
    labels: tuple[str, ...] = ()
    population_relaxation: bool = True

    def __post_init__(self) -> None:
        n = len(self.energies)
        if n < 2:
            raise ConfigError("An exciton system needs at least two levels")
        set_ = object.__setattr__
        set_(self, "energies", _frozen(self.energies, (n,), "energies"))
        set_(self, "band", tuple(int(b) for b in self.band))
        set_(self, "mu_plus", _frozen(self.mu_plus, (n, n), "mu_plus"))
        gamma = np.zeros(n) if self.gamma is None else self.gamma
        set_(self, "gamma", _frozen(gamma, (n,), "gamma"))
        rates = np.zeros((n, n)) if self.gamma_matrix is None else self.gamma_matrix
        set_(self, "gamma_matrix", _frozen(rates, (n, n), "gamma_matrix"))
        labels = self.labels or tuple(
            "g" if i == self.ground_index else str(i) for i in range(n)
        )
        set_(self, "labels", tuple(labels))

        if len(self.band) != n or len(self.labels) != n:
            raise ConfigError("band and labels need one entry per level")
        if not 0 <= self.ground_index < n:
            raise ConfigError("ground_index out of range")
        if self.band[self.ground_index] != 0:
            raise ConfigError("The ground level must sit in band 0")
        if self.energies[self.ground_index] != 0.0:
            raise ConfigError("The ground level energy must be 0")
        if np.any(self.gamma < 0) or np.any(self.gamma_matrix < 0):
            raise ConfigError("Rates must be non-negative")
        if not np.array_equal(self.gamma_matrix, self.gamma_matrix.T):
            raise ConfigError("gamma_matrix must be symmetric")
        for a, b in zip(*np.nonzero(self.mu_plus), strict=True):
            if self.band[a] != self.band[b] + 1:
                raise ConfigError(
                    f"mu_plus[{a}][{b}] couples bands {self.band[b]} -> {self.band[a]}"
                )

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    @property
    def ground(self) -> int:
        return self.ground_index


def build_exciton_dimer(
    params: SiteDimerParams, units: UnitContext = DEFAULT_UNITS
) -> tuple[ExcitonSystem, MixingAngleReport]:
    """Diagonalize the heterodimer into the exciton basis {g, α, β, f}.

    All rates start at zero; use :func:`set_rates` to add linewidths.
    """
    omega_bar = 0.5 * (params.omega_a + params.omega_b)
    delta = 0.5 * (params.omega_a - params.omega_b)
    coupling = units.mev_to_rad_per_fs(params.J)

    if coupling == 0.0:
        theta = 0.0
    elif delta == 0.0:
        theta = math.pi / 4
    else:
        theta = 0.5 * math.atan(coupling / delta)

    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    # equals delta * sec(2 theta) whenever delta != 0
    shift = delta * c2 + coupling * s2
    omega_alpha = omega_bar + shift
    omega_beta = omega_bar - shift
    omega_f = params.omega_a + params.omega_b - units.mev_to_rad_per_fs(
        params.biexciton_shift
    )

    c, s = math.cos(theta), math.sin(theta)
    mu_alpha_g = c * params.mu_a + s * params.mu_b
    mu_beta_g = -s * params.mu_a + c * params.mu_b
    mu_f_alpha = s * params.mu_a + c * params.mu_b
    mu_f_beta = c * params.mu_a - s * params.mu_b

    mu_plus = np.zeros((4, 4))
    mu_plus[1, 0] = mu_alpha_g
    mu_plus[2, 0] = mu_beta_g
    mu_plus[3, 1] = mu_f_alpha
    mu_plus[3, 2] = mu_f_beta

    system = ExcitonSystem(
        energies=np.array([0.0, omega_alpha, omega_beta, omega_f]),
        band=DIMER_BANDS,
        mu_plus=mu_plus,
        labels=DIMER_LABELS,
    )
    report = MixingAngleReport(
        omega_bar=omega_bar,
        Delta=delta,
        coupling=coupling,
        theta=theta,
        omega_alpha=omega_alpha,
        omega_beta=omega_beta,
        omega_f=omega_f,
        mu_alpha_g=mu_alpha_g,
        mu_beta_g=mu_beta_g,
        mu_f_alpha=mu_f_alpha,
        mu_f_beta=mu_f_beta,
    )
    logger.debug(
        "Built exciton dimer",
        theta=theta,
        omega_alpha=omega_alpha,
        omega_beta=omega_beta,
        omega_f=omega_f,
    )
    return system, report


def set_rates(
    system: ExcitonSystem,
    gamma_per_level: Sequence[float],
    population_relaxation: bool = True,
) -> ExcitonSystem:
    """Return a copy with Γ_ab = γ_a + γ_b.

    With ``population_relaxation=False`` the diagonal Γ_aa is zeroed so
    populations do not decay.
    """
    gamma = np.asarray(gamma_per_level, dtype=float)
    if gamma.shape != (system.n_levels,):
        got = gamma.shape[0] if gamma.ndim else 1
        raise ConfigError(f"Expected {system.n_levels} rates, got {got}")
    if not np.all(np.isfinite(gamma)) or np.any(gamma < 0):
        raise ConfigError("Rates must be finite and non-negative")

    rates = gamma[:, None] + gamma[None, :]
    if not population_relaxation:
        np.fill_diagonal(rates, 0.0)
    return dataclasses.replace(
        system,
        gamma=gamma,
        gamma_matrix=rates,
        population_relaxation=population_relaxation,
    )


def interval_frequency(system: ExcitonSystem, ket: int, bra: int) -> complex:
    """Complex frequency of |ket><bra|; the element evolves as exp(-i Ω τ)."""
    return complex(
        system.energies[ket] - system.energies[bra],
        -system.gamma_matrix[ket, bra],
    )


def grating_period(wavelength: float, crossing_angle: float) -> float:
    """Fringe period of two beams crossing at ``crossing_angle`` (same length unit)."""
    if wavelength <= 0:
        raise ConfigError("wavelength must be positive")
    if not 0 < crossing_angle <= math.pi:
        raise ConfigError("crossing angle must lie in (0, pi]")
    return wavelength / (2.0 * math.sin(0.5 * crossing_angle))
