"""Factored pathway amplitudes, time-domain signals and the dense-matrix oracle."""

import cmath
import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
import numpy.typing as npt
import structlog
from scipy.linalg import expm

from echo2d.errors import ConfigError
from echo2d.services.model import ExcitonSystem, interval_frequency
from echo2d.services.pathways import ExperimentKind, Pathway, enumerate_pathways

logger = structlog.get_logger()

ComplexArray = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class FieldSet:
    """Complex pulse constants E_j·exp(i φ_j) for the three time slots."""

    amplitudes: tuple[complex, complex, complex] = (1.0, 1.0, 1.0)
    phases: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def positive(self, slot: int) -> complex:
        """𝓔⁺ of pulse ``slot`` (1-based)."""
        phase = cmath.exp(1j * self.phases[slot - 1])
        return complex(self.amplitudes[slot - 1]) * phase

    def component(self, slot: int, sign: int) -> complex:
        value = self.positive(slot)
        return value if sign > 0 else value.conjugate()


DEFAULT_FIELDS = FieldSet()


@dataclass(frozen=True)
class PathwayAmplitude:
    """amp·exp(-iΩ1τ1)·exp(-iΩ2τ2)·exp(-iΩ3τ3) for one pathway."""

    amp: complex
    omega1: complex
    omega2: complex
    omega3: complex
    conjugate_branch: bool
    kind: ExperimentKind
    pathway: Pathway | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not cmath.isfinite(self.amp):
            raise ConfigError("pathway amplitude must be finite")
        for omega in (self.omega1, self.omega2, self.omega3):
            if omega.imag > 0:
                raise ConfigError("interval frequencies must not grow in time")

    @property
    def omegas(self) -> tuple[complex, complex, complex]:
        return self.omega1, self.omega2, self.omega3


def factor_pathway(
    system: ExcitonSystem, p: Pathway, fields: FieldSet = DEFAULT_FIELDS
) -> PathwayAmplitude:
    """Reduce a pathway to its amplitude and three interval frequencies.

    The emitted signal is the F-terms minus their conjugates, so pathways on
    the conjugate branch carry an extra factor -1. Their stored elements are
    already the reflected ones.
    """
    amp = complex(p.dipole_product)
    if p.conjugate_branch:
        amp = -amp
    for slot, sign in enumerate(p.signs, start=1):
        amp *= fields.component(slot, sign)
    omegas = [interval_frequency(system, ket, bra) for ket, bra in p.intervals]
    return PathwayAmplitude(
        amp=amp,
        omega1=omegas[0],
        omega2=omegas[1],
        omega3=omegas[2],
        conjugate_branch=p.conjugate_branch,
        kind=p.kind,
        pathway=p,
    )


def pathway_amplitudes(
    system: ExcitonSystem, kind: ExperimentKind, fields: FieldSet = DEFAULT_FIELDS
) -> list[PathwayAmplitude]:
    """Enumerate and factor every pathway of ``kind``."""
    return [factor_pathway(system, p, fields) for p in enumerate_pathways(system, kind)]


def stack_amplitudes(
    amps: Sequence[PathwayAmplitude],
) -> tuple[ComplexArray, ComplexArray]:
    """Amplitude vector and (n, 3) frequency matrix for vectorized evaluation."""
    amplitude = np.array([a.amp for a in amps], dtype=complex)
    omegas = np.array([a.omegas for a in amps], dtype=complex).reshape(len(amps), 3)
    return amplitude, omegas


def signal_time_domain(
    amps: Sequence[PathwayAmplitude], tau1: float, tau2: float, tau3: float
) -> complex:
    """Analytic third-order signal at the given delays (fs).

    Zero when any delay is negative.
    """
    if min(tau1, tau2, tau3) < 0:
        return 0j
    if not amps:
        return 0j
    amplitude, omegas = stack_amplitudes(amps)
    taus = np.array([tau1, tau2, tau3])
    return complex(np.sum(amplitude * np.exp(-1j * omegas @ taus)))


def real_field(
    amps: Sequence[PathwayAmplitude], tau1: float, tau2: float, tau3: float
) -> float:
    """Detected real field 2·Re of the analytic signal."""
    return 2.0 * signal_time_domain(amps, tau1, tau2, tau3).real


def signal_time_grid(
    amps: Sequence[PathwayAmplitude],
    taus_first: npt.ArrayLike,
    tau_fixed: float,
    taus_third: npt.ArrayLike,
    fixed_interval: int = 2,
) -> ComplexArray:
    """Signal on a grid of delays, one interval held fixed.

    ``fixed_interval`` is 2 for rephasing/nonrephasing grids over (τ1, τ3)
    and 1 for two-quantum grids over (τ2, τ3).
    """
    first = np.asarray(taus_first, dtype=float)
    third = np.asarray(taus_third, dtype=float)
    values = np.zeros((first.size, third.size), dtype=complex)
    if not amps:
        return values
    amplitude, omegas = stack_amplitudes(amps)
    varying = 1 if fixed_interval == 1 else 0
    for k in range(len(amps)):
        fixed = omegas[k, fixed_interval - 1]
        coefficient = amplitude[k] * np.exp(-1j * fixed * tau_fixed)
        values += coefficient * np.outer(
            np.exp(-1j * omegas[k, varying] * first),
            np.exp(-1j * omegas[k, 2] * third),
        )
    return values


class Propagation(StrEnum):
    """How the dense oracle propagates the density matrix between pulses."""

    LIOUVILLE = "liouville"
    HILBERT = "hilbert"


def _propagator(
    system: ExcitonSystem, mode: Propagation
) -> Callable[[ComplexArray, float], ComplexArray]:
    energies = system.energies
    if mode is Propagation.HILBERT:
        consistent = system.gamma[:, None] + system.gamma[None, :]
        if not np.allclose(system.gamma_matrix, consistent, rtol=0, atol=1e-15):
            raise ConfigError(
                "Hilbert-space propagators need gamma_matrix = gamma_a + gamma_b"
            )
        hamiltonian = np.diag(energies - 1j * system.gamma)

        def hilbert(rho: ComplexArray, tau: float) -> ComplexArray:
            lam = expm(-1j * hamiltonian * tau)
            return lam @ rho @ lam.conj().T

        return hilbert

    omega = (energies[:, None] - energies[None, :]) - 1j * system.gamma_matrix

    def liouville(rho: ComplexArray, tau: float) -> ComplexArray:
        return rho * np.exp(-1j * omega * tau)

    return liouville


def dense_oracle(
    system: ExcitonSystem,
    kind: ExperimentKind,
    tau1: float,
    tau2: float,
    tau3: float,
    fields: FieldSet = DEFAULT_FIELDS,
    propagation: Propagation | str = Propagation.LIOUVILLE,
) -> complex:
    """Evaluate the nested commutator by explicit matrix products.

    Interaction 1 acts on the ket; interactions 2 and 3 are expanded over
    both sides, each bra-side action carrying a factor -1. Terms that
    phase matching removes vanish here on their own. The conjugate branch
    is evaluated with flipped field signs and returns minus its conjugate.
    """
    if min(tau1, tau2, tau3) < 0:
        return 0j
    propagate = _propagator(system, Propagation(propagation))

    raising = system.mu_plus.astype(complex)
    lowering = raising.T
    dipole = raising + lowering
    n = system.n_levels
    rho0 = np.zeros((n, n), dtype=complex)
    rho0[system.ground_index, system.ground_index] = 1.0

    signs = kind.signs
    if kind.conjugate_branch:
        signs = (-signs[0], -signs[1], -signs[2])
    taus = (tau1, tau2, tau3)

    total = 0j
    for on_bra in itertools.product((False, True), repeat=2):
        rho = rho0
        for sign, bra_side, tau in zip(signs, (False, *on_bra), taus, strict=True):
            operator = raising if sign > 0 else lowering
            rho = rho @ operator if bra_side else operator @ rho
            rho = propagate(rho, tau)
        value = complex(np.trace(dipole @ rho))
        total += -value if sum(on_bra) % 2 else value

    pulses = complex(1.0)
    for slot, sign in enumerate(signs, start=1):
        pulses *= fields.component(slot, sign)
    total *= pulses
    if kind.conjugate_branch:
        return -total.conjugate()
    return total
