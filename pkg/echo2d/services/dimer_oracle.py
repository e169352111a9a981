"""Closed-form heterodimer spectra, kept independent of pathway enumeration.

Terms are written with the complex interval frequencies
Ω_ij = ω_i - ω_j - iΓ_ij of the exciton levels {g, α, β, f}, and the
half-sided lineshape G(x) regularized to i/x. The nonrephasing closed form
groups excited-state absorption with the ground-state poles, so it agrees
with the pathway sum only for a dimer without biexciton shift and with one
common coherence width.
"""

import cmath
from dataclasses import dataclass

import numpy as np
import structlog

from echo2d.errors import ConfigError
from echo2d.services.model import DIMER_BANDS, ExcitonSystem, interval_frequency

logger = structlog.get_logger()

G, ALPHA, BETA, F = 0, 1, 2, 3

STICK_TOLERANCE = 1e-9
ZERO_WIDTH = 1e-15


@dataclass(frozen=True)
class AnalyticSpectrumTerm:
    prefactor: complex
    tau2_phase: complex
    pole1: complex
    pole3: complex

    def value(self, omega1: float, tau2: float, omega3: float) -> complex:
        """Frequency-domain contribution at (ω1, τ2, ω3)."""
        return complex(
            self.prefactor
            * cmath.exp(-1j * self.tau2_phase * tau2)
            * (1j / (omega1 - self.pole1))
            * (1j / (omega3 - self.pole3))
        )

    def time_value(self, tau1: float, tau2: float, tau3: float) -> complex:
        """Time-domain contribution before any transform."""
        return complex(
            self.prefactor
            * cmath.exp(-1j * self.pole1 * tau1)
            * cmath.exp(-1j * self.tau2_phase * tau2)
            * cmath.exp(-1j * self.pole3 * tau3)
        )

    @property
    def has_width(self) -> bool:
        return -self.pole1.imag > ZERO_WIDTH and -self.pole3.imag > ZERO_WIDTH


@dataclass(frozen=True)
class AnalyticPeak:
    """Zero-width peak of the closed form.

    ``label`` names the (ω1, ω3) position in exciton letters.
    """

    omega1: float
    omega3: float
    amplitude: complex
    label: str


@dataclass(frozen=True)
class _Dipoles:
    ag: float
    bg: float
    fa: float
    fb: float


def _check_dimer(system: ExcitonSystem) -> _Dipoles:
    if system.n_levels != 4 or system.band != DIMER_BANDS or system.ground_index != G:
        raise ConfigError(
            "closed-form spectra need the four-level dimer {g, α, β, f}"
        )
    mu = system.mu_plus
    return _Dipoles(
        ag=float(mu[ALPHA, G]),
        bg=float(mu[BETA, G]),
        fa=float(mu[F, ALPHA]),
        fb=float(mu[F, BETA]),
    )


def _omega(system: ExcitonSystem, i: int, j: int) -> complex:
    return interval_frequency(system, i, j)


def analytic_rephasing_terms(system: ExcitonSystem) -> list[AnalyticSpectrumTerm]:
    """Twelve rephasing terms, diagonal peaks first."""
    d = _check_dimer(system)

    def o(i: int, j: int) -> complex:
        return _omega(system, i, j)

    T = AnalyticSpectrumTerm
    ag_pole = -o(ALPHA, G).conjugate()
    bg_pole = -o(BETA, G).conjugate()
    beta_alpha_conj = -o(BETA, ALPHA).conjugate()
    cross = d.ag**2 * d.bg**2
    return [
        T(d.ag**4, o(G, G), ag_pole, o(ALPHA, G)),
        T(d.ag**4, o(ALPHA, ALPHA), ag_pole, o(ALPHA, G)),
        T(d.bg**4, o(G, G), bg_pole, o(BETA, G)),
        T(d.bg**4, o(BETA, BETA), bg_pole, o(BETA, G)),
        T(-(d.ag**2) * d.fa**2, o(ALPHA, ALPHA), ag_pole, o(F, ALPHA)),
        T(-d.ag * d.fa * d.bg * d.fb, o(BETA, ALPHA), ag_pole, o(F, ALPHA)),
        T(cross, o(G, G), ag_pole, o(BETA, G)),
        T(cross, o(BETA, ALPHA), ag_pole, o(BETA, G)),
        T(-(d.bg**2) * d.fb**2, o(BETA, BETA), bg_pole, o(F, BETA)),
        T(-d.bg * d.fb * d.ag * d.fa, beta_alpha_conj, bg_pole, o(F, BETA)),
        T(cross, o(G, G), bg_pole, o(ALPHA, G)),
        T(cross, beta_alpha_conj, bg_pole, o(ALPHA, G)),
    ]


def analytic_nonrephasing_terms(system: ExcitonSystem) -> list[AnalyticSpectrumTerm]:
    """Twelve nonrephasing terms, cross peaks first."""
    d = _check_dimer(system)

    def o(i: int, j: int) -> complex:
        return _omega(system, i, j)

    T = AnalyticSpectrumTerm
    ag, bg = o(ALPHA, G), o(BETA, G)
    beta_alpha_conj = -o(BETA, ALPHA).conjugate()
    cross = d.ag**2 * d.bg**2
    mixed = -d.ag * d.bg * d.fa * d.fb
    return [
        T(cross, o(G, G), ag, bg),
        T(-(d.ag**2) * d.fa**2, o(ALPHA, ALPHA), ag, bg),
        T(cross, o(G, G), bg, ag),
        T(-(d.bg**2) * d.fb**2, o(BETA, BETA), bg, ag),
        T(d.ag**4, o(G, G), ag, ag),
        T(d.ag**4, o(ALPHA, ALPHA), ag, ag),
        T(cross, beta_alpha_conj, ag, ag),
        T(mixed, beta_alpha_conj, ag, o(F, BETA)),
        T(d.bg**4, o(G, G), bg, bg),
        T(d.bg**4, o(BETA, BETA), bg, bg),
        T(cross, o(BETA, ALPHA), bg, bg),
        T(mixed, o(BETA, ALPHA), bg, o(F, ALPHA)),
    ]


def _evaluate(
    terms: list[AnalyticSpectrumTerm], omega1: float, tau2: float, omega3: float
) -> complex:
    if tau2 < 0:
        return 0j
    if all(term.has_width for term in terms):
        return complex(sum(term.value(omega1, tau2, omega3) for term in terms))
    # zero width: delta peaks, queried at their exact positions
    total = 0j
    for term in terms:
        if (
            abs(term.pole1.real - omega1) <= STICK_TOLERANCE
            and abs(term.pole3.real - omega3) <= STICK_TOLERANCE
        ):
            total += term.prefactor * cmath.exp(-1j * term.tau2_phase * tau2)
    return total


def analytic_rephasing(
    system: ExcitonSystem, omega1: float, tau2: float, omega3: float
) -> complex:
    """Rephasing spectrum at (ω1, τ2, ω3); peaks sit at ω1 < 0."""
    return _evaluate(analytic_rephasing_terms(system), omega1, tau2, omega3)


def analytic_nonrephasing(
    system: ExcitonSystem, omega1: float, tau2: float, omega3: float
) -> complex:
    return _evaluate(analytic_nonrephasing_terms(system), omega1, tau2, omega3)


def analytic_time_signal(
    terms: list[AnalyticSpectrumTerm], tau1: float, tau2: float, tau3: float
) -> complex:
    """Time-domain sum of closed-form terms; zero for negative delays."""
    if min(tau1, tau2, tau3) < 0:
        return 0j
    return complex(sum(term.time_value(tau1, tau2, tau3) for term in terms))


def dimer_stick_peaks_gamma0(
    system: ExcitonSystem, kind: str, tau2: float
) -> list[AnalyticPeak]:
    """The four delta peaks of the unbroadened dimer at waiting time ``tau2``.

    ``kind`` is ``"rephasing"`` or ``"nonrephasing"``; Γ is ignored.
    """
    d = _check_dimer(system)
    w_a = float(system.energies[ALPHA])
    w_b = float(system.energies[BETA])
    w_ba = w_b - w_a
    coherence = d.ag * d.bg * (d.ag * d.bg - d.fa * d.fb)
    cross_ab = d.ag**2 * (d.bg**2 - d.fa**2)
    cross_ba = d.bg**2 * (d.ag**2 - d.fb**2)
    down = cmath.exp(-1j * w_ba * tau2)
    up = cmath.exp(1j * w_ba * tau2)

    if kind == "rephasing":
        return [
            AnalyticPeak(-w_a, w_a, complex(2 * d.ag**4), "αα"),
            AnalyticPeak(-w_a, w_b, cross_ab + coherence * down, "αβ"),
            AnalyticPeak(-w_b, w_a, cross_ba + coherence * up, "βα"),
            AnalyticPeak(-w_b, w_b, complex(2 * d.bg**4), "ββ"),
        ]
    if kind == "nonrephasing":
        return [
            AnalyticPeak(w_a, w_a, 2 * d.ag**4 + coherence * up, "αα"),
            AnalyticPeak(w_a, w_b, complex(cross_ab), "αβ"),
            AnalyticPeak(w_b, w_a, complex(cross_ba), "βα"),
            AnalyticPeak(w_b, w_b, 2 * d.bg**4 + coherence * down, "ββ"),
        ]
    raise ConfigError(f"No four-peak form for experiment kind {kind!r}")


def analytic_two_quantum_sticks(system: ExcitonSystem) -> list[AnalyticPeak]:
    """Two-quantum sticks at τ1 = 0 over (ω2, ω3)."""
    d = _check_dimer(system)
    w_f = float(system.energies[F])
    via_alpha = d.ag * d.fa
    via_beta = d.bg * d.fb
    total = via_alpha + via_beta
    w_alpha = float(system.energies[ALPHA])
    w_beta = float(system.energies[BETA])
    return [
        AnalyticPeak(w_f, w_alpha, complex(total * (via_alpha - via_beta)), "fα"),
        AnalyticPeak(w_f, w_beta, complex(total * (via_beta - via_alpha)), "fβ"),
    ]


def analytic_two_quantum(
    system: ExcitonSystem, omega2: float, omega3: float
) -> complex:
    """Two-quantum stick amplitude at (ω2, ω3); zero away from the two sticks."""
    total = 0j
    for peak in analytic_two_quantum_sticks(system):
        if (
            abs(peak.omega1 - omega2) <= STICK_TOLERANCE
            and abs(peak.omega3 - omega3) <= STICK_TOLERANCE
        ):
            total += peak.amplitude
    return total


def two_quantum_time_signal(system: ExcitonSystem, tau2: float, tau3: float) -> complex:
    """Unbroadened two-quantum signal at τ1 = 0 built from the two sticks."""
    if min(tau2, tau3) < 0:
        return 0j
    return complex(
        sum(
            peak.amplitude * np.exp(-1j * (peak.omega1 * tau2 + peak.omega3 * tau3))
            for peak in analytic_two_quantum_sticks(system)
        )
    )
