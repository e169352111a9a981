"""Randomized agreement check between the three evaluation routes.

Every parameter set is evaluated by the pathway sum, the dense-matrix
propagation and the closed-form dimer expressions. Deviations are
|a - b| / (1 + |b|).
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import structlog

from echo2d.errors import ConfigError, NumericalContractError
from echo2d.schemas.system import SiteDimerParams
from echo2d.services.dimer_oracle import (
    AnalyticSpectrumTerm,
    analytic_nonrephasing_terms,
    analytic_rephasing_terms,
    analytic_time_signal,
    analytic_two_quantum_sticks,
    two_quantum_time_signal,
)
from echo2d.services.model import ExcitonSystem, build_exciton_dimer, set_rates
from echo2d.services.pathways import ExperimentKind
from echo2d.services.response import (
    dense_oracle,
    pathway_amplitudes,
    signal_time_domain,
)
from echo2d.services.spectra import evaluate_grid, stick_spectrum

logger = structlog.get_logger()

DEFAULT_SETS = 50
DEFAULT_SAMPLES = 20
DEFAULT_TOLERANCE = 1e-9

TermBuilder = Callable[[ExcitonSystem], list[AnalyticSpectrumTerm]]
CLOSED_FORMS: dict[ExperimentKind, TermBuilder] = {
    ExperimentKind.REPHASING: analytic_rephasing_terms,
    ExperimentKind.NONREPHASING: analytic_nonrephasing_terms,
}


def deviation(a: complex, b: complex) -> float:
    return float(abs(a - b) / (1.0 + abs(b)))


@dataclass
class OracleReport:
    """Worst deviation per route pair over all sets and samples."""

    n_sets: int
    n_samples: int
    seed: int
    tolerance: float
    max_deviation: dict[str, float] = field(default_factory=dict)

    def record(self, name: str, a: complex, b: complex) -> None:
        value = deviation(a, b)
        self.max_deviation[name] = max(self.max_deviation.get(name, 0.0), value)

    @property
    def worst(self) -> float:
        return max(self.max_deviation.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance

    def raise_for_tolerance(self) -> None:
        if not self.passed:
            failing = {
                k: v for k, v in self.max_deviation.items() if v > self.tolerance
            }
            raise NumericalContractError(
                f"Oracle routes disagree beyond {self.tolerance:g}: {failing}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_sets": self.n_sets,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "max_deviation": dict(sorted(self.max_deviation.items())),
            "worst": self.worst,
            "passed": self.passed,
        }


def random_dimer(rng: np.random.Generator) -> ExcitonSystem:
    """Heterodimer with one common coherence width.

    Populations do not decay and the biexciton sits at ω_a + ω_b.
    """
    omega_a = rng.uniform(1.8, 2.6)
    params = SiteDimerParams(
        omega_a=omega_a,
        omega_b=omega_a + rng.uniform(0.01, 0.4),
        J=rng.uniform(-80.0, 80.0),
        mu_a=rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 2.0),
        mu_b=rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 2.0),
    )
    system, _ = build_exciton_dimer(params)
    width = rng.uniform(0.005, 0.05)
    return set_rates(system, [width / 2] * 4, population_relaxation=False)


def _check_closed_form_applies(system: ExcitonSystem) -> None:
    analytic_rephasing_terms(system)
    rates = system.gamma_matrix
    off_diagonal = rates[~np.eye(system.n_levels, dtype=bool)]
    if np.any(np.diag(rates) != 0) or np.ptp(off_diagonal) > 1e-15:
        raise ConfigError(
            "the closed-form route needs zero population decay "
            "and one common coherence width"
        )
    energies = system.energies
    if abs(energies[3] - energies[1] - energies[2]) > 1e-12:
        raise ConfigError("the closed-form route needs a dimer without biexciton shift")


def _check_system(
    report: OracleReport,
    system: ExcitonSystem,
    rng: np.random.Generator,
    n_samples: int,
) -> None:
    energies = system.energies
    band_low, band_high = float(energies[1:3].min()), float(energies[1:3].max())
    margin = 0.1

    for kind, build_terms in CLOSED_FORMS.items():
        amps = pathway_amplitudes(system, kind)
        terms = build_terms(system)
        for _ in range(n_samples):
            tau1, tau2, tau3 = rng.uniform(0.0, 200.0, size=3)
            routes = {
                "pathway": signal_time_domain(amps, tau1, tau2, tau3),
                "dense": dense_oracle(system, kind, tau1, tau2, tau3),
                "analytic": analytic_time_signal(terms, tau1, tau2, tau3),
            }
            for first, second in (
                ("pathway", "dense"),
                ("pathway", "analytic"),
                ("dense", "analytic"),
            ):
                report.record(
                    f"{kind.value}_time_{first}_{second}",
                    routes[first],
                    routes[second],
                )

            omega1, omega3 = rng.uniform(band_low - margin, band_high + margin, size=2)
            if kind is ExperimentKind.REPHASING:
                omega1 = -omega1
            grid = evaluate_grid(amps, [omega1], [omega3], tau2, kind, workers=1)
            grid_value = complex(grid[0, 0])
            closed_form = complex(sum(t.value(omega1, tau2, omega3) for t in terms))
            report.record(
                f"{kind.value}_frequency_pathway_analytic", grid_value, closed_form
            )

    unbroadened = set_rates(system, [0.0] * system.n_levels)
    kind = ExperimentKind.TWO_QUANTUM
    amps = pathway_amplitudes(unbroadened, kind)
    sticks = stick_spectrum(amps, 0.0, kind)
    for peak in analytic_two_quantum_sticks(unbroadened):
        try:
            found = sticks.find(peak.omega1, peak.omega3).amplitude
        except LookupError:
            found = 0j
        report.record("two_quantum_sticks_pathway_analytic", found, peak.amplitude)
    for _ in range(n_samples):
        tau2, tau3 = rng.uniform(0.0, 200.0, size=2)
        dense = dense_oracle(unbroadened, kind, 0.0, tau2, tau3)
        pathway = signal_time_domain(amps, 0.0, tau2, tau3)
        report.record("two_quantum_time_pathway_dense", pathway, dense)
        report.record(
            "two_quantum_time_dense_analytic",
            dense,
            two_quantum_time_signal(unbroadened, tau2, tau3),
        )


def check_oracle_triangle(
    n_sets: int = DEFAULT_SETS,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    system: ExcitonSystem | None = None,
) -> OracleReport:
    """Compare the three routes on random dimers, or on ``system`` when given."""
    if n_sets < 1 or n_samples < 1:
        raise ConfigError("sets and samples must be positive")
    if tolerance <= 0:
        raise ConfigError("tolerance must be positive")
    rng = np.random.default_rng(seed)
    if system is not None:
        _check_closed_form_applies(system)
        systems = [system]
    else:
        systems = [random_dimer(rng) for _ in range(n_sets)]
    report = OracleReport(
        n_sets=len(systems), n_samples=n_samples, seed=seed, tolerance=tolerance
    )

    for current in systems:
        _check_system(report, current, rng, n_samples)

    logger.info(
        "Oracle triangle checked",
        sets=report.n_sets,
        samples=n_samples,
        seed=seed,
        worst=report.worst,
        passed=report.passed,
    )
    return report
