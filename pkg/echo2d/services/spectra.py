"""2D spectra from factored pathway amplitudes.

Every pathway is a product of complex exponentials, so its half-sided
Fourier transform is exact: each transformed interval contributes the
kernel L(ω; Ω) = i / (ω - Ω). Stick spectra cover the zero-width limit.
"""

from collections import defaultdict
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
import structlog
from scipy.integrate import trapezoid

from echo2d.config import worker_count
from echo2d.errors import ConfigError, PeakNotFoundError, SpectrumModeError
from echo2d.schemas.spectra import FrequencyGridSpec, GridAxes
from echo2d.services.pathways import ExperimentKind
from echo2d.services.response import (
    ComplexArray,
    PathwayAmplitude,
    signal_time_grid,
    stack_amplitudes,
)

logger = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]
SpectrumLabel = ExperimentKind | Literal["full_fourier"]
FULL_FOURIER: Literal["full_fourier"] = "full_fourier"

STICK_DECIMALS = 9
WIDTH_TOLERANCE = 1e-15


@dataclass(frozen=True)
class Layout:
    """Which intervals are transformed and which one is held fixed (0-based)."""

    first: int
    third: int
    fixed: int

    @property
    def axis_names(self) -> tuple[str, str]:
        return f"omega{self.first + 1}", f"omega{self.third + 1}"


def layout_for(kind: ExperimentKind) -> Layout:
    if kind is ExperimentKind.TWO_QUANTUM:
        return Layout(first=1, third=2, fixed=0)
    return Layout(first=0, third=2, fixed=1)


def lineshape(omega: npt.ArrayLike, Omega: complex) -> ComplexArray:
    """Half-sided Fourier kernel: ∫₀^∞ exp(iωτ) exp(-iΩτ) dτ = i / (ω - Ω)."""
    return 1j / (np.asarray(omega, dtype=float) - Omega)


def _check_kind(amps: Sequence[PathwayAmplitude], kind: ExperimentKind) -> None:
    mixed = {a.kind for a in amps} - {kind}
    if mixed:
        names = sorted(k.value for k in mixed)
        raise ConfigError(f"amplitudes of kind {names} passed as {kind.value}")


def _infer_kind(amps: Sequence[PathwayAmplitude]) -> ExperimentKind:
    kinds = {a.kind for a in amps}
    if len(kinds) != 1:
        raise ConfigError("amplitudes must share one experiment kind")
    return kinds.pop()


# --------------------------------------------------------------------------- sticks


@dataclass(frozen=True)
class StickTerm:
    """Amplitude evolving as exp(-i·omega·τ) along the fixed delay."""

    amp: complex
    omega: complex


def _evolve(terms: Sequence[StickTerm], tau: float) -> complex:
    return complex(sum(t.amp * np.exp(-1j * t.omega * tau) for t in terms))


@dataclass(frozen=True)
class StickPeak:
    omega1: float
    omega3: float
    amplitude: complex
    terms: tuple[StickTerm, ...]

    def amplitude_at(self, tau: float) -> complex:
        return _evolve(self.terms, tau)

    def to_dict(self) -> dict[str, Any]:
        return {
            "omega1": self.omega1,
            "omega3": self.omega3,
            "amplitude": _complex_dict(self.amplitude),
            "terms": [
                {"amp": _complex_dict(t.amp), "omega": _complex_dict(t.omega)}
                for t in self.terms
            ],
        }


@dataclass(frozen=True)
class StickSpectrum:
    """Zero-width peaks at fixed delay.

    For two-quantum spectra ``omega1`` of each peak holds ω2 and the fixed
    delay is τ1; ``axes`` names the two transformed frequencies.
    """

    peaks: tuple[StickPeak, ...]
    tau_fixed: float
    kind: ExperimentKind | None
    axes: tuple[str, str] = ("omega1", "omega3")

    def find(self, omega1: float, omega3: float, tolerance: float = 1e-6) -> StickPeak:
        best = None
        best_distance = np.inf
        for peak in self.peaks:
            distance = max(abs(peak.omega1 - omega1), abs(peak.omega3 - omega3))
            if distance < best_distance:
                best, best_distance = peak, distance
        if best is None or best_distance > tolerance:
            raise PeakNotFoundError(
                f"No stick peak within {tolerance} rad/fs of ({omega1}, {omega3})"
            )
        return best

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value if self.kind else None,
            "axes": list(self.axes),
            "tau_fixed": self.tau_fixed,
            "peaks": [peak.to_dict() for peak in self.peaks],
        }


def _complex_dict(value: complex) -> dict[str, float]:
    return {"re": float(value.real), "im": float(value.imag)}


def stick_spectrum(
    amps: Sequence[PathwayAmplitude],
    tau_fixed: float = 0.0,
    kind: ExperimentKind | None = None,
) -> StickSpectrum:
    """Group pathways into delta peaks at (Re Ω_first, Re Ω_third).

    Terms of a peak sharing the same fixed-interval frequency are merged;
    merged terms that cancel are dropped, as are peaks left without terms.
    """
    if not amps:
        return StickSpectrum(peaks=(), tau_fixed=tau_fixed, kind=kind)
    kind = kind or _infer_kind(amps)
    _check_kind(amps, kind)
    layout = layout_for(kind)

    scale = max(1.0, max(abs(a.amp) for a in amps))
    groups: dict[tuple[float, float], dict[tuple[float, float], list[Any]]] = (
        defaultdict(dict)
    )
    positions: dict[tuple[float, float], tuple[float, float]] = {}
    for a in amps:
        first, third, fixed = (
            a.omegas[layout.first],
            a.omegas[layout.third],
            a.omegas[layout.fixed],
        )
        if abs(first.imag) > WIDTH_TOLERANCE or abs(third.imag) > WIDTH_TOLERANCE:
            raise SpectrumModeError(
                "stick spectra need zero linewidth on the transformed intervals; "
                "use spectrum_grid for broadened systems"
            )
        key = (round(first.real, STICK_DECIMALS), round(third.real, STICK_DECIMALS))
        positions.setdefault(key, (first.real, third.real))
        fixed_key = (
            round(fixed.real, STICK_DECIMALS),
            round(fixed.imag, STICK_DECIMALS),
        )
        entry = groups[key].setdefault(fixed_key, [0j, fixed])
        entry[0] += a.amp

    peaks = []
    for key in sorted(groups):
        terms = tuple(
            StickTerm(amp=complex(amp), omega=complex(omega))
            for amp, omega in groups[key].values()
            if abs(amp) > 1e-12 * scale
        )
        if not terms:
            continue
        omega1, omega3 = positions[key]
        peaks.append(
            StickPeak(
                omega1=omega1,
                omega3=omega3,
                amplitude=_evolve(terms, tau_fixed),
                terms=terms,
            )
        )
    return StickSpectrum(
        peaks=tuple(peaks), tau_fixed=tau_fixed, kind=kind, axes=layout.axis_names
    )


# --------------------------------------------------------------------------- grids


@dataclass(frozen=True)
class SpectrumGrid:
    """Complex spectrum values[i, j] at (omega_first[i], omega_third[j])."""

    spec: FrequencyGridSpec
    tau_fixed: float
    omega_first: FloatArray
    omega_third: FloatArray
    values: ComplexArray
    kind: SpectrumLabel

    def __post_init__(self) -> None:
        shape = (self.omega_first.size, self.omega_third.size)
        if self.values.shape != shape:
            raise ConfigError(
                f"grid values have shape {self.values.shape}, expected {shape}"
            )
        if shape != (self.spec.n_points, self.spec.n_points):
            raise ConfigError("grid dimensions do not match the grid spec")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("grid values must be finite")

    @property
    def label(self) -> str:
        return self.kind if isinstance(self.kind, str) else self.kind.value

    def channel(self, name: str) -> FloatArray:
        """Real-valued channel: ``real``, ``imag`` or ``abs``."""
        channels = {
            "real": np.real,
            "imag": np.imag,
            "abs": np.abs,
        }
        try:
            return np.asarray(channels[name](self.values), dtype=float)
        except KeyError as e:
            raise ConfigError(f"Unknown grid channel: {name}") from e

    def value_at(self, omega_first: float, omega_third: float) -> complex:
        i = int(np.argmin(np.abs(self.omega_first - omega_first)))
        j = int(np.argmin(np.abs(self.omega_third - omega_third)))
        return complex(self.values[i, j])


def _grid_rows(
    amplitude: ComplexArray,
    omegas: ComplexArray,
    layout: Layout,
    first: FloatArray,
    third: FloatArray,
    tau_fixed: float,
) -> ComplexArray:
    block = np.zeros((first.size, third.size), dtype=complex)
    for k in range(amplitude.size):
        coefficient = amplitude[k] * np.exp(-1j * omegas[k, layout.fixed] * tau_fixed)
        block += coefficient * np.outer(
            lineshape(first, omegas[k, layout.first]),
            lineshape(third, omegas[k, layout.third]),
        )
    return block


def evaluate_grid(
    amps: Sequence[PathwayAmplitude],
    omega_first: npt.ArrayLike,
    omega_third: npt.ArrayLike,
    tau_fixed: float,
    kind: ExperimentKind,
    workers: int | None = None,
) -> ComplexArray:
    """Sum of pathway lineshapes on arbitrary axes.

    Rows are split into contiguous blocks evaluated concurrently; each cell
    is written by one worker and summed in pathway order, so the result does
    not depend on the worker count.
    """
    first = np.asarray(omega_first, dtype=float)
    third = np.asarray(omega_third, dtype=float)
    if not amps:
        return np.zeros((first.size, third.size), dtype=complex)
    _check_kind(amps, kind)
    layout = layout_for(kind)
    amplitude, omegas = stack_amplitudes(amps)

    n_workers = min(worker_count(workers), max(1, first.size))
    blocks = np.array_split(np.arange(first.size), n_workers)
    if n_workers == 1:
        return _grid_rows(amplitude, omegas, layout, first, third, tau_fixed)

    values = np.zeros((first.size, third.size), dtype=complex)
    with ThreadPoolExecutor(max_workers=n_workers) as executor:
        futures = {
            executor.submit(
                _grid_rows, amplitude, omegas, layout, first[rows], third, tau_fixed
            ): rows
            for rows in blocks
            if rows.size
        }
        for future, rows in futures.items():
            values[rows] = future.result()
    return values


def spectrum_grid(
    amps: Sequence[PathwayAmplitude],
    spec: FrequencyGridSpec,
    tau_fixed: float,
    kind: ExperimentKind,
    workers: int | None = None,
) -> SpectrumGrid:
    """Broadened spectrum at a fixed delay (τ2, or τ1 for two-quantum).

    The rephasing first axis is the negated, reversed range so its peaks
    appear at ω1 < 0.
    """
    two_quantum_axes = spec.axes is GridAxes.OMEGA2_OMEGA3
    if two_quantum_axes != (kind is ExperimentKind.TWO_QUANTUM):
        raise ConfigError(
            f"grid axes {spec.axes.value} do not fit a {kind.value} spectrum"
        )
    layout = layout_for(kind)
    for a in amps:
        if (
            -a.omegas[layout.first].imag <= WIDTH_TOLERANCE
            or -a.omegas[layout.third].imag <= WIDTH_TOLERANCE
        ):
            raise SpectrumModeError(
                "grid spectra need nonzero linewidth on the transformed intervals; "
                "use stick_spectrum for the zero-width limit"
            )

    first = spec.first_axis()
    if kind is ExperimentKind.REPHASING:
        first = -first[::-1]
    third = spec.third_axis()
    values = evaluate_grid(amps, first, third, tau_fixed, kind, workers)
    logger.debug(
        "Evaluated spectrum grid",
        kind=kind.value,
        tau_fixed=tau_fixed,
        n_points=spec.n_points,
        pathways=len(amps),
    )
    return SpectrumGrid(
        spec=spec,
        tau_fixed=tau_fixed,
        omega_first=first,
        omega_third=third,
        values=values,
        kind=kind,
    )


def full_fourier(rephasing: SpectrumGrid, nonrephasing: SpectrumGrid) -> SpectrumGrid:
    """Flip the rephasing grid into the (+, +) quadrant and add the nonrephasing one."""
    if rephasing.kind is not ExperimentKind.REPHASING:
        raise ConfigError("first argument must be a rephasing grid")
    if nonrephasing.kind is not ExperimentKind.NONREPHASING:
        raise ConfigError("second argument must be a nonrephasing grid")
    flipped_axis = -rephasing.omega_first[::-1]
    if (
        not np.array_equal(flipped_axis, nonrephasing.omega_first)
        or not np.array_equal(rephasing.omega_third, nonrephasing.omega_third)
        or rephasing.tau_fixed != nonrephasing.tau_fixed
    ):
        raise ConfigError("rephasing and nonrephasing grids do not match")
    return SpectrumGrid(
        spec=nonrephasing.spec,
        tau_fixed=nonrephasing.tau_fixed,
        omega_first=nonrephasing.omega_first,
        omega_third=nonrephasing.omega_third,
        values=rephasing.values[::-1, :] + nonrephasing.values,
        kind=FULL_FOURIER,
    )


# --------------------------------------------------------------------------- traces


def waiting_time_trace(
    amps: Sequence[PathwayAmplitude],
    peak: tuple[float, float],
    tau2_grid: npt.ArrayLike,
    mode: Literal["stick", "grid"] = "stick",
    tolerance: float = 1e-6,
    oscillating_only: bool = False,
) -> ComplexArray:
    """Spectrum value at a fixed (ω1, ω3) as a function of τ2.

    ``stick`` mode follows the nearest stick peak; ``grid`` mode evaluates
    the broadened spectrum at the point. ``oscillating_only`` drops terms
    that do not evolve during τ2. No offset is applied.
    """
    taus = np.asarray(tau2_grid, dtype=float)
    if np.any(taus < 0):
        raise ConfigError("waiting times must be non-negative")
    if not amps:
        return np.zeros(taus.size, dtype=complex)
    kind = _infer_kind(amps)
    if kind is ExperimentKind.TWO_QUANTUM:
        raise ConfigError(
            "waiting-time traces are defined for rephasing and nonrephasing"
        )
    if oscillating_only:
        amps = [a for a in amps if abs(a.omega2) > 1e-12]
        if not amps:
            return np.zeros(taus.size, dtype=complex)

    if mode == "stick":
        target = stick_spectrum(amps, 0.0, kind).find(peak[0], peak[1], tolerance)
        return np.array([target.amplitude_at(t) for t in taus], dtype=complex)

    if any(
        -a.omega1.imag <= WIDTH_TOLERANCE or -a.omega3.imag <= WIDTH_TOLERANCE
        for a in amps
    ):
        raise SpectrumModeError(
            "grid traces need nonzero linewidth on the transformed intervals; "
            "use stick mode for the zero-width limit"
        )
    amplitude, omegas = stack_amplitudes(amps)
    weights = (
        amplitude
        * (1j / (peak[0] - omegas[:, 0]))
        * (1j / (peak[1] - omegas[:, 2]))
    )
    return np.exp(-1j * np.outer(taus, omegas[:, 1])) @ weights


def envelope_decay_time(tau2: npt.ArrayLike, trace: npt.ArrayLike) -> float:
    """Time constant of an exponential fitted to |trace| by log-linear least squares."""
    taus = np.asarray(tau2, dtype=float)
    magnitude = np.abs(np.asarray(trace, dtype=complex))
    if np.any(magnitude <= 0):
        raise ConfigError("trace envelope must be nonzero to fit a decay")
    slope, _ = np.polyfit(taus, np.log(magnitude), 1)
    if slope >= 0:
        raise ConfigError("trace envelope does not decay")
    return float(-1.0 / slope)


def lorentzian_area(values: npt.ArrayLike, omega: npt.ArrayLike) -> float:
    """Trapezoid integral of a sampled line profile."""
    samples = np.asarray(values, dtype=float)
    return float(trapezoid(samples, np.asarray(omega, dtype=float)))


# --------------------------------------------------------------------------- FFT check


def fft_spectrum(
    amps: Sequence[PathwayAmplitude],
    tau_fixed: float,
    kind: ExperimentKind,
    n_samples: int = 512,
    dt: float = 1.0,
) -> SpectrumGrid:
    """Numerical half-sided FFT of the sampled signal, for validating grids.

    The τ = 0 samples get trapezoid weight 1/2. Axes are the shifted FFT
    frequencies 2πk/(n·dt), identical for both transformed intervals.
    """
    if n_samples < 2 or n_samples % 2:
        raise ConfigError("n_samples must be an even number >= 2")
    if dt <= 0:
        raise ConfigError("dt must be positive")
    if amps:
        _check_kind(amps, kind)
    layout = layout_for(kind)
    taus = np.arange(n_samples) * dt
    samples = signal_time_grid(
        amps, taus, tau_fixed, taus, fixed_interval=layout.fixed + 1
    )
    samples[0, :] *= 0.5
    samples[:, 0] *= 0.5
    # ifft carries exp(+iωτ) and a 1/n factor
    spectrum = np.fft.ifft2(samples) * (n_samples * dt) ** 2
    spectrum = np.fft.fftshift(spectrum)
    axis = np.fft.fftshift(np.fft.fftfreq(n_samples, d=dt)) * 2 * np.pi
    spec = FrequencyGridSpec(
        omega_min=float(axis[0]),
        omega_max=float(axis[-1]),
        n_points=n_samples,
        axes=(
            GridAxes.OMEGA2_OMEGA3
            if kind is ExperimentKind.TWO_QUANTUM
            else GridAxes.OMEGA1_OMEGA3
        ),
        first_min=float(axis[0]),
        first_max=float(axis[-1]),
    )
    return SpectrumGrid(
        spec=spec,
        tau_fixed=tau_fixed,
        omega_first=axis,
        omega_third=axis.copy(),
        values=spectrum,
        kind=kind,
    )
