"""Tests for stick spectra, broadened grids, full-Fourier sums and traces."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echo2d.errors import ConfigError, PeakNotFoundError, SpectrumModeError
from echo2d.schemas.spectra import FrequencyGridSpec, GridAxes
from echo2d.services.dimer_oracle import dimer_stick_peaks_gamma0
from echo2d.services.model import set_rates
from echo2d.services.pathways import ExperimentKind, PathwayClass, classify_pathway
from echo2d.services.presets import DEPHASING_DIMER
from echo2d.services.response import PathwayAmplitude, pathway_amplitudes
from echo2d.services.runner import build_system
from echo2d.services.spectra import (
    FULL_FOURIER,
    envelope_decay_time,
    evaluate_grid,
    fft_spectrum,
    full_fourier,
    layout_for,
    lineshape,
    lorentzian_area,
    spectrum_grid,
    stick_spectrum,
    waiting_time_trace,
)
from tests.helpers import dimer_from_energies

R = ExperimentKind.REPHASING
NR = ExperimentKind.NONREPHASING
TWO_Q = ExperimentKind.TWO_QUANTUM

BAND_GRID = FrequencyGridSpec(omega_min=2.0, omega_max=2.8, n_points=161)


def exciton_frequencies(system) -> tuple[float, float]:
    return float(system.energies[1]), float(system.energies[2])


def small_grid() -> FrequencyGridSpec:
    return FrequencyGridSpec(omega_min=2.1, omega_max=2.7, n_points=21)


class TestLineshape:
    """Test the half-sided Fourier kernel."""

    def test_peak_value(self):
        """Test i / (ω - Ω) at the line center."""
        assert complex(lineshape(2.3, 2.3 - 0.01j)) == pytest.approx(100.0)

    def test_half_width_and_area(self):
        """Test the Lorentzian width and its integral over ±20Γ."""
        gamma = 0.01
        center = 2.3
        amp = PathwayAmplitude(
            1.0, 2.0 - 1j * gamma, 0j, center - 1j * gamma, False, NR
        )
        omega = np.linspace(center - 20 * gamma, center + 20 * gamma, 8001)
        row = evaluate_grid([amp], [2.0], omega, 0.0, NR, workers=1)[0]
        profile = np.abs(row) ** 2 * gamma**2

        spacing = omega[1] - omega[0]
        width = np.count_nonzero(profile >= 0.5 * profile.max()) * spacing
        assert abs(width - 2 * gamma) <= 2 * spacing

        area = lorentzian_area(profile, omega)
        assert area == pytest.approx(2 / gamma * math.atan(20.0), rel=1e-3)

    def test_layouts(self):
        """Test which intervals each experiment transforms."""
        assert layout_for(R).axis_names == ("omega1", "omega3")
        assert layout_for(TWO_Q).axis_names == ("omega2", "omega3")
        assert layout_for(TWO_Q).fixed == 0


class TestStickSpectrum:
    """Test zero-width spectra."""

    @pytest.mark.parametrize("kind", [R, NR])
    def test_coupled_four_peaks(self, coupled_system, kind):
        """Test the four peaks of the coupled dimer and their positions."""
        w_a, w_b = exciton_frequencies(coupled_system)
        sticks = stick_spectrum(pathway_amplitudes(coupled_system, kind), 0.0, kind)
        assert len(sticks.peaks) == 4
        sign = -1.0 if kind is R else 1.0
        for w1 in (w_a, w_b):
            for w3 in (w_a, w_b):
                peak = sticks.find(sign * w1, w3)
                assert peak.omega1 == pytest.approx(sign * w1, abs=1e-12)
                assert peak.omega3 == pytest.approx(w3, abs=1e-12)

    @pytest.mark.parametrize("kind", ["rephasing", "nonrephasing"])
    @pytest.mark.parametrize("tau2", [0.0, 37.0, 118.5])
    def test_amplitudes_match_closed_form(self, coupled_system, kind, tau2):
        """Test every peak amplitude against the four-peak closed form."""
        experiment = ExperimentKind(kind)
        sticks = stick_spectrum(pathway_amplitudes(coupled_system, experiment), tau2)
        for expected in dimer_stick_peaks_gamma0(coupled_system, kind, tau2):
            found = sticks.find(expected.omega1, expected.omega3)
            assert found.amplitude == pytest.approx(expected.amplitude, abs=1e-10)

    @pytest.mark.parametrize("kind", [R, NR])
    def test_uncoupled_two_peaks(self, uncoupled, kind):
        """Test that independent sites leave only the diagonal peaks, each 2μ⁴."""
        system, _ = uncoupled
        w_a, w_b = exciton_frequencies(system)
        sticks = stick_spectrum(pathway_amplitudes(system, kind), 25.0, kind)
        assert len(sticks.peaks) == 2
        sign = -1.0 if kind is R else 1.0
        assert sticks.find(sign * w_a, w_a).amplitude == pytest.approx(2 * 1.2**4)
        assert sticks.find(sign * w_b, w_b).amplitude == pytest.approx(2 * 0.7**4)

    def test_uncoupled_two_quantum_empty(self, uncoupled):
        """Test that the two-quantum sticks of independent sites cancel."""
        system, _ = uncoupled
        sticks = stick_spectrum(pathway_amplitudes(system, TWO_Q), 0.0, TWO_Q)
        assert sticks.peaks == ()
        assert sticks.axes == ("omega2", "omega3")

    def test_two_quantum_shares_omega_f(self, coupled_system):
        """Test that two-quantum peaks sit at ω2 = ω_f."""
        sticks = stick_spectrum(pathway_amplitudes(coupled_system, TWO_Q), 0.0, TWO_Q)
        assert len(sticks.peaks) == 2
        for peak in sticks.peaks:
            assert peak.omega1 == pytest.approx(coupled_system.energies[3], abs=1e-12)

    def test_rephasing_diagonal_static(self, coupled_system):
        """Test that rephasing diagonal peaks do not evolve with τ2."""
        w_a, _ = exciton_frequencies(coupled_system)
        amps = pathway_amplitudes(coupled_system, R)
        early = stick_spectrum(amps, 0.0).find(-w_a, w_a).amplitude
        late = stick_spectrum(amps, 77.0).find(-w_a, w_a).amplitude
        assert late == pytest.approx(early, abs=1e-12)

    def test_biexciton_shift_moves_esa(self):
        """Test that only excited-state absorption moves, by the biexciton shift."""
        plain, _ = dimer_from_energies(1540.0, 1546.0, J=1.0, mu_a=1.0, mu_b=0.6)
        shifted, _ = dimer_from_energies(
            1540.0, 1546.0, J=1.0, mu_a=1.0, mu_b=0.6, biexciton_shift=1.5
        )
        shift = 1.5 / 658.2119
        pairs = zip(
            pathway_amplitudes(plain, R), pathway_amplitudes(shifted, R), strict=True
        )
        moved = 0
        for before, after in pairs:
            assert before.pathway is not None
            if classify_pathway(before.pathway) is PathwayClass.ESA:
                assert after.omega3.real - before.omega3.real == pytest.approx(
                    -shift, abs=1e-12
                )
                moved += 1
            else:
                assert after.omega3 == before.omega3
        assert moved == 4

    def test_find_reports_missing_peak(self, coupled_system):
        """Test the lookup error away from every peak."""
        sticks = stick_spectrum(pathway_amplitudes(coupled_system, R), 0.0)
        with pytest.raises(PeakNotFoundError):
            sticks.find(-1.0, 1.0)

    def test_broadened_input_rejected(self, dephasing_system):
        """Test that linewidths on transformed intervals are refused."""
        with pytest.raises(SpectrumModeError):
            stick_spectrum(pathway_amplitudes(dephasing_system, R), 0.0)

    def test_mixed_kinds_rejected(self, coupled_system):
        """Test that amplitudes must share one experiment kind."""
        amps = pathway_amplitudes(coupled_system, R) + pathway_amplitudes(
            coupled_system, NR
        )
        with pytest.raises(ConfigError):
            stick_spectrum(amps)

    def test_to_dict(self, coupled_system):
        """Test the JSON form of a stick spectrum."""
        record = stick_spectrum(pathway_amplitudes(coupled_system, NR), 10.0).to_dict()
        assert record["kind"] == "nonrephasing"
        assert record["tau_fixed"] == 10.0
        assert len(record["peaks"]) == 4
        assert set(record["peaks"][0]["amplitude"]) == {"re", "im"}


class TestSpectrumGrid:
    """Test broadened spectra on frequency grids."""

    def test_rephasing_axis_negated(self, dephasing_system):
        """Test that the rephasing first axis is the reversed, negated range."""
        amps = pathway_amplitudes(dephasing_system, R)
        grid = spectrum_grid(amps, small_grid(), 0.0, R)
        expected = -small_grid().first_axis()[::-1]
        np.testing.assert_array_equal(grid.omega_first, expected)
        assert grid.omega_first[0] < grid.omega_first[-1] < 0
        assert grid.values.shape == (21, 21)

    def test_zero_width_rejected(self, coupled_system):
        """Test that a grid refuses unbroadened pathways."""
        with pytest.raises(SpectrumModeError, match="nonzero linewidth"):
            spectrum_grid(pathway_amplitudes(coupled_system, R), small_grid(), 0.0, R)

    def test_axes_must_fit_kind(self, dephasing_system):
        """Test that (ω2, ω3) axes are reserved for two-quantum spectra."""
        spec = FrequencyGridSpec(
            omega_min=2.0, omega_max=2.8, n_points=5, axes=GridAxes.OMEGA2_OMEGA3
        )
        with pytest.raises(ConfigError, match="do not fit"):
            spectrum_grid(pathway_amplitudes(dephasing_system, R), spec, 0.0, R)

    def test_two_quantum_default_first_axis(self):
        """Test that the two-quantum first axis spans twice the window."""
        spec = FrequencyGridSpec(
            omega_min=2.0, omega_max=2.8, n_points=5, axes=GridAxes.OMEGA2_OMEGA3
        )
        assert spec.first_axis()[0] == 4.0
        assert spec.first_axis()[-1] == 5.6

    @pytest.mark.parametrize("kind", [R, NR])
    @pytest.mark.parametrize("gamma, rel", [(1e-4, 1e-2), (1e-3, 5e-2)])
    def test_converges_to_sticks(self, coupled_system, kind, gamma, rel):
        """Test Γ² times the grid value at each stick against its amplitude."""
        sticks = stick_spectrum(pathway_amplitudes(coupled_system, kind), 0.0, kind)
        narrow = set_rates(coupled_system, [gamma / 2] * 4, population_relaxation=False)
        amps = pathway_amplitudes(narrow, kind)
        scale = max(abs(p.amplitude) for p in sticks.peaks)
        for peak in sticks.peaks:
            value = evaluate_grid(amps, [peak.omega1], [peak.omega3], 0.0, kind)[0, 0]
            assert abs(gamma**2 * value - peak.amplitude) <= rel * scale

    def test_peak_position_within_one_cell(self, coupled_system):
        """Test that the grid maximum of a diagonal peak lands on the stick."""
        w_a, _ = exciton_frequencies(coupled_system)
        narrow = set_rates(coupled_system, [5e-4] * 4, population_relaxation=False)
        spec = FrequencyGridSpec(
            omega_min=w_a - 0.01,
            omega_max=w_a + 0.01,
            n_points=201,
            first_min=w_a - 0.01,
            first_max=w_a + 0.01,
        )
        grid = spectrum_grid(pathway_amplitudes(narrow, R), spec, 0.0, R)
        i, j = np.unravel_index(np.argmax(np.abs(grid.values)), grid.values.shape)
        cell = spec.third_axis()[1] - spec.third_axis()[0]
        assert abs(grid.omega_first[i] + w_a) <= cell
        assert abs(grid.omega_third[j] - w_a) <= cell

    def test_worker_count_does_not_change_values(self, dephasing_system):
        """Test that row blocks give identical sums for any worker count."""
        amps = pathway_amplitudes(dephasing_system, NR)
        axis = BAND_GRID.third_axis()
        single = evaluate_grid(amps, axis, axis, 40.0, NR, workers=1)
        pooled = evaluate_grid(amps, axis, axis, 40.0, NR, workers=4)
        np.testing.assert_array_equal(single, pooled)

    def test_channels(self, dephasing_system):
        """Test real, imaginary and magnitude channels."""
        amps = pathway_amplitudes(dephasing_system, NR)
        grid = spectrum_grid(amps, small_grid(), 0.0, NR)
        np.testing.assert_array_equal(grid.channel("real"), grid.values.real)
        np.testing.assert_array_equal(grid.channel("abs"), np.abs(grid.values))
        with pytest.raises(ConfigError, match="Unknown grid channel"):
            grid.channel("phase")


class TestFullFourier:
    """Test the sum of flipped rephasing and nonrephasing grids."""

    def _grids(self, system, tau2=0.0, spec=BAND_GRID):
        rephasing = spectrum_grid(pathway_amplitudes(system, R), spec, tau2, R)
        nonrephasing = spectrum_grid(pathway_amplitudes(system, NR), spec, tau2, NR)
        return rephasing, nonrephasing

    def test_zero_nonrephasing_gives_flipped_rephasing(self, dephasing_system):
        """Test that the sum reduces to the flipped rephasing grid."""
        rephasing, _ = self._grids(dephasing_system, spec=small_grid())
        empty = spectrum_grid([], small_grid(), 0.0, NR)
        total = full_fourier(rephasing, empty)
        assert total.kind == FULL_FOURIER
        np.testing.assert_array_equal(total.values, rephasing.values[::-1, :])
        np.testing.assert_array_equal(total.omega_first, small_grid().first_axis())

    def test_four_peaks(self, dephasing_system):
        """Test four peaks well above the background, the α diagonal strongest."""
        total = full_fourier(*self._grids(dephasing_system))
        w_a, w_b = exciton_frequencies(dephasing_system)
        peaks = {
            (x, y): abs(total.value_at(x, y)) for x in (w_a, w_b) for y in (w_a, w_b)
        }
        background = abs(total.value_at(2.0, 2.8))
        assert min(peaks.values()) > 5 * background
        assert max(peaks, key=peaks.get) == (w_a, w_a)

    def test_mismatched_grids_rejected(self, dephasing_system):
        """Test that delays and argument order are checked."""
        rephasing, _ = self._grids(dephasing_system, spec=small_grid())
        _, late = self._grids(dephasing_system, tau2=10.0, spec=small_grid())
        with pytest.raises(ConfigError, match="do not match"):
            full_fourier(rephasing, late)
        with pytest.raises(ConfigError, match="rephasing grid"):
            full_fourier(late, rephasing)

    @settings(max_examples=10, deadline=None)
    @given(factor=st.floats(min_value=0.1, max_value=10.0))
    def test_linear_in_amplitudes(self, factor):
        """Test that scaling every amplitude scales the sum."""
        system, _ = build_system(DEPHASING_DIMER)
        spec = small_grid()
        base = full_fourier(
            spectrum_grid(pathway_amplitudes(system, R), spec, 0.0, R),
            spectrum_grid(pathway_amplitudes(system, NR), spec, 0.0, NR),
        )

        def scaled_amplitudes(kind):
            return [
                replace(a, amp=a.amp * factor) for a in pathway_amplitudes(system, kind)
            ]

        scaled = full_fourier(
            spectrum_grid(scaled_amplitudes(R), spec, 0.0, R),
            spectrum_grid(scaled_amplitudes(NR), spec, 0.0, NR),
        )
        atol = 1e-12 * factor * np.abs(base.values).max()
        np.testing.assert_allclose(
            scaled.values, factor * base.values, rtol=1e-10, atol=atol
        )


class TestWaitingTimeTrace:
    """Test τ2 traces at fixed peak positions."""

    TAUS = np.arange(0.0, 500.0, 1.0)

    def test_rephasing_diagonal_constant(self, coupled):
        """Test the unbroadened rephasing diagonal trace."""
        system, report = coupled
        w_a = report.omega_alpha
        amps = pathway_amplitudes(system, R)
        trace = waiting_time_trace(amps, (-w_a, w_a), self.TAUS)
        np.testing.assert_allclose(trace, 2 * report.mu_alpha_g**4, atol=1e-12)

    def test_rephasing_cross_oscillates(self, coupled):
        """Test the cross-peak beat at ω_βα."""
        system, report = coupled
        w_a, w_b = report.omega_alpha, report.omega_beta
        amps = pathway_amplitudes(system, R)
        trace = waiting_time_trace(amps, (-w_a, w_b), self.TAUS)
        assert np.ptp(trace.real) > 0.5

        signal = trace - trace.mean()
        spectrum = np.abs(np.fft.fft(signal))
        frequencies = 2 * np.pi * np.fft.fftfreq(self.TAUS.size, d=1.0)
        beat = abs(frequencies[int(np.argmax(spectrum))])
        assert abs(beat - report.omega_beta_alpha) <= 2 * np.pi / self.TAUS.size

    def test_cross_peaks_share_cosine(self, coupled):
        """Test that both rephasing cross peaks carry the same cosine beat."""
        system, report = coupled
        w_a, w_b = report.omega_alpha, report.omega_beta
        amps = pathway_amplitudes(system, R)
        upper = waiting_time_trace(amps, (-w_a, w_b), self.TAUS)
        lower = waiting_time_trace(amps, (-w_b, w_a), self.TAUS)
        np.testing.assert_allclose(
            (upper - upper[0]).real, (lower - lower[0]).real, atol=1e-9
        )

    def test_nonrephasing_cross_constant(self, coupled):
        """Test that unbroadened nonrephasing cross peaks do not evolve."""
        system, report = coupled
        w_a, w_b = report.omega_alpha, report.omega_beta
        amps = pathway_amplitudes(system, NR)
        for peak in ((w_a, w_b), (w_b, w_a)):
            trace = waiting_time_trace(amps, peak, self.TAUS)
            assert abs(trace[0]) > 0.1
            np.testing.assert_allclose(trace, trace[0], rtol=0, atol=1e-10)

    def test_nonrephasing_diagonal_beat(self, coupled):
        """Test that the oscillating part of the diagonal beats at ω_βα."""
        system, report = coupled
        w_a = report.omega_alpha
        amps = pathway_amplitudes(system, NR)
        trace = waiting_time_trace(
            amps, (w_a, w_a), self.TAUS, oscillating_only=True
        )
        assert np.ptp(trace.real) > 0.5
        spectrum = np.abs(np.fft.fft(trace))
        frequencies = 2 * np.pi * np.fft.fftfreq(self.TAUS.size, d=1.0)
        beat = abs(frequencies[int(np.argmax(spectrum))])
        assert abs(beat - report.omega_beta_alpha) <= 2 * np.pi / self.TAUS.size

    def test_nonrephasing_diagonals_in_phase(self, coupled):
        """Test that both nonrephasing diagonal peaks oscillate in phase."""
        system, report = coupled
        w_a, w_b = report.omega_alpha, report.omega_beta
        amps = pathway_amplitudes(system, NR)
        alpha = waiting_time_trace(amps, (w_a, w_a), self.TAUS)
        beta = waiting_time_trace(amps, (w_b, w_b), self.TAUS)
        assert np.ptp(alpha.real) > 0.5
        np.testing.assert_allclose(
            (alpha - alpha[0]).real, (beta - beta[0]).real, atol=1e-9
        )

    def test_decoherence_time(self, dephasing_system):
        """Test that the oscillating cross-peak envelope decays in 1/Γ_αβ."""
        w_a, w_b = exciton_frequencies(dephasing_system)
        taus = np.arange(0.0, 151.0, 1.0)
        trace = waiting_time_trace(
            pathway_amplitudes(dephasing_system, R),
            (-w_a, w_b),
            taus,
            mode="grid",
            oscillating_only=True,
        )
        assert envelope_decay_time(taus, trace) == pytest.approx(50.0, rel=0.05)

    def test_grid_mode_needs_width(self, coupled_system):
        """Test that grid traces refuse unbroadened pathways."""
        w_a, _ = exciton_frequencies(coupled_system)
        with pytest.raises(SpectrumModeError):
            waiting_time_trace(
                pathway_amplitudes(coupled_system, R), (-w_a, w_a), [0.0], mode="grid"
            )

    def test_invalid_requests(self, coupled_system):
        """Test negative delays, two-quantum input and missing peaks."""
        w_a, _ = exciton_frequencies(coupled_system)
        amps = pathway_amplitudes(coupled_system, R)
        with pytest.raises(ConfigError, match="non-negative"):
            waiting_time_trace(amps, (-w_a, w_a), [-1.0, 0.0])
        with pytest.raises(ConfigError, match="rephasing and nonrephasing"):
            waiting_time_trace(
                pathway_amplitudes(coupled_system, TWO_Q), (5.0, w_a), [0.0]
            )
        with pytest.raises(PeakNotFoundError):
            waiting_time_trace(amps, (-1.0, 1.0), [0.0])

    def test_decay_fit_rejects_growth(self):
        """Test that a growing envelope has no decay time."""
        taus = np.arange(10.0)
        with pytest.raises(ConfigError, match="does not decay"):
            envelope_decay_time(taus, np.exp(0.1 * taus))


class TestFFTSpectrum:
    """Test the exact grid against a numerical FFT of the time signal."""

    @pytest.mark.parametrize("kind", [R, NR])
    def test_matches_exact_grid(self, coupled_system, kind):
        """Test agreement within 1% over the exciton band."""
        broad = set_rates(coupled_system, [0.025] * 4, population_relaxation=False)
        amps = pathway_amplitudes(broad, kind)
        numeric = fft_spectrum(amps, 0.0, kind, n_samples=1024, dt=0.5)
        exact = evaluate_grid(amps, numeric.omega_first, numeric.omega_third, 0.0, kind)

        sign = -1.0 if kind is R else 1.0
        rows = (sign * numeric.omega_first >= 2.0) & (sign * numeric.omega_first <= 2.8)
        cols = (numeric.omega_third >= 2.0) & (numeric.omega_third <= 2.8)
        window = np.ix_(rows, cols)
        error = np.abs(numeric.values[window] - exact[window]).max()
        assert error <= 1e-2 * np.abs(exact[window]).max()

    def test_axis(self, coupled_system):
        """Test the shifted FFT frequency axis."""
        broad = set_rates(coupled_system, [0.025] * 4, population_relaxation=False)
        numeric = fft_spectrum(pathway_amplitudes(broad, NR), 0.0, NR, n_samples=64)
        assert numeric.omega_first[0] == pytest.approx(-np.pi)
        assert numeric.omega_first[1] - numeric.omega_first[0] == pytest.approx(
            2 * np.pi / 64
        )

    @pytest.mark.parametrize("n_samples, dt", [(63, 1.0), (0, 1.0), (64, 0.0)])
    def test_invalid_sampling(self, coupled_system, n_samples, dt):
        """Test that odd sizes and non-positive steps are rejected."""
        with pytest.raises(ConfigError):
            amps = pathway_amplitudes(coupled_system, NR)
            fft_spectrum(amps, 0.0, NR, n_samples=n_samples, dt=dt)
