import math

import numpy as np
import pytest

from wellquench import oracle, spectral, survival
from wellquench.errors import TruncationInconsistencyError
from wellquench.spectral import WellConfig, mode_coefficients, wavefunction
from wellquench.survival import (CONFINED_KERNEL_CONSTANT,
                                 CONFINED_LAW_COEFFICIENT,
                                 FREE_KERNEL_CONSTANT, FREE_LAW_COEFFICIENT,
                                 TimeSeries, asymptote_confined,
                                 asymptote_free, crossover_time,
                                 escape_integral, escape_probability_exact,
                                 escape_small_delta, regime_report,
                                 survival_amplitude)


class TestSurvivalAmplitude:
    def test_certain_at_zero(self):
        w = WellConfig(0.2)
        amp = survival_amplitude(w, 0.0, 2000)
        assert amp.imag == 0.0
        assert amp.real == pytest.approx(1.0, abs=1e-9)

    def test_full_revival(self):
        w = WellConfig(0.2)
        assert abs(survival_amplitude(w, w.period, 2000)
                   - survival_amplitude(w, 0.0, 2000)) < 1e-9

    def test_frozen_value(self):
        amp = survival_amplitude(WellConfig(0.2), 0.01, 2000)
        assert amp == pytest.approx(0.99047260172387 - 0.09306427280113741j,
                                    abs=1e-12)

    def test_matches_overlap_quadrature(self):
        # central oracle check: series amplitude vs trapezoid overlap of
        # the sampled states <psi_0 | psi_t>
        w = WellConfig(0.2)
        n_points, n_modes, t = 4096, 3000, 0.01
        initial = oracle.initial_state(w, n_points)
        coeffs = mode_coefficients(w, n_modes)
        evolved = oracle.from_samples(initial.x_grid,
                                      wavefunction(w, coeffs, initial.x_grid, t),
                                      t)
        quadrature = oracle.overlap(initial, evolved)
        series = survival_amplitude(w, t, n_modes)
        assert abs(series - quadrature) < 1e-6


class TestEscapeExact:
    def test_zero_time(self):
        for delta in (0.003, 0.2):
            assert escape_probability_exact(WellConfig(delta), 0.0, 2000) < 1e-9

    def test_revival_returns_to_zero(self):
        for delta in (0.003, 0.2):
            w = WellConfig(delta)
            assert escape_probability_exact(w, w.period, 2000) < 1e-6

    def test_frozen_values(self):
        w = WellConfig(0.003)
        expected = {
            1e-8: 1.0456310871803111e-11,
            1e-7: 3.320035247663007e-10,
            1e-4: 2.167903568806973e-06,
            1e-3: 8.29378928005292e-06,
        }
        for t, value in expected.items():
            assert escape_probability_exact(w, t, 40000) == pytest.approx(
                value, rel=1e-6)

    def test_free_law_at_short_times(self):
        w = WellConfig(0.003)
        for t in (1e-8, 1e-7):
            ratio = (escape_probability_exact(w, t, 40000)
                     / float(asymptote_free(t)))
            assert ratio == pytest.approx(1.0, abs=6e-3)

    def test_vectorized_matches_scalar(self):
        w = WellConfig(0.01)
        ts = np.array([1e-6, 1e-4, 1e-2])
        vec = escape_probability_exact(w, ts, 2000)
        for t, v in zip(ts, vec):
            assert escape_probability_exact(w, float(t), 2000) == v

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            escape_probability_exact(WellConfig(0.1), -1.0, 100)

    def test_noise_clamp_contract(self):
        from wellquench.survival import _apply_noise_clamp
        # noise-level violations are clamped
        assert _apply_noise_clamp(np.array([-1e-13]))[0] == 0.0
        # mid-range violations pass through visibly
        assert _apply_noise_clamp(np.array([-1e-10]))[0] == -1e-10
        # larger ones are an error
        with pytest.raises(TruncationInconsistencyError):
            _apply_noise_clamp(np.array([-1e-7]))


class TestEscapeSmallDelta:
    def test_zero_time(self):
        assert escape_small_delta(WellConfig(0.003), 0.0, 10000) == 0.0

    def test_agrees_with_exact_at_short_time(self):
        w = WellConfig(0.003)
        exact = escape_probability_exact(w, 1e-6, 40000)
        approx = escape_small_delta(w, 1e-6, 40000)
        assert abs(approx / exact - 1.0) < 0.01  # well inside the 10% target

    def test_slope_transition_near_crossover(self):
        w = WellConfig(0.003)
        ts = np.logspace(-7, -2, 61)
        ps = escape_small_delta(w, ts, 10**5)
        logs = np.log(ps)
        logt = np.log(ts)
        slopes = (logs[2:] - logs[:-2]) / (logt[2:] - logt[:-2])
        centers = ts[1:-1]
        early = slopes[centers < 1e-6]
        late = slopes[centers > 1e-3]
        assert early.min() > 1.4
        assert late.max() < 0.7
        # the local slope passes through 1 inside [delta^2, 10 delta^2]
        window = (centers >= w.delta**2) & (centers <= 10 * w.delta**2)
        assert np.abs(slopes[window] - 1.0).min() < 0.15


class TestEscapeIntegral:
    def test_zero_shift_and_zero_time(self):
        assert escape_integral(0.0, 1e-3) == 0.0
        assert escape_integral(0.003, 0.0) == 0.0

    def test_free_regime_matches_closed_form(self):
        # t << delta^2: the continuum escape approaches the free law
        t = 1e-8
        value = escape_integral(0.003, t)
        assert value == pytest.approx(float(asymptote_free(t)), rel=1e-4)

    def test_confined_regime_frozen_value(self):
        # t >> delta^2: approaches the confined law from below; the residual
        # 8% gap at t = 1e-3 is the genuine finite-(delta/sqrt(t)) correction
        value = escape_integral(0.003, 1e-3)
        assert value == pytest.approx(8.267678940640683e-06, rel=1e-6)
        ratio = value / float(asymptote_confined(0.003, 1e-3))
        assert 0.91 < ratio < 0.94

    def test_exact_vs_integral_cross_method(self):
        w = WellConfig(0.003)
        ts = np.logspace(-7, -3, 9)
        exact = escape_probability_exact(w, ts, 40000)
        integral = np.array([escape_integral(w.delta, float(t)) for t in ts])
        assert np.abs(integral / exact - 1.0).max() < 0.01

    def test_sandwich_against_mode_sum(self):
        w = WellConfig(0.003)
        ts = np.logspace(-8, -2, 13)
        total = escape_small_delta(w, ts, 2 * 10**5)
        integral = np.array([escape_integral(w.delta, float(t)) for t in ts])
        keep = (total > 1e-12) & (integral > 1e-12)
        assert keep.any()
        assert np.abs(integral[keep] / total[keep] - 1.0).max() < 0.10

    def test_negative_arguments_rejected(self):
        with pytest.raises(ValueError):
            escape_integral(-0.1, 1e-3)
        with pytest.raises(ValueError):
            escape_integral(0.1, -1e-3)


class TestAsymptotes:
    def test_kernel_constants_closed_forms(self):
        assert FREE_KERNEL_CONSTANT == pytest.approx(
            math.sqrt(math.pi) / (3.0 * math.sqrt(2.0)), rel=1e-15)
        assert CONFINED_KERNEL_CONSTANT == pytest.approx(
            math.sqrt(math.pi) / (2.0 * math.sqrt(2.0)), rel=1e-15)

    def test_kernel_constants_against_quadrature(self):
        # numerical integrals must reproduce the closed forms
        assert abs(oracle.adaptive_quadrature("free", tol=1e-9)
                   - FREE_KERNEL_CONSTANT) < 1e-8
        assert abs(oracle.adaptive_quadrature("confined", tol=1e-9)
                   - CONFINED_KERNEL_CONSTANT) < 1e-8

    def test_law_coefficients(self):
        assert FREE_LAW_COEFFICIENT == pytest.approx(10.499739963814946,
                                                     rel=1e-14)
        assert CONFINED_LAW_COEFFICIENT == pytest.approx(31.499219891444838,
                                                         rel=1e-14)

    def test_zero_time(self):
        assert asymptote_free(0.0) == 0.0
        assert asymptote_confined(0.01, 0.0) == 0.0

    def test_frozen_sample_points(self):
        assert float(asymptote_free(1e-4)) == pytest.approx(
            1.0499739963814947e-05, rel=1e-12)
        assert float(asymptote_confined(0.003, 1e-3)) == pytest.approx(
            8.96483514379027e-06, rel=1e-12)

    @pytest.mark.parametrize("delta", [1e-3, 0.003, 0.05])
    def test_crossover_identity(self, delta):
        t = crossover_time(delta)
        assert t == 3.0 * delta * delta
        free = float(asymptote_free(t))
        confined = float(asymptote_confined(delta, t))
        assert abs(free - confined) <= 1e-13 * free


class TestRegimeReport:
    def test_early_regime_fit(self):
        report = regime_report(0.003, (1e-8, 1e-7), (1e-2, 1e-1))
        assert report.transition_time == crossover_time(0.003)
        assert report.transition_time == 3.0 * 0.003 * 0.003
        assert report.fitted_slope_early == pytest.approx(1.5, abs=0.05)
        assert report.prefactor_early == pytest.approx(FREE_LAW_COEFFICIENT,
                                                       rel=0.05)

    def test_late_regime_fit_far_from_transition(self):
        # the confined law needs t >> delta^2 by a wide margin; a window two
        # decades past the transition shows the clean exponent
        report = regime_report(0.003, (1e-8, 1e-7), (1e-2, 1e-1))
        assert report.fitted_slope_late == pytest.approx(0.5, abs=0.05)
        assert report.prefactor_late == pytest.approx(
            CONFINED_LAW_COEFFICIENT * 0.003**2, rel=0.05)

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            regime_report(0.003, (1e-8, 1e-7), (1e-4, 1e-3),
                          points_per_window=4)


class TestInvariants:
    @pytest.mark.parametrize("delta", [0.01, 0.05, 0.2])
    def test_periodicity(self, delta):
        w = WellConfig(delta)
        ts = np.linspace(0.0, w.period, 17)
        base = escape_probability_exact(w, ts, 3000)
        shifted = escape_probability_exact(w, ts + w.period, 3000)
        assert np.abs(shifted - base).max() < 1e-8

    @pytest.mark.parametrize("delta", [0.01, 0.05, 0.2])
    def test_time_reflection_within_period(self, delta):
        w = WellConfig(delta)
        ts = np.linspace(0.01, w.period / 2, 13)
        forward = escape_probability_exact(w, ts, 3000)
        mirrored = escape_probability_exact(w, w.period - ts[::-1], 3000)
        assert np.abs(mirrored[::-1] - forward).max() < 1e-8

    @pytest.mark.parametrize("n_small", [64, 128, 256])
    def test_monotone_truncation(self, n_small):
        w = WellConfig(0.2)
        ts = np.linspace(0.0, w.period, 41)
        small = escape_probability_exact(w, ts, n_small)
        large = escape_probability_exact(w, ts, 4 * n_small)
        bound = spectral.survival_tail_bound(w, n_small)
        assert np.abs(large - small).max() <= bound


class TestTimeSeries:
    def test_validation(self):
        with pytest.raises(ValueError):
            TimeSeries(times=np.array([1.0, 0.5]), values=np.array([0.0, 0.0]),
                       meta={})
        with pytest.raises(ValueError):
            TimeSeries(times=np.array([0.0, 1.0]), values=np.array([0.0, 1.5]),
                       meta={"probability": True})

    def test_series_builder(self):
        w = WellConfig(0.003)
        series = survival.escape_series(w, np.logspace(-6, -4, 5), 4000,
                                        method="exact")
        assert series.meta["method"] == "exact"
        assert series.values.shape == (5,)
