import math

import numpy as np
import pytest

from erasim.classifier import (
    BinaryLabel,
    Boxcar,
    CircularLabel,
    ClassifierConfig,
    MatchedFilter,
    binary_flags,
    calibrate,
    circular_flags,
    classify_binary,
    classify_circular,
    estimate_snr,
    integrate,
    matched_filter_template,
    missed_erasure_fraction,
)
from erasim.core import MeasurementRecord
from erasim.dispersive import separation_error


def gaussian_points(gen, mean, sigma, n):
    return mean + sigma * (gen.standard_normal(n) + 1j * gen.standard_normal(n))


def snr_ensembles(gen, snr, n, sigma=1.0):
    """Two isotropic Gaussian clouds separated along the real axis at the
    requested SNR (= d^2 / 2 sigma^2)."""
    d = sigma * math.sqrt(2 * snr)
    a = gaussian_points(gen, 0.0, sigma, n)
    b = gaussian_points(gen, d, sigma, n)
    return a, b


class TestIntegrate:
    def test_constant_record_boxcar(self):
        record = MeasurementRecord(np.full(100, 2 - 1j), dt=1e-9)
        config = calibrate_from(np.array([0j]), np.array([1.0 + 0j]))
        config = ClassifierConfig(Boxcar(10e-9), config.projection_axis, 0.0)
        points = integrate(record, config)
        assert len(points) == 10
        assert np.allclose(points, 2 - 1j)

    def test_partial_tail_dropped(self):
        record = MeasurementRecord(np.arange(25, dtype=complex), dt=1e-9)
        config = ClassifierConfig(Boxcar(10e-9), 1 + 0j, 0.0)
        assert len(integrate(record, config)) == 2

    def test_short_record_rejected(self):
        record = MeasurementRecord(np.zeros(5, dtype=complex), dt=1e-9)
        config = ClassifierConfig(Boxcar(10e-9), 1 + 0j, 0.0)
        with pytest.raises(ValueError, match="window"):
            integrate(record, config)

    def test_matched_filter_single_point(self):
        record = MeasurementRecord(np.ones(16, dtype=complex), dt=1e-9)
        kernel = MatchedFilter(np.ones(16, dtype=complex), dt=1e-9)
        config = ClassifierConfig(kernel, 1 + 0j, 0.0)
        points = integrate(record, config)
        assert points.shape == (1,)
        assert points[0] == pytest.approx(1.0)

    def test_matched_filter_beats_boxcar_on_transient(self, device_params, rng):
        # A check whose separation rings up and rings down is integrated
        # better by the matched filter than by an equal-duration boxcar.
        from erasim.dispersive import sector_detunings
        from erasim.trajectory import generate_record

        dt = 2e-9
        drive_span = 384e-9
        total_span = 496e-9
        n = round(total_span / dt)
        times = dt * np.arange(1, n + 1)
        detunings = sector_detunings(device_params)
        paths = {}
        for name in ("erased", "logical_0"):
            pole = device_params.kappa_gg / 2 + 1j * detunings[name]
            ss = -1j * device_params.drive_amp / pole
            path = np.where(
                times <= drive_span,
                ss * (1 - np.exp(-pole * times)),
                ss
                * (1 - np.exp(-pole * drive_span))
                * np.exp(-pole * np.maximum(times - drive_span, 0)),
            )
            paths[name] = path
        n_records = 10_000
        template = MatchedFilter(paths["erased"] - paths["logical_0"], dt)
        box = ClassifierConfig(Boxcar(total_span), 1 + 0j, 0.0)
        mf = ClassifierConfig(template, 1 + 0j, 0.0)
        points = {}
        for name, path in paths.items():
            boxes, mfs = [], []
            for i in range(n_records):
                record = generate_record(path, device_params, dt, rng)
                boxes.append(integrate(record, box)[0])
                mfs.append(integrate(record, mf)[0])
            points[name] = (np.array(boxes), np.array(mfs))
        snr_box = estimate_snr(points["logical_0"][0], points["erased"][0])
        snr_mf = estimate_snr(points["logical_0"][1], points["erased"][1])
        assert snr_mf > snr_box


def calibrate_from(logical, erased):
    gen = np.random.default_rng(0)
    logical = np.concatenate([logical + 1e-3 * gen.standard_normal(40)])
    erased = np.concatenate([erased + 1e-3 * gen.standard_normal(40)])
    return calibrate(logical, erased)


class TestBinaryClassifier:
    def test_tie_breaks_toward_erased(self, rng):
        logical, erased = snr_ensembles(rng, 16.0, 500)
        config = calibrate(logical, erased)
        threshold_point = config.threshold * config.projection_axis
        assert classify_binary(threshold_point, config) is BinaryLabel.ERASED

    def test_misclassification_at_snr_11_6(self, rng):
        n = 200_000
        logical, erased = snr_ensembles(rng, 11.6, n)
        config = calibrate(logical, erased)
        fresh_l, fresh_e = snr_ensembles(rng, 11.6, n)
        expected = separation_error(11.6)
        sigma = math.sqrt(expected * (1 - expected) / n)
        false_pos = binary_flags(fresh_l, config).mean()
        false_neg = 1 - binary_flags(fresh_e, config).mean()
        assert abs(false_pos - expected) < 4 * sigma
        assert abs(false_neg - expected) < 4 * sigma

    @pytest.mark.parametrize("snr", [1.0, 4.0, 11.6, 16.1, 25.0])
    def test_error_rates_match_separation_error(self, snr):
        gen = np.random.default_rng(int(snr * 100))
        n = 100_000
        logical, erased = snr_ensembles(gen, snr, n)
        config = calibrate(logical, erased)
        fresh_l, fresh_e = snr_ensembles(gen, snr, n)
        measured = 0.5 * (
            binary_flags(fresh_l, config).mean()
            + (1 - binary_flags(fresh_e, config)).mean()
        )
        expected = separation_error(estimate_snr(fresh_l, fresh_e))
        sigma = math.sqrt(expected * (1 - expected) / (2 * n))
        assert abs(measured - expected) < 3 * sigma

    def test_threshold_shift_trades_errors_monotonically(self, rng):
        logical, erased = snr_ensembles(rng, 11.6, 50_000)
        config = calibrate(logical, erased)
        shifts = np.linspace(-1.0, 1.0, 9)
        false_pos, false_neg = [], []
        for shift in shifts:
            shifted = ClassifierConfig(
                config.kernel,
                config.projection_axis,
                config.threshold + shift,
                config.center,
                config.radius,
                config.logical_std,
            )
            false_pos.append(binary_flags(logical, shifted).mean())
            false_neg.append(1 - binary_flags(erased, shifted).mean())
        assert np.all(np.diff(false_pos) <= 0)
        assert np.all(np.diff(false_neg) >= 0)


class TestCircularClassifier:
    def test_center_is_logical(self, rng):
        logical, erased = snr_ensembles(rng, 16.0, 500)
        config = calibrate(logical, erased)
        assert classify_circular(config.center, config) is CircularLabel.LOGICAL

    def test_radius_limits(self, rng):
        logical, erased = snr_ensembles(rng, 16.0, 500)
        config = calibrate(logical, erased, radius_sigmas=1e9)
        assert not circular_flags(logical, config).any()
        tight = calibrate(logical, erased, radius_sigmas=1e-6)
        assert circular_flags(logical, tight).mean() > 0.99

    def test_false_positive_matches_gaussian_tail(self, rng):
        # Radius k sigma flags a fraction exp(-k^2/2) of true-logical
        # points (2-d isotropic Gaussian tail).
        n = 200_000
        logical, erased = snr_ensembles(rng, 25.0, n)
        for k in (1.0, 2.0, 3.0):
            config = calibrate(logical, erased, radius_sigmas=k)
            fresh = gaussian_points(rng, 0.0, 1.0, n)
            expected = math.exp(-(k**2) / 2)
            sigma = math.sqrt(expected * (1 - expected) / n)
            assert abs(circular_flags(fresh, config).mean() - expected) < 4 * sigma

    def test_leak_conversion_trade_off(self, rng):
        # 1% leaked points displaced from both clouds: tightening the
        # radius converts leakage into flagged (erasure) outcomes while
        # raising the false-positive rate; both move monotonically.
        n = 50_000
        logical, erased = snr_ensembles(rng, 16.1, n)
        leak_mean = 1.0 + 2.0j  # displaced off the separation axis
        leaked = gaussian_points(rng, leak_mean, 1.0, n // 100)
        radii = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0]
        caught, false_pos = [], []
        for k in radii:
            config = calibrate(logical, erased, radius_sigmas=k)
            caught.append(circular_flags(leaked, config).mean())
            false_pos.append(circular_flags(logical, config).mean())
        assert np.all(np.diff(caught) <= 0)
        assert np.all(np.diff(false_pos) <= 0)
        assert caught[0] > 0.9


class TestEstimateSnr:
    def test_identical_ensembles_near_zero(self, rng):
        a = gaussian_points(rng, 0.0, 1.0, 10_000)
        b = gaussian_points(rng, 0.0, 1.0, 10_000)
        assert estimate_snr(a, b) < 0.01

    def test_synthetic_gaussians_d2_sigma1(self, rng):
        n = 100_000
        a = gaussian_points(rng, 0.0, 1.0, n)
        b = gaussian_points(rng, 2.0, 1.0, n)
        snr = estimate_snr(a, b)
        assert snr == pytest.approx(2.0, rel=0.05)
        config = calibrate(a, b)
        fresh_a = gaussian_points(rng, 0.0, 1.0, n)
        empirical = binary_flags(fresh_a, config).mean()
        expected = separation_error(snr)
        sigma = math.sqrt(expected * (1 - expected) / n)
        assert abs(empirical - expected) < 3 * sigma

    def test_min_points(self):
        with pytest.raises(ValueError, match="30"):
            estimate_snr(np.zeros(10, complex), np.zeros(40, complex))

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            estimate_snr(np.zeros(40, complex), np.ones(40, complex))

    def test_linear_growth_with_window_length(self, device_params):
        # Empirical SNR grows linearly in the boxcar window on stationary
        # records (R^2 > 0.999 over 8 window lengths).
        from erasim.dispersive import sector_detunings, steady_states
        from erasim.trajectory import generate_record

        gen = np.random.default_rng(99)
        dt = 4e-9
        ss = steady_states(device_params)
        n_records = 10_000
        lengths = np.arange(1, 9) * 120e-9
        snrs = []
        max_samples = round(lengths[-1] / dt)
        for length in lengths:
            per = round(length / dt)
            pts = {}
            for name, mean in (("l", ss.alpha_logical), ("e", ss.alpha_gg)):
                noise = gen.standard_normal((n_records, per)) + 1j * gen.standard_normal(
                    (n_records, per)
                )
                sigma = 1.0 / (
                    2 * math.sqrt(device_params.eta_eff * device_params.kappa_gg * dt)
                )
                pts[name] = mean + sigma * noise.mean(axis=1)
            snrs.append(estimate_snr(pts["l"], pts["e"]))
        coeffs = np.polyfit(lengths, snrs, 1)
        fitted = np.polyval(coeffs, lengths)
        ss_res = np.sum((np.array(snrs) - fitted) ** 2)
        ss_tot = np.sum((np.array(snrs) - np.mean(snrs)) ** 2)
        assert 1 - ss_res / ss_tot > 0.999


class TestCalibrate:
    def test_swapped_labels_flip_axis_keep_decisions(self, rng):
        logical, erased = snr_ensembles(rng, 16.0, 5_000)
        config = calibrate(logical, erased)
        swapped = calibrate(erased, logical)
        assert swapped.projection_axis == pytest.approx(-config.projection_axis)
        probe = gaussian_points(rng, 2.0 + 0.5j, 1.5, 200)
        original = binary_flags(probe, config)
        flipped = ~binary_flags(probe, swapped)
        assert np.array_equal(original, flipped)

    def test_overlapping_uncalibratable(self, rng):
        a = gaussian_points(rng, 0.0, 1.0, 1_000)
        b = gaussian_points(rng, 0.05, 1.0, 1_000)
        with pytest.raises(ValueError, match="uncalibratable"):
            calibrate(a, b)

    def test_fresh_draw_error_rate(self, rng):
        n = 100_000
        logical, erased = snr_ensembles(rng, 11.6, n)
        config = calibrate(logical, erased)
        fresh_l, fresh_e = snr_ensembles(rng, 11.6, n)
        error = 0.5 * (
            binary_flags(fresh_l, config).mean()
            + (1 - binary_flags(fresh_e, config)).mean()
        )
        assert error == pytest.approx(0.008, abs=0.001)

    def test_matched_filter_template_shape(self, device_params, rng):
        from erasim.trajectory import generate_record

        dt = 2e-9
        path_l = np.zeros(100, dtype=complex)
        path_e = np.ones(100, dtype=complex)
        recs_l = [generate_record(path_l, device_params, dt, rng) for _ in range(50)]
        recs_e = [generate_record(path_e, device_params, dt, rng) for _ in range(50)]
        kernel = matched_filter_template(recs_l, recs_e)
        assert len(kernel.template) == 100
        assert np.mean(kernel.template).real == pytest.approx(1.0, abs=0.2)


class TestMissedErasureFraction:
    def test_reference_value(self):
        # 5 checks between, 2.54% erasure, 0.89% false negative: 0.11%
        assert missed_erasure_fraction(5, 0.0254, 0.0089) == pytest.approx(
            0.00113, rel=1e-2
        )

    def test_zero_false_negative(self):
        assert missed_erasure_fraction(5, 0.0254, 0.0) == 0.0

    def test_identity_case(self):
        assert missed_erasure_fraction(1, 0.3, 1.0) == 0.3

    def test_validation(self):
        with pytest.raises(ValueError):
            missed_erasure_fraction(5, 1.5, 0.1)
