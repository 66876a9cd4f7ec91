import math

import numpy as np
import pytest

from erasim.core import (
    TWO_PI,
    DualRailState,
    MeasurementRecord,
    Sector,
    dual_rail_gap,
    params_from_dict,
    params_to_dict,
    table_defaults,
    validate,
)


class TestValidate:
    def test_device_params_valid(self):
        # eta_eff = 0.125, chi/2pi = -4.25 MHz, kappa_gg/2pi = 12.4 MHz
        assert validate(table_defaults()).ok

    def test_zero_efficiency_invalid(self):
        params = table_defaults().replace(eta_eff=0.0)
        report = validate(params)
        assert not report.ok
        assert any("eta_eff" in v for v in report.violations)

    def test_mismatch_regime_violation(self):
        params = table_defaults()
        report = validate(params.replace(chi_dr=2 * params.chi))
        assert not report.ok
        assert any("chi_dr" in v for v in report.violations)

    def test_reports_every_violation(self):
        params = table_defaults().replace(
            eta_eff=0.7, readout_degradation=0.5, mist_prob_per_check=1.0
        )
        assert len(validate(params).violations) == 3

    def test_pure(self):
        params = table_defaults().replace(eta_eff=0.0)
        assert validate(params) == validate(params)

    def test_raise_if_invalid(self):
        with pytest.raises(ValueError, match="eta_eff"):
            validate(table_defaults().replace(eta_eff=0)).raise_if_invalid()


class TestDualRailGap:
    def test_zero_detuning_gives_bare_gap(self):
        g = TWO_PI * 10e6
        assert dual_rail_gap(g, 0.0) == 2 * g

    def test_device_gap(self):
        # g = Omega_DR / 2 at the operating point
        gap = dual_rail_gap(TWO_PI * 47.075e6, 0.0)
        assert gap == pytest.approx(TWO_PI * 94.15e6, rel=1e-12)

    def test_sqrt3_point(self):
        # delta = 2g sqrt(3) doubles the gap: sqrt(4g^2 + 12g^2) = 4g
        g = TWO_PI * 5e6
        assert dual_rail_gap(g, 2 * g * math.sqrt(3)) == pytest.approx(4 * g, rel=1e-12)

    def test_even_and_monotone(self):
        g = TWO_PI * 47e6
        deltas = TWO_PI * np.linspace(0, 20e6, 50)
        gaps = np.array([dual_rail_gap(g, d) for d in deltas])
        gaps_neg = np.array([dual_rail_gap(g, -d) for d in deltas])
        assert np.array_equal(gaps, gaps_neg)
        assert np.all(np.diff(gaps) >= 0)

    def test_flat_at_zero(self):
        # first derivative at delta = 0 vanishes (quadratic suppression)
        g = TWO_PI * 47e6
        h = g * 1e-7
        derivative = (dual_rail_gap(g, h) - dual_rail_gap(g, -h)) / (2 * h)
        assert abs(derivative) < 1e-6

    def test_rejects_nonpositive_g(self):
        with pytest.raises(ValueError):
            dual_rail_gap(0.0, 1.0)


class TestConfigRoundTrip:
    def test_hz_ingestion(self):
        params = params_from_dict({**params_to_dict(table_defaults())})
        assert params == table_defaults()
        assert params.chi == pytest.approx(TWO_PI * -4.25e6)

    def test_unknown_key_named(self):
        with pytest.raises(KeyError, match="chi_wrong"):
            params_from_dict({"chi_wrong": 1.0})

    def test_round_trip_identity(self):
        params = table_defaults()
        assert params_from_dict(params_to_dict(params)) == params


class TestDomainTypes:
    def test_bloch_norm_enforced(self):
        with pytest.raises(ValueError, match="norm"):
            DualRailState.logical(1.0, 1.0, 1.0)

    def test_nonlogical_bloch_zeroed(self):
        state = DualRailState(Sector.ERASED, np.array([1.0, 0, 0]))
        assert np.array_equal(state.bloch, np.zeros(3))

    def test_record_duration(self):
        record = MeasurementRecord(np.zeros(100, dtype=complex), dt=2e-9)
        assert record.duration == pytest.approx(200e-9)
        assert len(record.times) == 100

    def test_record_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            MeasurementRecord(np.zeros(4, dtype=complex), dt=0.0)

    def test_immutable(self):
        record = MeasurementRecord(np.zeros(4, dtype=complex), dt=1e-9)
        with pytest.raises(ValueError):
            record.samples[0] = 1.0
