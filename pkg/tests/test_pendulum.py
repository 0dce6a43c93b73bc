import math
import warnings

import numpy as np
import pytest
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from gupmech.pendulum import (SERIES_LIMIT, PendulumSpec, PeriodDataset, SeriesValidityWarning,
                              agm, ellipk, exact_period, fit_pendulum_beta0, gup_coefficient,
                              gup_period_deviation, model_period, read_period_csv,
                              synthetic_dataset, write_period_csv)
from gupmech.physics import GupModel

PENDULUM = PendulumSpec(6.0, 1.0, 9.81)
T0 = 2.00606668071064744  # 2 pi sqrt(1 / 9.81)
GUP_COEFF = 8.29543113230771  # (2 pi m L / (Mp c T0))^2, 30-digit evaluation


class TestSpec:
    def test_small_angle_period(self):
        assert PENDULUM.T0 == pytest.approx(T0, rel=1e-12)

    @pytest.mark.parametrize("field", ["mass", "length", "gravity"])
    def test_positive_fields(self, field):
        kw = {"mass": 1.0, "length": 1.0, "gravity": 9.81, field: 0.0}
        with pytest.raises(ValueError, match=field):
            PendulumSpec(**kw)


class TestEllipticPeriod:
    def test_agm_known_value(self):
        # Gauss's constant 1 / agm(1, sqrt 2)
        assert 1 / agm(1.0, math.sqrt(2.0)) == pytest.approx(0.8346268416740731, rel=1e-15)

    @given(st.floats(0.0, 0.999999))
    def test_ellipk_matches_scipy(self, k):
        assert ellipk(k) == pytest.approx(scipy.special.ellipk(k * k), rel=1e-13)

    def test_zero_amplitude(self):
        assert exact_period(PENDULUM, 0.0) == pytest.approx(T0, rel=1e-15)

    def test_quarter_turn(self):
        assert exact_period(PENDULUM, math.pi / 2) / T0 == pytest.approx(1.18034, abs=1e-5)
        assert exact_period(PENDULUM, math.pi / 2) / T0 == pytest.approx(1.180340599016096, rel=1e-13)

    def test_one_degree(self):
        assert exact_period(PENDULUM, math.radians(1)) / T0 - 1 == pytest.approx(1.904e-5, abs=1e-8)

    @pytest.mark.parametrize("theta", [math.pi, 4.0, -0.1])
    def test_rotational_regime_rejected(self, theta):
        with pytest.raises(ValueError):
            exact_period(PENDULUM, theta)

    @given(st.floats(0.0, 3.1), st.floats(1e-4, 0.04))
    def test_strictly_increasing(self, a, d):
        assert exact_period(PENDULUM, a + d) > exact_period(PENDULUM, a)


class TestSeries:
    def test_matches_elliptic_below_0p3(self):
        th = np.linspace(0.0, 0.3, 100)
        exact = np.array([exact_period(PENDULUM, t) / T0 - 1 for t in th])
        assert np.max(np.abs(gup_period_deviation(PENDULUM, GupModel(0.0), th) - exact)) < 1e-6

    def test_matches_elliptic_to_validity_limit(self):
        th = np.linspace(0.3, SERIES_LIMIT, 50)
        exact = np.array([exact_period(PENDULUM, t) / T0 - 1 for t in th])
        assert np.max(np.abs(gup_period_deviation(PENDULUM, GupModel(0.0), th) - exact)) < 1e-4

    def test_zero_amplitude(self):
        assert gup_period_deviation(PENDULUM, GupModel(1e-4), 0.0) == 0.0

    def test_gup_coefficient(self):
        assert gup_coefficient(PENDULUM) == pytest.approx(GUP_COEFF, rel=1e-12)
        assert gup_coefficient(PENDULUM) == pytest.approx(8.3, rel=0.01)

    def test_beta0_depresses_theta_squared_coefficient(self):
        th = 0.01
        base = gup_period_deviation(PENDULUM, GupModel(0.0), th)
        gup = gup_period_deviation(PENDULUM, GupModel(1e-4), th)
        assert (base - gup) / th**2 == pytest.approx(8.3e-4, rel=0.01)

    @given(st.floats(1e-8, 1e3), st.floats(1e-3, SERIES_LIMIT))
    def test_gup_always_softens(self, beta0, theta):
        assert gup_period_deviation(PENDULUM, GupModel(beta0), theta) < gup_period_deviation(
            PENDULUM, GupModel(0.0), theta)

    def test_warns_outside_validity(self):
        with pytest.warns(SeriesValidityWarning):
            gup_period_deviation(PENDULUM, GupModel(0.0), 0.6)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            gup_period_deviation(PENDULUM, GupModel(0.0), np.array([0.1, 0.5]))

    def test_model_switches_to_exact_form(self):
        th = np.array([0.2, 1.0])
        model = model_period(PENDULUM, T0, 0.0, th)
        assert model[1] == pytest.approx(exact_period(PENDULUM, 1.0), rel=1e-14)
        assert model[0] == pytest.approx(T0 * (1 + 0.04 / 16 + 11 / 3072 * 0.2**4), rel=1e-15)


class TestFit:
    def test_null_dataset_bound_order(self):
        fit = fit_pendulum_beta0(PENDULUM, synthetic_dataset(PENDULUM))
        assert fit.converged
        assert abs(fit["beta0_best"]) < 3 * fit.sigma("beta0_best")
        assert fit["beta0_upper"] <= 1e-4
        assert fit["T0_fitted"] == pytest.approx(T0, rel=1e-6)

    def test_injected_beta0_recovered(self):
        fit = fit_pendulum_beta0(PENDULUM, synthetic_dataset(PENDULUM, beta0=5e-4))
        assert fit["beta0_best"] == pytest.approx(5e-4, rel=0.20)

    def test_noiseless_exact_recovery(self):
        fit = fit_pendulum_beta0(PENDULUM, synthetic_dataset(PENDULUM, beta0=5e-4, seed=None))
        assert fit["beta0_best"] == pytest.approx(5e-4, rel=1e-3)

    def test_identical_angles_not_converged(self):
        data = PeriodDataset(np.full(10, 0.1), np.full(10, T0), np.full(10, 1e-6))
        assert not fit_pendulum_beta0(PENDULUM, data).converged

    def test_too_few_points_not_converged(self):
        data = synthetic_dataset(PENDULUM, n=4)
        assert not fit_pendulum_beta0(PENDULUM, data).converged

    @given(st.floats(0.01, 100.0))
    def test_sigma_rescaling_invariance(self, factor):
        data = synthetic_dataset(PENDULUM, seed=7)
        base = fit_pendulum_beta0(PENDULUM, data)
        scaled = fit_pendulum_beta0(PENDULUM, PeriodDataset(data.theta0, data.period,
                                                            data.sigma * factor))
        # the model is bilinear in (T0, beta0): agreement to the solver's stopping tolerance
        sig = base.sigma("beta0_best")
        assert abs(scaled["beta0_best"] - base["beta0_best"]) < 1e-4 * sig
        assert scaled.sigma("beta0_best") == pytest.approx(factor * sig, rel=1e-4)

    def test_sigma_calibrated(self):
        z = []
        for seed in range(100):
            fit = fit_pendulum_beta0(PENDULUM, synthetic_dataset(PENDULUM, seed=seed))
            z.append(fit["beta0_best"] / fit.sigma("beta0_best"))
        z = np.abs(z)
        assert 54 <= np.sum(z < 1) <= 82
        assert np.sum(z < 2) >= 88


class TestDataset:
    def test_invariants(self):
        with pytest.raises(ValueError):
            PeriodDataset([0.0], [2.0], [1e-6])
        with pytest.raises(ValueError):
            PeriodDataset([0.1], [2.0], [0.0])
        with pytest.raises(ValueError):
            PeriodDataset([0.1, 0.2], [2.0], [1e-6])

    def test_csv_round_trip(self, tmp_path):
        data = synthetic_dataset(PENDULUM, seed=3)
        write_period_csv(data, tmp_path / "d.csv")
        back = read_period_csv(tmp_path / "d.csv")
        for name in ("theta0", "period", "sigma"):
            assert getattr(back, name).tobytes() == getattr(data, name).tobytes()

    def test_malformed_row_named(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("theta0_rad,period_s,sigma_s\n0.1,2.0,1e-6\n0.2,2.0\n")
        with pytest.raises(ValueError, match="row 3"):
            read_period_csv(p)

    def test_wrong_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("theta,period\n0.1,2.0\n")
        with pytest.raises(ValueError, match="header"):
            read_period_csv(p)
