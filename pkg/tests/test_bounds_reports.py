import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gupmech import reports
from gupmech.bounds import (BoundReport, beta0_bound_null, beta0_bound_pendulum,
                            beta0_bound_regression, summary_plot_data)
from gupmech.fits import FitResult
from gupmech.pendulum import PendulumSpec, fit_pendulum_beta0, synthetic_dataset

SAPPHIRE_BOUND = 5144930.1706  # 30-digit evaluation, 75 pm and 3.9e-5
QUARTZ_BOUND = 43135.29778551  # 1 nm and 1e-10


class TestNullBound:
    def test_sapphire(self, sapphire):
        r = beta0_bound_null(sapphire, 75e-12, 3.9e-5)
        assert r.beta0_upper == pytest.approx(SAPPHIRE_BOUND, rel=1e-9)
        # resolution set by a 5 Hz bandwidth
        rbw = beta0_bound_null(sapphire, 75e-12, 5 / 127071)
        assert rbw.beta0_upper == pytest.approx(5.2e6, rel=0.05)
        assert r.method == "null-shift" and r.mass == 0.3

    def test_quartz(self, quartz):
        r = beta0_bound_null(quartz, 1e-9, 1e-10)
        assert r.beta0_upper == pytest.approx(QUARTZ_BOUND, rel=1e-9)
        assert r.beta0_upper == pytest.approx(4.3e4, rel=0.05)

    @given(st.floats(1e-12, 1e-6), st.floats(1.01, 100.0))
    def test_decreases_with_amplitude(self, a, factor):
        from gupmech.physics import OscillatorSpec
        osc = OscillatorSpec.from_frequency("x", 0.3, 1e5, 1e7)
        assert beta0_bound_null(osc, a * factor, 1e-9).beta0_upper < beta0_bound_null(
            osc, a, 1e-9).beta0_upper

    @given(st.floats(1e-14, 1e-2))
    def test_linear_in_resolution(self, res):
        from gupmech.physics import OscillatorSpec
        osc = OscillatorSpec.from_frequency("x", 0.3, 1e5, 1e7)
        full = beta0_bound_null(osc, 1e-9, res).beta0_upper
        assert beta0_bound_null(osc, 1e-9, res / 2).beta0_upper == pytest.approx(full / 2, rel=1e-12)

    @pytest.mark.parametrize("amp,res", [(0.0, 1e-9), (1e-9, 0.0), (-1e-9, 1e-9)])
    def test_rejects_non_positive(self, sapphire, amp, res):
        with pytest.raises(ValueError):
            beta0_bound_null(sapphire, amp, res)


class TestOtherRoutes:
    def test_regression_needs_beta0(self, desk):
        fit = FitResult({"f0": 1000.0, "quadratic_coefficient": 0.0},
                        {"f0": 0.0, "quadratic_coefficient": 1.0}, 0.0, True)
        with pytest.raises(ValueError, match="beta0"):
            beta0_bound_regression(fit, desk)

    def test_pendulum_note_says_estimate(self):
        spec = PendulumSpec(6.0, 1.0, 9.81)
        fit = fit_pendulum_beta0(spec, synthetic_dataset(spec))
        r = beta0_bound_pendulum(fit, "pendulum", 6.0, 1.0)
        assert "estimate" in r.confidence_note
        assert r.beta0_upper == fit["beta0_upper"]


class TestBoundReport:
    @pytest.mark.parametrize("kw", [
        {"method": "guess"}, {"beta0_upper": 0.0}, {"beta0_upper": math.nan},
        {"mass": -1.0}])
    def test_invariants(self, kw):
        base = {"method": "null-shift", "beta0_upper": 1.0, "label": "x", "mass": 1.0}
        with pytest.raises(ValueError):
            BoundReport(**{**base, **kw})

    def test_yaml_round_trip(self, sapphire, tmp_path):
        r = beta0_bound_null(sapphire, 75e-12, 5 / 127071)
        reports.dump(reports.bound_to_dict(r), tmp_path / "b.yaml")
        assert reports.load(tmp_path / "b.yaml") == r

    def test_fit_round_trip(self, tmp_path):
        fit = FitResult({"a": 1.5, "b": -2e-30}, {"a": 0.1, "b": math.inf}, 1e-3, False,
                        "singular", {"n": 3})
        reports.dump(reports.fit_to_dict(fit, "x"), tmp_path / "f.yaml")
        assert reports.load(tmp_path / "f.yaml") == fit

    def test_version_checked(self, sapphire):
        d = reports.bound_to_dict(beta0_bound_null(sapphire, 75e-12, 1e-5))
        d["version"] = 99
        with pytest.raises(ValueError, match="version"):
            reports.bound_from_dict(d)

    def test_unknown_document(self, tmp_path):
        (tmp_path / "x.yaml").write_text("kind: other\n")
        with pytest.raises(ValueError, match="unknown"):
            reports.load(tmp_path / "x.yaml")


class TestSummary:
    def _reports(self):
        return [BoundReport("pendulum", 7e-6, "pendulum", 6.0),
                BoundReport("null-shift", 5.1e6, "sapphire", 0.3),
                BoundReport("null-shift", 4.3e4, "quartz", 5e-6)]

    def test_sorted_by_mass_with_literature(self):
        rows = summary_plot_data(self._reports(),
                                 [{"mass": 1.67e-27, "beta0_upper": 1e36, "label": "Lamb"}])
        assert [r.label for r in rows] == ["Lamb", "quartz", "sapphire", "pendulum"]
        assert [r.kind for r in rows] == ["literature", "computed", "computed", "computed"]

    def test_bound_tightens_with_mass_for_computed_points(self):
        rows = [r for r in summary_plot_data(self._reports()) if r.label != "sapphire"]
        assert rows[0].beta0_upper > rows[-1].beta0_upper

    def test_single_row(self):
        rows = summary_plot_data([BoundReport("null-shift", 1.0, "x", 1.0)])
        assert len(rows) == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summary_plot_data([])

    def test_duplicate_masses_kept_in_order(self):
        rows = summary_plot_data([BoundReport("null-shift", 2.0, "a", 1.0),
                                  BoundReport("regression", 1.0, "b", 1.0)])
        assert [r.label for r in rows] == ["a", "b"]
