import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gupmech.timeseries import TimeSeries, read_csv, write_csv
from gupmech.tracking import (RingdownRecord, read_record_csv, track_spectral_peak,
                              track_zero_crossings, write_record_csv, zero_crossings)


def tone(freq, amp=1.0, duration=1.0, rate=None, phase=0.3):
    rate = rate or 16 * freq
    t = np.arange(int(round(duration * rate))) / rate
    return TimeSeries(rate, amp * np.cos(2 * math.pi * freq * t + phase))


class TestSpectralPeak:
    def test_pure_tone_frequency(self):
        sig = tone(127070.97, 75e-12)
        coarse = track_spectral_peak(sig, 0.2, 5.0, refine=False)
        fine = track_spectral_peak(sig, 0.2, 5.0)
        assert np.all(np.abs(coarse.frequencies - 127070.97) <= 5.0)
        assert np.all(np.abs(fine.frequencies - 127070.97) <= 0.05)

    def test_constant_amplitude(self):
        rec = track_spectral_peak(tone(1234.5, 2.0, duration=2.0), 0.2, 5.0)
        np.testing.assert_allclose(rec.amplitudes, 2.0, rtol=0.01)
        assert np.ptp(rec.amplitudes) / 2.0 < 0.01

    def test_bin_centres_and_count(self):
        rec = track_spectral_peak(tone(1000.0, duration=1.0), 0.2, 5.0)
        np.testing.assert_allclose(rec.times, [0.1, 0.3, 0.5, 0.7, 0.9], rtol=1e-12)

    def test_linear_chirp_slope(self):
        rate, f0, k = 16000.0, 1000.0, 2.0
        t = np.arange(int(5 * rate)) / rate
        sig = TimeSeries(rate, np.cos(2 * math.pi * (f0 * t + 0.5 * k * t * t)))
        rec = track_spectral_peak(sig, 0.2, 5.0)
        slope = np.polyfit(rec.times, rec.frequencies, 1)[0]
        assert slope == pytest.approx(k, rel=0.02)

    def test_too_few_samples_per_bin(self):
        with pytest.raises(ValueError, match="16"):
            track_spectral_peak(tone(10.0, rate=100.0), 0.1, 10.0)

    def test_rbw_below_bin_inverse(self):
        with pytest.raises(ValueError, match="resolution_bandwidth"):
            track_spectral_peak(tone(1000.0), 0.2, 1.0)

    def test_empty_signal_rejected(self):
        with pytest.raises(ValueError, match="shorter"):
            track_spectral_peak(tone(1000.0, duration=0.1), 0.2, 5.0)

    def test_zero_bin_flagged_and_skipped(self):
        sig = tone(1000.0, duration=1.0)
        v = sig.values.copy()
        v[3200:6400] = 0.0
        with pytest.warns(UserWarning, match="all-zero"):
            rec = track_spectral_peak(sig.with_values(v), 0.2, 5.0)
        assert rec.skipped_bins == (1,)
        assert len(rec) == 4

    @given(st.floats(900.0, 1100.0), st.floats(0.0, 2 * math.pi))
    def test_frequency_accuracy_property(self, freq, phase):
        rec = track_spectral_peak(tone(freq, duration=0.4, rate=16000.0, phase=phase), 0.2, 5.0)
        assert np.all(np.abs(rec.frequencies - freq) < 1e-3)


class TestZeroCrossings:
    def test_pure_tone(self):
        rec = track_zero_crossings(tone(1000.0, 3.0, duration=0.5), 20)
        np.testing.assert_allclose(rec.frequencies, 1000.0, rtol=1e-9)
        np.testing.assert_allclose(rec.amplitudes, 3.0, rtol=1e-6)

    def test_crossing_spacing(self):
        tc, index = zero_crossings(tone(50.0, duration=1.0, rate=1000.0, phase=0.0))
        np.testing.assert_allclose(np.diff(tc), 0.01, rtol=1e-6)
        np.testing.assert_array_equal(np.diff(index), 1)

    def test_commensurate_rate_unbiased(self):
        # exactly 16 samples per cycle: linear interpolation alone is biased here
        rec = track_zero_crossings(tone(1000.0, duration=0.2, rate=16000.0), 10)
        np.testing.assert_allclose(rec.frequencies, 1000.0, rtol=1e-8)

    def test_too_short(self):
        with pytest.raises(ValueError, match="window"):
            track_zero_crossings(tone(1000.0, duration=0.005), 20)


class TestRecord:
    def test_invariants(self):
        with pytest.raises(ValueError, match="increasing"):
            RingdownRecord([0.0, 0.0], [1.0, 1.0], [1.0, 1.0], 0.1, 10.0)
        with pytest.raises(ValueError, match=">= 0"):
            RingdownRecord([0.0, 1.0], [1.0, 1.0], [1.0, -1.0], 0.1, 10.0)

    def test_csv_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        rec = RingdownRecord(np.arange(5) * 0.2 + 0.1, 127071 + rng.standard_normal(5),
                             rng.random(5) * 1e-10, 0.2, 5.0, (2, 7))
        write_record_csv(rec, tmp_path / "r.csv")
        back = read_record_csv(tmp_path / "r.csv")
        for name in ("times", "frequencies", "amplitudes"):
            np.testing.assert_array_equal(getattr(back, name), getattr(rec, name))
        assert (back.bin_duration, back.resolution_bandwidth, back.skipped_bins) == (0.2, 5.0, (2, 7))


class TestTimeSeriesCsv:
    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=50),
           st.floats(1e-3, 1e9), st.sampled_from(["displacement", "voltage", "fractional_frequency"]))
    def test_round_trip_bit_exact(self, tmp_path_factory, values, rate, channel):
        path = tmp_path_factory.mktemp("ts") / "ts.csv"
        s = TimeSeries(rate, np.array(values), 0.5, channel, seed=3)
        write_csv(s, path)
        back = read_csv(path)
        assert back.values.tobytes() == s.values.tobytes()
        assert (back.sample_rate, back.start_time, back.channel, back.seed) == (rate, 0.5, channel, 3)

    def test_empty_file_rejected(self, tmp_path):
        (tmp_path / "e.csv").write_text("")
        with pytest.raises(ValueError):
            read_csv(tmp_path / "e.csv")

    def test_bad_sample_names_line(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text("# channel: voltage\n# sample_rate: 1.0\n# start_time: 0.0\nvalue\n1.0\nx\n")
        with pytest.raises(ValueError, match=":6:"):
            read_csv(p)

    def test_invariants(self):
        with pytest.raises(ValueError):
            TimeSeries(0.0, np.ones(3))
        with pytest.raises(ValueError):
            TimeSeries(1.0, np.array([]))
        with pytest.raises(ValueError):
            TimeSeries(1.0, np.ones(3), channel="pressure")
