import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gupmech.constants import CODATA
from gupmech.dynamics import (UNDAMPED, DampingModel, IntegrationError, damped_cosine,
                              equations_of_motion, integrate_trajectory, simulate_ringdown)
from gupmech.fits import fit_exponential_decay
from gupmech.noise import NoiseSpec
from gupmech.physics import (GupModel, OscillatorSpec, OscillatorState, beta0_for_secular_shift,
                             perturbed_hamiltonian)
from gupmech.tracking import track_spectral_peak, track_zero_crossings


def unit_osc():
    return OscillatorSpec("unit", 1.0, 2 * math.pi, 1e6)


class TestDampingModel:
    def test_decay_time_round_trip(self):
        d = DampingModel.from_decay_time(173.0)
        assert d.amplitude_decay_time * d.gamma == 2.0
        assert d.amplitude_decay_time == pytest.approx(173.0, rel=1e-15)

    def test_from_oscillator_uses_q(self, desk):
        assert DampingModel.from_oscillator(desk).gamma == pytest.approx(desk.omega0 / 4000, rel=1e-15)

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            DampingModel(-1.0)


class TestEquationsOfMotion:
    def test_turning_point(self, desk):
        xdot, pdot = equations_of_motion(OscillatorState(1e-9, 0.0), desk, GupModel(0.0), UNDAMPED)
        assert xdot == 0.0
        assert pdot == pytest.approx(-desk.m_eff * desk.omega0**2 * 1e-9, rel=1e-15)

    def test_quartic_velocity_term_by_hand(self):
        osc = OscillatorSpec("h", 2.0, 1.0, 10.0)
        p, b = 3.0, 5.0
        xdot, _ = equations_of_motion(OscillatorState(0.0, p), osc, GupModel(b), UNDAMPED)
        # 4 * 5 / (3 * 2 * Pc^2) * 27
        excess = 540.0 / (6.0 * CODATA.planck_momentum**2)
        assert xdot - p / 2.0 == pytest.approx(excess, rel=1e-9)

    def test_damping_acts_on_momentum(self, desk):
        d = DampingModel(2.0)
        _, pdot = equations_of_motion(OscillatorState(0.0, 1.0), desk, GupModel(0.0), d)
        assert pdot == -2.0


class TestIntegrator:
    def test_default_output_grid(self, desk):
        traj = integrate_trajectory(OscillatorState(1e-9, 0.0), desk, GupModel(0.0), UNDAMPED, 0.01)
        assert len(traj) == 161
        assert traj.t[-1] == pytest.approx(0.01, rel=1e-12)
        assert isinstance(traj[3], OscillatorState)

    def test_one_period_round_trip(self):
        osc = unit_osc()
        traj = integrate_trajectory(OscillatorState(1.0, 0.0), osc, GupModel(0.0), UNDAMPED, 1.0,
                                    times=[0.0, 1.0])
        assert abs(traj.x[-1] - 1.0) < 1e-8
        assert abs(traj.p[-1]) < 1e-8 * osc.m_eff * osc.omega0

    def test_harmonic_energy_conserved_over_1000_cycles(self):
        osc = unit_osc()
        traj = integrate_trajectory(OscillatorState(1.0, 0.0), osc, GupModel(0.0), UNDAMPED, 1000.0,
                                    rtol=1e-13, sample_rate=4.0)
        e = 0.5 * traj.p**2 / osc.m_eff + 0.5 * osc.m_eff * osc.omega0**2 * traj.x**2
        assert np.max(np.abs(e / e[0] - 1)) < 1e-9

    def test_perturbed_energy_conserved_over_1000_cycles(self):
        osc = OscillatorSpec("h", 1.0, 2 * math.pi, 1e6)
        A = 1.0
        # quartic term a few percent of the energy: strongly perturbed
        gup = GupModel(0.05 * 3 * CODATA.planck_momentum**2 / (osc.omega0 * A) ** 2)
        traj = integrate_trajectory(OscillatorState(A, 0.0), osc, gup, UNDAMPED, 1000.0,
                                    rtol=1e-13, sample_rate=4.0)
        e = np.array([perturbed_hamiltonian(s, osc, gup) for s in traj])
        quartic0 = gup.beta0 * (osc.omega0 * A) ** 4 / (3 * CODATA.planck_momentum**2)
        assert quartic0 / e[0] > 0.01
        assert np.max(np.abs(e / e[0] - 1)) < 1e-9

    def test_phase_accuracy_at_default_tolerance(self):
        osc = unit_osc()
        traj = integrate_trajectory(OscillatorState(1.0, 0.0), osc, GupModel(0.0), UNDAMPED, 1000.0,
                                    sample_rate=4.0)
        phase = math.atan2(-traj.p[-1] / (osc.m_eff * osc.omega0), traj.x[-1])
        assert abs(phase) < 1e-7

    def test_damped_envelope_matches_closed_form(self, desk):
        d = DampingModel.from_oscillator(desk)
        t = np.arange(0, 20001) / 10000.0
        traj = integrate_trajectory(OscillatorState(1e-9, 0.0), desk, GupModel(0.0), d, 2.0, times=t)
        env = 1e-9 * np.exp(-t / d.amplitude_decay_time)
        assert np.max(np.abs(traj.x - damped_cosine(desk, d, 1e-9, t)) / env) < 1e-6

    def test_step_underflow_raises_with_diagnostic(self):
        with pytest.raises(IntegrationError, match="underflow.*rtol"):
            integrate_trajectory(OscillatorState(1.0, 0.0), unit_osc(), GupModel(0.0), UNDAMPED,
                                 1.0, rtol=1e-20)

    def test_bad_duration(self):
        with pytest.raises(ValueError):
            integrate_trajectory(OscillatorState(1.0, 0.0), unit_osc(), GupModel(0.0), UNDAMPED, 0.0)

    @given(st.floats(0.1, 10.0))
    def test_linear_in_initial_amplitude(self, scale):
        osc = unit_osc()
        t = np.linspace(0, 3, 31)
        a = integrate_trajectory(OscillatorState(1.0, 0.0), osc, GupModel(0.0), UNDAMPED, 3, times=t)
        b = integrate_trajectory(OscillatorState(scale, 0.0), osc, GupModel(0.0), UNDAMPED, 3, times=t)
        np.testing.assert_allclose(b.x, scale * a.x, rtol=0, atol=1e-8 * scale)


class TestSimulateRingdown:
    def test_noiseless_matches_damped_cosine(self, desk):
        d = DampingModel.from_oscillator(desk)
        s = simulate_ringdown(desk, GupModel(0.0), d, 1e-9, 1.0, 16000.0)
        env = 1e-9 * np.exp(-s.times / d.amplitude_decay_time)
        assert np.max(np.abs(s.values - damped_cosine(desk, d, 1e-9, s.times)) / env) < 1e-6

    def test_sample_count_and_channel(self, desk):
        s = simulate_ringdown(desk, GupModel(0.0), UNDAMPED, 1e-9, 0.5, 8000.0)
        assert len(s) == 4000
        assert s.channel == "displacement"

    def test_undersampling_names_minimum_rate(self, desk):
        with pytest.raises(ValueError, match="need > 4000 Hz"):
            simulate_ringdown(desk, GupModel(0.0), UNDAMPED, 1e-9, 0.1, 3000.0)

    def test_same_seed_bit_identical(self, desk):
        noise = NoiseSpec(1e-11, 1e-6, 1e-7, seed=42)
        runs = [simulate_ringdown(desk, GupModel(1e9), DampingModel.from_oscillator(desk), 1e-9,
                                  0.2, 16000.0, noise) for _ in range(2)]
        assert runs[0].values.tobytes() == runs[1].values.tobytes()
        other = simulate_ringdown(desk, GupModel(1e9), DampingModel.from_oscillator(desk), 1e-9,
                                  0.2, 16000.0, NoiseSpec(1e-11, 1e-6, 1e-7, seed=43))
        assert not np.array_equal(other.values, runs[0].values)

    def test_frequency_noise_moves_the_phase(self, desk):
        quiet = simulate_ringdown(desk, GupModel(0.0), UNDAMPED, 1e-9, 0.5, 16000.0)
        noisy = simulate_ringdown(desk, GupModel(0.0), UNDAMPED, 1e-9, 0.5, 16000.0,
                                  NoiseSpec(fractional_frequency_white=1e-6, seed=1))
        diff = np.max(np.abs(noisy.values - quiet.values))
        assert 1e-14 < diff < 1e-10

    def test_gup_hardens_the_oscillator(self, desk):
        base = track_zero_crossings(simulate_ringdown(desk, GupModel(0.0), UNDAMPED, 1e-9, 0.2, 16000.0))
        gup = beta0_for_secular_shift(desk, 1e-9, 1e-4)
        hard = track_zero_crossings(simulate_ringdown(desk, gup, UNDAMPED, 1e-9, 0.2, 16000.0))
        shift = np.mean(hard.frequencies) / np.mean(base.frequencies) - 1
        assert shift == pytest.approx(1e-4, rel=0.02)

    def test_downscaled_sapphire_ringdown_recovers_decay_time(self):
        osc = OscillatorSpec.from_frequency("sapphire", 0.3, 127070.97,
                                            0.5 * 2 * math.pi * 127070.97 * 173)
        s = simulate_ringdown(osc, GupModel(0.0), DampingModel.from_oscillator(osc), 75e-12, 0.6,
                              16 * 127070.97)
        with pytest.warns(UserWarning):
            fit = fit_exponential_decay(track_spectral_peak(s, 0.1, 10.0))
        assert fit.converged
        assert fit["tau_a"] == pytest.approx(173.0, rel=0.01)
