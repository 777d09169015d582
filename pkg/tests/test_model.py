import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinhull.model import (
    Observation,
    OperatorSpectrum,
    SignalCoefficients,
    make_signal,
    observe,
    power_spectrum,
)
from steinhull.streams import RandomStream, mc_mean_se
from steinhull.validation import ValidationError


class TestOperatorSpectrum:
    def test_rejects_increasing_values(self):
        with pytest.raises(ValidationError):
            OperatorSpectrum(np.array([1.0, 1.5]))

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValidationError):
            OperatorSpectrum(np.array([1.0, 0.0]))

    def test_accepts_constant_spectrum(self):
        assert len(OperatorSpectrum(np.ones(4))) == 4


class TestPowerSpectrum:
    def test_known_values(self):
        spec = power_spectrum(beta=0.5, scale=2.0, n_max=2)
        assert spec.values[0] == pytest.approx(2.0)
        assert spec.values[1] == pytest.approx(2.0 / math.sqrt(2.0))

    def test_beta_zero_is_constant(self):
        spec = power_spectrum(beta=0.0, scale=3.0, n_max=5)
        assert np.all(spec.values == 3.0)

    def test_direct_formula(self):
        spec = power_spectrum(beta=1.25, scale=0.7, n_max=16)
        for k in range(1, 17):
            assert spec.values[k - 1] == pytest.approx(0.7 * k ** (-1.25))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(beta=-0.1, scale=1.0, n_max=4),
            dict(beta=1.0, scale=0.0, n_max=4),
            dict(beta=1.0, scale=1.0, n_max=0),
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValidationError):
            power_spectrum(**kwargs)


class TestMakeSignal:
    def test_zero(self):
        sig = make_signal("zero", [], 3)
        assert np.array_equal(sig.values, np.zeros(3))
        assert sig.energy() == 0.0

    def test_spike(self):
        sig = make_signal("spike", [2, 3.0], 3)
        assert np.array_equal(sig.values, np.array([0.0, 3.0, 0.0]))
        assert sig.energy() == pytest.approx(9.0)

    def test_spike_index_must_be_integral_and_in_range(self):
        with pytest.raises(ValidationError):
            make_signal("spike", [2.5, 1.0], 3)
        with pytest.raises(ValidationError):
            make_signal("spike", [4, 1.0], 3)
        with pytest.raises(ValidationError):
            make_signal("spike", [0, 1.0], 3)

    def test_power_smooth(self):
        sig = make_signal("power_smooth", [1.0, 1.0], 4)
        assert np.allclose(sig.values, [1.0, 0.5, 1.0 / 3.0, 0.25])

    def test_power_smooth_rejects_small_exponent(self):
        with pytest.raises(ValidationError):
            make_signal("power_smooth", [1.0, 0.5], 4)

    def test_exp_smooth(self):
        sig = make_signal("exp_smooth", [2.0, 0.3], 3)
        for k in range(1, 4):
            assert sig.values[k - 1] == pytest.approx(2.0 * math.exp(-0.3 * k))

    def test_explicit_needs_exact_arity(self):
        sig = make_signal("explicit", [3.0, -1.0], 2)
        assert np.array_equal(sig.values, [3.0, -1.0])
        with pytest.raises(ValidationError):
            make_signal("explicit", [3.0], 2)

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            make_signal("sawtooth", [], 3)


class TestSignalCoefficients:
    def test_energy_includes_tail(self):
        sig = SignalCoefficients(np.array([1.0, 2.0]), tail_energy=0.5)
        assert sig.energy() == pytest.approx(5.5)

    def test_rejects_negative_tail(self):
        with pytest.raises(ValidationError):
            SignalCoefficients(np.array([1.0]), tail_energy=-1e-9)


class TestObserve:
    spectrum = power_spectrum(beta=1.0, scale=1.0, n_max=8)

    def test_deterministic_given_stream(self):
        sig = make_signal("spike", [1, 2.0], 8)
        a = observe(self.spectrum, sig, 0.1, RandomStream(seed=11))
        b = observe(self.spectrum, sig, 0.1, RandomStream(seed=11))
        assert np.array_equal(a.values, b.values)
        assert a.seed == 11

    def test_different_streams_differ(self):
        sig = make_signal("zero", [], 8)
        a = observe(self.spectrum, sig, 0.1, RandomStream(seed=11))
        b = observe(self.spectrum, sig, 0.1, RandomStream(seed=12))
        assert not np.array_equal(a.values, b.values)

    def test_length_matches_spectrum(self):
        sig = make_signal("zero", [], 8)
        obs = observe(self.spectrum, sig, 0.1, RandomStream(seed=0))
        assert len(obs) == len(self.spectrum)

    def test_rejects_mismatched_lengths_and_bad_epsilon(self):
        sig = make_signal("zero", [], 5)
        with pytest.raises(ValidationError):
            observe(self.spectrum, sig, 0.1, RandomStream(seed=0))
        sig8 = make_signal("zero", [], 8)
        with pytest.raises(ValidationError):
            observe(self.spectrum, sig8, 0.0, RandomStream(seed=0))

    def test_moments_match_model(self):
        # y_k - b_k theta_k should be centred with variance epsilon^2.
        sig = make_signal("power_smooth", [1.0, 1.0], 8)
        eps = 0.3
        root = RandomStream(seed=42)
        reps = 4000
        residuals = np.empty((reps, 8))
        for i in range(reps):
            obs = observe(self.spectrum, sig, eps, root.child(i))
            residuals[i] = obs.values - self.spectrum.values * sig.values
        flat = residuals.ravel()
        mean, se = mc_mean_se(list(flat))
        assert abs(mean) <= 4.0 * se
        var_mean, var_se = mc_mean_se(list(flat**2))
        assert abs(var_mean - eps**2) <= 4.0 * var_se

    def test_observation_validates_epsilon(self):
        with pytest.raises(ValidationError):
            Observation(values=np.zeros(2), epsilon=-1.0, seed=0)


@settings(max_examples=50, deadline=None)
@given(
    beta=st.floats(min_value=0.0, max_value=4.0, allow_nan=False),
    scale=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
    n_max=st.integers(min_value=1, max_value=64),
)
def test_power_spectrum_always_valid(beta, scale, n_max):
    spec = power_spectrum(beta, scale, n_max)
    assert len(spec) == n_max
    assert np.all(spec.values > 0.0)
    assert np.all(np.diff(spec.values) <= 0.0)
