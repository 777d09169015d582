import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from steinhull.blocks import block_stats, custom_scheme, weakly_geometric_scheme
from steinhull.filters import BlockFilter, quadratic_risk
from steinhull.model import Observation, make_signal, observe, power_spectrum
from steinhull.penalties import explicit_penalty
from steinhull.stein import BlockEnergies, block_energies, penalized_stein_filter, u_p, ure_filter
from steinhull.streams import RandomStream, mc_mean_se
from steinhull.validation import ValidationError


def _observation(values, epsilon=0.1, seed=0):
    return Observation(values=np.asarray(values, dtype=float), epsilon=epsilon, seed=seed)


class TestBlockEnergies:
    def test_hand_computed(self):
        # b = (1, 1/2, 1/3), y = (1, 2, 3): summands 1, 16, 81.
        spectrum = power_spectrum(1.0, 1.0, 3)
        scheme = custom_scheme([1, 4])
        energies = block_energies(_observation([1.0, 2.0, 3.0]), scheme, spectrum)
        assert energies.values[0] == pytest.approx(98.0)

    def test_per_block_split(self):
        spectrum = power_spectrum(0.0, 1.0, 4)
        scheme = custom_scheme([1, 3, 5])
        energies = block_energies(_observation([1.0, 2.0, 3.0, 4.0]), scheme, spectrum)
        assert energies.values == pytest.approx([5.0, 25.0])

    def test_ignores_indices_beyond_scheme(self):
        spectrum = power_spectrum(0.0, 1.0, 5)
        scheme = custom_scheme([1, 3])
        energies = block_energies(_observation([1.0, 1.0, 9.0, 9.0, 9.0]), scheme, spectrum)
        assert energies.values == pytest.approx([2.0])

    def test_mean_is_signal_energy_plus_noise_energy(self):
        spectrum = power_spectrum(1.0, 1.0, 6)
        scheme = custom_scheme([1, 4, 7])
        stats = block_stats(scheme, spectrum, 0.3)
        signal = make_signal("power_smooth", [1.0, 1.0], 6)
        root = RandomStream(seed=8)
        reps = 4000
        draws = np.empty((reps, 2))
        for i in range(reps):
            obs = observe(spectrum, signal, 0.3, root.child(i))
            draws[i] = block_energies(obs, scheme, spectrum).values
        for j in range(2):
            theta = signal.values[scheme.block_slice(j)]
            want = float(np.dot(theta, theta)) + stats.sigma2[j]
            mean, se = mc_mean_se(list(draws[:, j]))
            assert abs(mean - want) <= 4.0 * se

    def test_rejects_short_observation(self):
        spectrum = power_spectrum(1.0, 1.0, 6)
        with pytest.raises(ValidationError):
            block_energies(_observation([1.0, 2.0]), custom_scheme([1, 4]), spectrum)

    def test_energies_validated(self):
        with pytest.raises(ValidationError):
            BlockEnergies(custom_scheme([1, 3]), np.array([-1.0]))


class TestUreFilter:
    spectrum = power_spectrum(1.0, 1.0, 3)
    scheme = custom_scheme([1, 4])
    stats = block_stats(scheme, spectrum, 0.1)  # sigma2 = 0.14

    def _filter_for_energy(self, energy):
        return ure_filter(BlockEnergies(self.scheme, np.array([energy])), self.stats)

    def test_zero_energy_gives_zero_weight(self):
        assert self._filter_for_energy(0.0).values[0] == 0.0

    def test_energy_below_noise_gives_zero_weight(self):
        assert self._filter_for_energy(0.14).values[0] == 0.0
        assert self._filter_for_energy(0.05).values[0] == 0.0

    def test_hand_computed_weight(self):
        assert self._filter_for_energy(0.28).values[0] == pytest.approx(0.5)
        assert self._filter_for_energy(1.4).values[0] == pytest.approx(0.9)

    def test_monotone_in_energy(self):
        weights = [self._filter_for_energy(e).values[0] for e in np.linspace(0.0, 2.0, 40)]
        assert all(b >= a for a, b in zip(weights, weights[1:]))

    def test_scheme_mismatch_rejected(self):
        other = block_stats(custom_scheme([1, 2, 4]), self.spectrum, 0.1)
        with pytest.raises(ValidationError):
            ure_filter(BlockEnergies(self.scheme, np.array([1.0])), other)


class TestPenalizedSteinFilter:
    spectrum = power_spectrum(1.0, 1.0, 3)
    scheme = custom_scheme([1, 4])
    stats = block_stats(scheme, spectrum, 0.1)

    def test_zero_penalty_reduces_to_ure(self):
        energies = BlockEnergies(self.scheme, np.array([0.9]))
        pen = explicit_penalty([0.0])
        a = penalized_stein_filter(energies, self.stats, pen)
        b = ure_filter(energies, self.stats)
        assert np.array_equal(a.values, b.values)

    def test_hand_computed_weight(self):
        # (1 - (0.14 + 0.06) / 0.8)_+ = 0.75
        energies = BlockEnergies(self.scheme, np.array([0.8]))
        filt = penalized_stein_filter(energies, self.stats, explicit_penalty([0.06]))
        assert filt.values[0] == pytest.approx(0.75)

    def test_penalty_shrinks_weights(self):
        energies = BlockEnergies(self.scheme, np.array([0.8]))
        small = penalized_stein_filter(energies, self.stats, explicit_penalty([0.01]))
        large = penalized_stein_filter(energies, self.stats, explicit_penalty([0.30]))
        assert large.values[0] < small.values[0]

    def test_zero_energy_gives_zero_weight(self):
        energies = BlockEnergies(self.scheme, np.array([0.0]))
        filt = penalized_stein_filter(energies, self.stats, explicit_penalty([0.06]))
        assert filt.values[0] == 0.0

    def test_minimizes_the_penalized_criterion(self):
        # The closed form must hit the grid argmin of U_p block by block.
        energies = BlockEnergies(self.scheme, np.array([0.9]))
        pen = explicit_penalty([0.07])
        filt = penalized_stein_filter(energies, self.stats, pen)
        grid_best = oracles.grid_argmin_penalized(0.9, 0.14, 0.07, step=1e-4)
        assert abs(filt.values[0] - grid_best) <= 1e-4 + 1e-12


class TestUp:
    spectrum = power_spectrum(1.0, 1.0, 6)
    scheme = custom_scheme([1, 4, 7])
    stats = block_stats(scheme, spectrum, 0.2)

    def test_zero_filter_gives_zero(self):
        energies = BlockEnergies(self.scheme, np.array([1.0, 2.0]))
        filt = BlockFilter(self.scheme, np.zeros(2))
        assert u_p(energies, self.stats, filt) == 0.0
        assert u_p(energies, self.stats, filt, explicit_penalty([0.3, 0.4])) == 0.0

    def test_matches_direct_formula(self):
        energies = BlockEnergies(self.scheme, np.array([1.5, 0.9]))
        filt = BlockFilter(self.scheme, np.array([0.6, 0.3]))
        pen = explicit_penalty([0.11, 0.05])
        want = sum(
            oracles.penalized_criterion(lam, e, s2, p)
            for lam, e, s2, p in zip(
                filt.values, energies.values, self.stats.sigma2, pen.values
            )
        )
        assert u_p(energies, self.stats, filt, pen) == pytest.approx(want)

    def test_unpenalized_default_matches_zero_penalty(self):
        energies = BlockEnergies(self.scheme, np.array([1.5, 0.9]))
        filt = BlockFilter(self.scheme, np.array([0.6, 0.3]))
        assert u_p(energies, self.stats, filt) == pytest.approx(
            u_p(energies, self.stats, filt, explicit_penalty([0.0, 0.0]))
        )

    def test_increasing_in_penalty_at_positive_weights(self):
        energies = BlockEnergies(self.scheme, np.array([1.5, 0.9]))
        filt = BlockFilter(self.scheme, np.array([0.6, 0.3]))
        lo = u_p(energies, self.stats, filt, explicit_penalty([0.1, 0.1]))
        hi = u_p(energies, self.stats, filt, explicit_penalty([0.2, 0.2]))
        assert hi > lo

    def test_unbiased_for_risk_up_to_signal_energy(self):
        # E U(y, lam) + ||theta||^2 = R(theta, lam) for fixed lam.
        spectrum = power_spectrum(1.0, 1.0, 6)
        scheme = custom_scheme([1, 3, 7])
        stats = block_stats(scheme, spectrum, 0.3)
        signal = make_signal("explicit", [1.0, -0.5, 0.7, 0.0, 0.2, 0.1], 6)
        filt = BlockFilter(scheme, np.array([0.8, 0.35]))
        root = RandomStream(seed=21)
        values = []
        for i in range(4000):
            obs = observe(spectrum, signal, 0.3, root.child(i))
            values.append(u_p(block_energies(obs, scheme, spectrum), stats, filt))
        mean, se = mc_mean_se(values)
        want = quadratic_risk(filt, signal, spectrum, 0.3) - signal.energy()
        assert abs(mean - want) <= 4.0 * se


@settings(max_examples=120, deadline=None)
@given(
    energy=st.floats(min_value=0.0, max_value=50.0, allow_nan=False),
    sigma2=st.floats(min_value=1e-3, max_value=10.0, allow_nan=False),
    pen=st.floats(min_value=0.0, max_value=10.0, allow_nan=False),
)
def test_closed_form_weight_is_grid_optimal(energy, sigma2, pen):
    spectrum = power_spectrum(0.0, 1.0, 1)
    scheme = custom_scheme([1, 2])
    stats = block_stats(scheme, spectrum, float(np.sqrt(sigma2)))
    energies = BlockEnergies(scheme, np.array([energy]))
    filt = penalized_stein_filter(energies, stats, explicit_penalty([pen]))
    lam = float(filt.values[0])
    grid = np.linspace(0.0, 1.0, 1001)
    values = oracles.penalized_criterion(grid, energy, sigma2, pen)
    best = float(np.min(values))
    got = oracles.penalized_criterion(lam, energy, sigma2, pen)
    assert got <= best + 1e-9
