"""Verification primitives: KS, slope fits, moments, autocorrelation."""

import numpy as np
import pytest

from lgpolymer import stats
from lgpolymer.streams import RandomStream


class TestKs:
    def test_hand_enumerated_statistic(self):
        # Three uniform points: the largest of the six candidate gaps is 0.25.
        d = stats.ks_statistic(np.array([0.25, 0.5, 0.75]), lambda x: x)
        assert d == pytest.approx(0.25, abs=1e-15)

    def test_perfectly_spaced_quantiles(self):
        n = 50
        samples = (np.arange(1, n + 1) - 0.5) / n
        d = stats.ks_statistic(samples, lambda x: x)
        assert d == pytest.approx(1.0 / (2 * n), abs=1e-12)

    def test_own_empirical_cdf_bound(self):
        gen = RandomStream(8).generator
        x = np.sort(gen.uniform(size=200))

        def ecdf(t):
            return np.searchsorted(x, t, side="right") / x.size

        assert stats.ks_statistic(x, ecdf) <= 1.0 / x.size + 1e-12

    def test_calibration_uniform(self):
        gen = RandomStream(123).generator
        passes = 0
        for _ in range(100):
            draws = np.sort(gen.uniform(size=10_000))
            passes += stats.ks_test(draws, lambda x: x, level=0.01).passed
        assert passes >= 99

    def test_thresholds(self):
        x = np.sort(RandomStream(1).generator.uniform(size=100))
        r5 = stats.ks_test(x, lambda t: t, level=0.05)
        r1 = stats.ks_test(x, lambda t: t, level=0.01)
        assert r5.threshold == pytest.approx(0.136)
        assert r1.threshold == pytest.approx(0.163)

    def test_rejects_unsorted_and_tiny(self):
        with pytest.raises(ValueError):
            stats.ks_statistic(np.array([0.5, 0.2, 0.9]), lambda x: x)
        with pytest.raises(ValueError):
            stats.ks_test(np.array([0.1, 0.2, 0.3]), lambda x: x)
        with pytest.raises(ValueError):
            stats.ks_test(np.sort(np.random.rand(20)), lambda x: x, level=0.2)


class TestSlopeFit:
    def test_exact_line(self):
        fit = stats.slope_fit([1, 2, 3], [2, 4, 6])
        assert fit.slope == pytest.approx(2.0, abs=1e-14)
        assert fit.stderr == pytest.approx(0.0, abs=1e-12)

    def test_flat(self):
        fit = stats.slope_fit([0, 1, 2], [1, 1, 1])
        assert fit.slope == pytest.approx(0.0, abs=1e-14)

    def test_recovers_two_thirds_from_noise(self):
        gen = RandomStream(63).generator
        x = np.log(np.array([256.0, 512.0, 1024.0, 2048.0, 4096.0, 8192.0]))
        y = (2.0 / 3.0) * x + 0.3 + gen.normal(0.0, 0.01, size=x.size)
        fit = stats.slope_fit(x, y)
        assert abs(fit.slope - 2.0 / 3.0) < 2 * fit.stderr + 1e-9

    def test_degenerate_x(self):
        with pytest.raises(ValueError):
            stats.slope_fit([1, 1, 1], [1, 2, 3])


class TestMoments:
    def test_constant_samples(self):
        m = stats.moments([3.0, 3.0, 3.0])
        assert m.variance == 0.0
        with pytest.raises(ValueError):
            stats.autocorr(np.array([3.0, 3.0, 3.0]), 1)

    def test_gamma_mean_envelope(self):
        k, n = 2.0, 100_000
        draws = RandomStream(5).generator.gamma(k, size=n)
        m = stats.moments(draws)
        assert abs(m.mean - k) < 4.0 * np.sqrt(k / n)

    def test_alternating_autocorr(self):
        x = np.tile([1.0, -1.0], 500)
        r = stats.autocorr(x, 1)
        assert r == pytest.approx(-1.0, abs=2.0 / x.size)
