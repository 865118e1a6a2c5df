"""
Unit tests for the complexity estimators.
"""

import math
import unittest

import numpy as np

from chaoscomm.complexity import (ComplexitySettings, SymbolizedSeries, block_entropy,
                                  complexity_report, delay_embed, entropy_rate,
                                  excess_entropy, lmc_complexity, lyapunov_max,
                                  neural_complexity, shannon_entropy, symbolize)
from chaoscomm.complexity.neural import clustered_covariance, neural_complexity_from_covariance
from chaoscomm.complexity.symbols import Binning
from chaoscomm.core.config_manager import ConfigManager
from chaoscomm.core.errors import (DegenerateSignal, InvalidParameter, NoNeighbors,
                                   TooShort)
from chaoscomm.dynamics import integrate
from chaoscomm.modem.chips import MG_CHIP_GAIN

# Single chip oscillator in the settings the complexity command derives from it.
CHIP_OSCILLATOR = f"""\
experiment: complexity
simulation.nodes: 1
topology.kind: uncoupled
oscillator.kappa_f: {MG_CHIP_GAIN}
simulation.duration: 3.0
simulation.sample_every: 20
complexity.embed_dim: 4
complexity.embed_lag: 20
complexity.theiler: 100
"""


def series(symbols, k=2):
    return SymbolizedSeries(np.asarray(symbols, dtype=int), k, Binning.QUANTILE)


def logistic_orbit(count, x0=0.3141):
    x = np.empty(count)
    x[0] = x0
    for n in range(1, count):
        x[n] = 4.0 * x[n - 1] * (1.0 - x[n - 1])
    return x


def ar1(count, coefficient, seed):
    rng = np.random.default_rng(seed)
    noise = rng.normal(size=count)
    x = np.empty(count)
    x[0] = noise[0]
    for n in range(1, count):
        x[n] = coefficient * x[n - 1] + noise[n]
    return x


class TestSymbolize(unittest.TestCase):
    """Test cases for symbolize."""

    def test_quantile_ranks(self):
        s = symbolize([1.0, 2.0, 3.0, 4.0], k=2)
        np.testing.assert_array_equal(s.symbols, [0, 0, 1, 1])
        self.assertFalse(s.degenerate)

    def test_quantile_frequencies_are_equal(self):
        s = symbolize(np.random.default_rng(0).normal(size=100_000), k=4)
        np.testing.assert_allclose(s.frequencies(), 0.25, atol=0.01)

    def test_uniform_bins(self):
        s = symbolize([0.0, 0.5, 1.0], k=2, binning="uniform")
        np.testing.assert_array_equal(s.symbols, [0, 1, 1])

    def test_constant_signal(self):
        with self.assertLogs("chaoscomm.complexity", level="WARNING"):
            s = symbolize(np.ones(50), k=4)
        self.assertTrue(s.degenerate)
        self.assertEqual(shannon_entropy(s, 4), 0.0)
        with self.assertRaises(DegenerateSignal):
            symbolize(np.ones(50), k=4, strict=True)

    def test_argument_checks(self):
        with self.assertRaises(InvalidParameter):
            symbolize([1.0, 2.0], k=1)
        with self.assertRaises(InvalidParameter):
            symbolize([1.0, 2.0], k=4)
        with self.assertRaises(InvalidParameter):
            symbolize([1.0, math.nan, 2.0], k=2)


class TestBlockEntropy(unittest.TestCase):
    """Test cases for block entropies and the quantities derived from them."""

    def test_shannon_entropy(self):
        self.assertAlmostEqual(shannon_entropy([0, 1, 2, 3]), 2.0, places=12)

    def test_period_two(self):
        s = series(np.tile([0, 1], 5000))
        np.testing.assert_allclose(block_entropy(s, 5), 1.0, atol=1e-3)
        self.assertAlmostEqual(entropy_rate(s, 5), 0.0, delta=1e-3)
        self.assertAlmostEqual(excess_entropy(s, 5), 1.0, delta=5e-3)

    def test_constant_series(self):
        s = series(np.zeros(1000))
        np.testing.assert_array_equal(block_entropy(s, 4), 0.0)
        self.assertEqual(excess_entropy(s, 4), 0.0)

    def test_iid_bits(self):
        s = series(np.random.default_rng(1).integers(0, 2, size=100_000))
        H = block_entropy(s, 4)
        np.testing.assert_allclose(H, [1, 2, 3, 4], atol=0.01)
        self.assertAlmostEqual(entropy_rate(s, 4), 1.0, delta=0.01)
        self.assertLess(excess_entropy(s, 4), 0.02)

    def test_block_entropy_is_concave(self):
        s = symbolize(ar1(100_000, 0.9, 2), k=2)
        H = block_entropy(s, 8)
        rates = np.diff(np.concatenate(([0.0], H)))
        self.assertTrue(np.all(np.diff(rates) <= 1e-3))
        self.assertTrue(np.all(np.diff(H) >= 0))

    def test_short_series_warns(self):
        s = symbolize(np.random.default_rng(3).normal(size=100), k=4)
        with self.assertLogs("chaoscomm.complexity", level="WARNING"):
            block_entropy(s, 3)

    def test_block_length_checks(self):
        s = series([0, 1, 0])
        with self.assertRaises(InvalidParameter):
            block_entropy(s, 0)
        with self.assertRaises(InvalidParameter):
            block_entropy(s, 4)


class TestLmcComplexity(unittest.TestCase):

    def test_equiprobable_is_zero(self):
        self.assertEqual(lmc_complexity(series(np.tile([0, 1, 2, 3], 25), k=4)), 0.0)

    def test_single_symbol_is_zero(self):
        self.assertEqual(lmc_complexity(series(np.zeros(100), k=4)), 0.0)

    def test_skewed_pair(self):
        s = series([0] * 90 + [1] * 10)
        self.assertAlmostEqual(lmc_complexity(s), 0.15008, places=5)

    def test_relabeling_invariance(self):
        symbols = np.random.default_rng(4).choice(3, size=500, p=[0.6, 0.3, 0.1])
        relabeled = np.array([2, 0, 1])[symbols]
        self.assertAlmostEqual(lmc_complexity(series(symbols, 3)),
                               lmc_complexity(series(relabeled, 3)), places=12)


class TestNeuralComplexity(unittest.TestCase):
    """Test cases for neural_complexity."""

    def clustered_data(self, seed, samples=5000):
        rng = np.random.default_rng(seed)
        factors = rng.normal(size=(2, samples))
        rows = [factors[i // 2] + 0.3 * rng.normal(size=samples) for i in range(4)]
        return np.array(rows)

    def test_independent_channels(self):
        data = np.random.default_rng(5).normal(size=(4, 10_000))
        self.assertLess(abs(neural_complexity(data)), 0.01)

    def test_clustered_covariance_value(self):
        cov = clustered_covariance([2, 2], 0.9)
        self.assertAlmostEqual(neural_complexity_from_covariance(cov), 1.9966, delta=1e-3)

    def test_structure_raises_complexity(self):
        independent = neural_complexity(np.random.default_rng(6).normal(size=(4, 5000)))
        self.assertGreater(neural_complexity(self.clustered_data(6)), independent + 0.5)

    def test_channel_order_does_not_matter(self):
        data = self.clustered_data(7)
        permuted = data[[2, 0, 3, 1]]
        self.assertAlmostEqual(neural_complexity(data), neural_complexity(permuted), delta=1e-9)

    def test_sampled_subsets_close_to_exact(self):
        cov = clustered_covariance([7, 7], 0.5)
        exact = neural_complexity_from_covariance(cov, max_exact_n=14)
        sampled = neural_complexity_from_covariance(cov, seed=1)
        self.assertEqual(sampled, neural_complexity_from_covariance(cov, seed=1))
        self.assertAlmostEqual(sampled / exact, 1.0, delta=0.1)

    def test_too_short(self):
        with self.assertRaises(TooShort):
            neural_complexity(np.random.default_rng(8).normal(size=(4, 30)))
        with self.assertRaises(InvalidParameter):
            neural_complexity(np.zeros((1, 100)))


class TestDelayEmbed(unittest.TestCase):

    def test_shape_and_columns(self):
        x = np.arange(20.0)
        points = delay_embed(x, 3, 4)
        self.assertEqual(points.shape, (12, 3))
        np.testing.assert_array_equal(points[:, 0], x[:12])
        np.testing.assert_array_equal(points[:, 2], x[8:])

    def test_dimension_one_is_identity(self):
        x = np.random.default_rng(9).normal(size=50)
        np.testing.assert_array_equal(delay_embed(x, 1, 3)[:, 0], x)

    def test_quarter_period_lag_gives_circle(self):
        t = np.arange(4000)
        points = delay_embed(np.sin(2 * np.pi * t / 400), 2, 100)
        np.testing.assert_allclose(np.sum(points ** 2, axis=1), 1.0, atol=1e-12)

    def test_too_short(self):
        with self.assertRaises(TooShort):
            delay_embed(np.arange(5.0), 3, 3)


class TestLyapunov(unittest.TestCase):
    """Test cases for lyapunov_max."""

    def test_logistic_map(self):
        result = lyapunov_max(logistic_orbit(20_000), m=1, fit_range=(0, 6))
        self.assertAlmostEqual(result.exponent, math.log(2.0), delta=0.05 * math.log(2.0))
        self.assertEqual(result.divergence.size, 7)

    def test_affine_invariance(self):
        x = logistic_orbit(10_000)
        a = lyapunov_max(x, m=1, fit_range=(0, 6), min_samples=1000)
        b = lyapunov_max(3.0 * x + 2.0, m=1, fit_range=(0, 6), min_samples=1000)
        self.assertAlmostEqual(a.exponent, b.exponent, delta=1e-6)

    def test_rotation_has_zero_exponent(self):
        t = np.arange(6000)
        x = np.sin(2 * np.pi * t / 10_000)
        result = lyapunov_max(x, m=2, lag=2500, min_samples=1000)
        self.assertLessEqual(abs(result.exponent), 1e-6)

    def test_chip_oscillator_is_chaotic(self):
        config = ConfigManager(CHIP_OSCILLATOR)
        run = integrate(config.node_params(), config.coupling(),
                        duration=config.get("simulation.duration"),
                        step=config.get("simulation.step"),
                        transient=config.get("simulation.transient"), seed=config.seed,
                        sample_every=config.get("simulation.sample_every"))
        settings = config.complexity_settings(run.step)
        self.assertEqual(settings.fit_range, (1, 45))
        report = complexity_report(run.post_transient(), settings)
        self.assertGreater(report.lyapunov_per_s, 0.0)

    def test_argument_checks(self):
        x = np.random.default_rng(10).normal(size=6000)
        with self.assertRaises(TooShort):
            lyapunov_max(x[:100])
        with self.assertRaises(InvalidParameter):
            lyapunov_max(x, fit_range=(5, 5))
        with self.assertRaises(NoNeighbors):
            lyapunov_max(x[:300], theiler=1000, min_samples=100)


class TestComplexityReport(unittest.TestCase):
    """Test cases for complexity_report."""

    def setUp(self):
        self.settings = ComplexitySettings(L_max=4, lyapunov=False)

    def test_univariate_report(self):
        report = complexity_report(np.random.default_rng(11).normal(size=20_000), self.settings)
        values = report.to_dict()
        self.assertEqual(values["neural_complexity_bits"], "na")
        self.assertEqual(values["lyapunov_per_s"], "na")
        self.assertEqual(values["insufficient_lengths"], "none")
        self.assertEqual([key for key in values if key.startswith("H")], ["H1", "H2", "H3", "H4"])
        self.assertEqual(values["param.fit_range"], "1,10")
        self.assertAlmostEqual(report.shannon_bits, 2.0, places=6)
        self.assertEqual(report.csv_header(), list(values))

    def test_multichannel_report(self):
        data = np.random.default_rng(12).normal(size=(3, 5000))
        report = complexity_report(data, self.settings, column=2)
        self.assertIsNotNone(report.neural_complexity_bits)
        with self.assertRaises(InvalidParameter):
            complexity_report(data, self.settings, column=3)

    def test_neural_settings_select_subset_sampling(self):
        data = np.random.default_rng(13).normal(size=(4, 5000))
        data[1] += data[0]
        data[3] += 0.5 * data[2]
        exact = complexity_report(data, self.settings).neural_complexity_bits
        sampled_settings = ComplexitySettings(L_max=4, lyapunov=False, max_exact_n=2,
                                              subset_samples=1)
        sampled = complexity_report(data, sampled_settings).neural_complexity_bits
        self.assertNotAlmostEqual(exact, sampled, places=6)
        self.assertEqual(complexity_report(data, sampled_settings).to_dict()["param.subset_samples"], 1)

    def test_neural_settings_from_config(self):
        config = ConfigManager("experiment: complexity\n"
                               "complexity.max_exact_n: 3\n"
                               "complexity.subset_samples: 5\n")
        settings = config.complexity_settings()
        self.assertEqual((settings.max_exact_n, settings.subset_samples), (3, 5))

    def test_short_signal_reports_without_lyapunov(self):
        signal = np.random.default_rng(14).normal(size=2000)
        with self.assertLogs("chaoscomm.complexity", level="WARNING"):
            report = complexity_report(signal, ComplexitySettings(L_max=3))
        self.assertIsNone(report.lyapunov_per_s)
        self.assertEqual(report.to_dict()["lyapunov_per_s"], "na")
        self.assertAlmostEqual(report.shannon_bits, 2.0, places=6)

    def test_constant_signal_skips_lyapunov(self):
        with self.assertLogs("chaoscomm.complexity", level="WARNING"):
            report = complexity_report(np.zeros(6000), ComplexitySettings(L_max=3))
        self.assertTrue(report.degenerate)
        self.assertIsNone(report.lyapunov_per_s)
        self.assertEqual(report.lmc, 0.0)


if __name__ == "__main__":
    unittest.main()
