"""
Unit tests for chaotic masking: transmitter, replica receiver and bit decisions.
"""

import unittest

import numpy as np

from chaoscomm.core.errors import InvalidParameter, NotSynchronized
from chaoscomm.dynamics import OscillatorParams
from chaoscomm.sync import MaskingConfig, mask_recover, mask_transmit, spectral_deviation
from chaoscomm.sync.masking import DEFAULT_PREAMBLE, bit_error_rate, nrz_waveform, rms


def random_bits(seed, count):
    return np.random.default_rng(seed).integers(0, 2, size=count)


class TestMaskingConfig(unittest.TestCase):
    """Test cases for MaskingConfig."""

    def test_defaults(self):
        cfg = MaskingConfig()
        self.assertEqual(cfg.samples_per_bit, 20_000)
        self.assertEqual(cfg.transient_samples, 100_000)
        self.assertEqual(cfg.preamble, DEFAULT_PREAMBLE)
        self.assertEqual(cfg.message_start(), 100_000 + 10 * 20_000)

    def test_epsilon_range(self):
        MaskingConfig(epsilon=0.0)
        with self.assertRaises(InvalidParameter):
            MaskingConfig(epsilon=0.3)

    def test_bit_duration_checked_against_delay(self):
        with self.assertRaises(InvalidParameter):
            MaskingConfig(bit_duration=0.1).check(OscillatorParams())

    def test_levels(self):
        self.assertEqual(MaskingConfig(epsilon=0.1).levels(2.0), (-0.2, 0.2))

    def test_nrz_waveform(self):
        wave = nrz_waveform([1, 0], (-1.0, 1.0), 3)
        np.testing.assert_array_equal(wave, [1, 1, 1, -1, -1, -1])

    def test_bit_error_rate(self):
        self.assertEqual(bit_error_rate([0, 1, 1, 0], [0, 1, 0, 0]), 0.25)
        with self.assertRaises(InvalidParameter):
            bit_error_rate([0, 1], [0])


class TestMaskTransmit(unittest.TestCase):
    """The transmitted line is the carrier plus the framed message."""

    @classmethod
    def setUpClass(cls):
        cls.cfg = MaskingConfig(epsilon=0.05)
        cls.bits = random_bits(1, 100)
        cls.tx, cls.truth = mask_transmit(OscillatorParams(), cls.bits, cls.cfg, seed=1)

    def test_shapes(self):
        expected = self.cfg.transient_samples + 110 * self.cfg.samples_per_bit + 1
        self.assertEqual(self.tx.size, expected)
        self.assertEqual(self.truth.node_count, 2)
        np.testing.assert_allclose(self.tx, self.truth.node(0) + self.truth.node(1))

    def test_message_power(self):
        start = self.cfg.transient_samples
        carrier = self.truth.node(0)[start:]
        ratio = rms(self.tx[start:] - carrier) / rms(carrier)
        self.assertAlmostEqual(ratio, 0.05, delta=1e-6)

    def test_no_message_during_transient(self):
        start = self.cfg.transient_samples
        np.testing.assert_array_equal(self.truth.node(1)[:start], 0.0)

    def test_spectrum_is_masked(self):
        start = self.cfg.transient_samples
        deviation = spectral_deviation(self.tx[start:], self.truth.node(0)[start:],
                                       self.cfg.step)
        self.assertLess(deviation, 0.1)

    def test_all_zero_message_is_constant_offset(self):
        cfg = MaskingConfig(epsilon=0.05)
        tx, truth = mask_transmit(OscillatorParams(), np.zeros(20, dtype=int), cfg, seed=2)
        carrier = truth.node(0)
        level = 0.05 * rms(carrier[cfg.transient_samples:])
        offset = (tx - carrier)[cfg.message_start():]
        np.testing.assert_allclose(offset, -level, rtol=1e-12)

    def test_rejects_non_bits(self):
        with self.assertRaises(InvalidParameter):
            mask_transmit(OscillatorParams(), [0, 2, 1], MaskingConfig())


class TestMaskRecover(unittest.TestCase):
    """Loopback through the open-loop replica receiver."""

    def loopback(self, seed, epsilon=0.05, receiver=None, bits=200, **kwargs):
        cfg = MaskingConfig(epsilon=epsilon)
        sent = random_bits(seed, bits)
        tx, truth = mask_transmit(OscillatorParams(), sent, cfg, seed=seed)
        recovery = mask_recover(tx, receiver or OscillatorParams(), cfg=cfg, seed=seed + 100,
                                **kwargs)
        return sent, tx, truth, recovery

    def test_matched_loopback_is_error_free(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                sent, _, _, recovery = self.loopback(seed)
                self.assertEqual(bit_error_rate(sent, recovery.bits), 0.0)
                self.assertFalse(recovery.undecidable)
                self.assertGreater(recovery.correlation, 0.99)
                self.assertEqual(recovery.polarity, 1)

    def test_epsilon_range_error_free(self):
        for epsilon in (0.02, 0.1):
            with self.subTest(epsilon=epsilon):
                sent, _, _, recovery = self.loopback(7, epsilon=epsilon, bits=60)
                self.assertEqual(bit_error_rate(sent, recovery.bits), 0.0)

    def test_mismatched_receiver_not_synchronized(self):
        with self.assertRaises(NotSynchronized) as ctx:
            self.loopback(3, receiver=OscillatorParams(tau_f=0.015), bits=40)
        self.assertLess(ctx.exception.correlation, 0.9)

    def test_mismatch_warns_without_require_sync(self):
        with self.assertLogs("chaoscomm.sync.masking", level="WARNING"):
            _, _, _, recovery = self.loopback(3, receiver=OscillatorParams(tau_f=0.015),
                                              bits=40, require_sync=False)
        self.assertLess(recovery.correlation, 0.9)
        self.assertEqual(recovery.bits.size, 40)

    def test_ber_grows_with_delay_mismatch(self):
        ber, correlation = [], []
        for mismatch in (0.0, 0.05, 0.15):
            receiver = OscillatorParams(tau_f=0.018 * (1.0 - mismatch))
            errors = 0
            corr = []
            for seed in range(3):
                sent, _, _, recovery = self.loopback(seed, receiver=receiver, bits=100,
                                                     require_sync=False)
                errors += int(np.count_nonzero(sent != recovery.bits))
                corr.append(recovery.correlation)
            ber.append(errors / 300)
            correlation.append(np.mean(corr))
        self.assertLessEqual(ber[0], ber[1])
        self.assertLessEqual(ber[1], ber[2])
        self.assertLess(correlation[2], correlation[0])

    def test_zero_epsilon_is_undecidable(self):
        _, tx, truth, recovery = self.loopback(4, epsilon=0.0, bits=30)
        start = MaskingConfig().transient_samples
        ratio = rms(recovery.residual[start:]) / rms(truth.node(0)[start:])
        self.assertLess(ratio, 0.05)
        self.assertTrue(recovery.undecidable)

    def test_line_too_short(self):
        with self.assertRaises(InvalidParameter):
            mask_recover(np.zeros(1000), OscillatorParams())


if __name__ == "__main__":
    unittest.main()
