"""
Unit tests for the synchronization report and the mismatch sweep.
"""

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from chaoscomm.core.errors import InvalidParameter, WindowTooShort
from chaoscomm.dynamics import OscillatorParams, integrate
from chaoscomm.network import bidirectional
from chaoscomm.scheduler.task_scheduler import TaskScheduler
from chaoscomm.sync import SyncClass, sync_report, sync_scan
from chaoscomm.sync.report import classify, lagged_pair, pearson


class TestSyncReport(unittest.TestCase):
    """Test cases for sync_report on constructed signals."""

    def setUp(self):
        self.step = 1e-4
        self.a = np.random.default_rng(3).normal(size=20_000)

    def test_identical_signals(self):
        report = sync_report(self.a, self.a, self.step)
        self.assertAlmostEqual(report.pearson, 1.0, places=12)
        self.assertEqual(report.lag, 0.0)
        self.assertEqual(report.classification, SyncClass.ISOCHRONAL)
        self.assertTrue(report.synchronized)

    def test_circular_delay(self):
        b = np.roll(self.a, 180)
        report = sync_report(self.a, b, self.step, max_lag=0.03)
        self.assertAlmostEqual(report.lag, 0.018, delta=self.step)
        self.assertEqual(report.lag_samples, 180)
        self.assertEqual(report.classification, SyncClass.ACHRONAL)

    def test_independent_signals(self):
        b = np.random.default_rng(4).normal(size=self.a.size)
        report = sync_report(self.a, b, self.step)
        self.assertLess(abs(report.pearson), 0.1)
        self.assertEqual(report.classification, SyncClass.UNSYNCHRONIZED)

    @settings(deadline=None, max_examples=25)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(-40, 40))
    def test_swap_negates_lag(self, seed, shift):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=4000)
        b = np.roll(a, shift) + 0.5 * rng.normal(size=a.size)
        forward = sync_report(a, b, self.step)
        backward = sync_report(b, a, self.step)
        self.assertEqual(forward.lag_samples, -backward.lag_samples)
        self.assertAlmostEqual(forward.pearson, backward.pearson, delta=1e-12)

    @settings(deadline=None, max_examples=25)
    @given(st.floats(0.01, 100.0), st.floats(-10.0, 10.0))
    def test_affine_invariance(self, scale, offset):
        report = sync_report(self.a, scale * self.a + offset, self.step)
        self.assertAlmostEqual(report.pearson, 1.0, delta=1e-9)
        self.assertEqual(report.lag_samples, 0)

    def test_window_recorded(self):
        report = sync_report(self.a, self.a, self.step, start=1.0)
        self.assertEqual(report.window, (1.0, 1.0 + (self.a.size - 1) * self.step))
        self.assertEqual(set(report.to_dict()),
                         {"pearson", "lag_s", "classification", "window_start_s",
                          "window_end_s"})

    def test_window_too_short(self):
        with self.assertRaises(WindowTooShort):
            sync_report(self.a[:60], self.a[:60], self.step, max_lag=0.005)

    def test_length_mismatch(self):
        with self.assertRaises(InvalidParameter):
            sync_report(self.a, self.a[:-1], self.step)

    def test_classify_thresholds(self):
        self.assertEqual(classify(0.95, 2), SyncClass.ISOCHRONAL)
        self.assertEqual(classify(0.95, -3), SyncClass.ACHRONAL)
        self.assertEqual(classify(0.9499, 0), SyncClass.UNSYNCHRONIZED)

    def test_lagged_pair(self):
        a = np.arange(5)
        head, tail = lagged_pair(a, a, 2)
        np.testing.assert_array_equal(head, [0, 1, 2])
        np.testing.assert_array_equal(tail, [2, 3, 4])

    def test_pearson_of_constant(self):
        self.assertEqual(pearson(np.ones(10), np.arange(10.0)), 0.0)


class TestCoupledPair(unittest.TestCase):
    """Matched and mismatched bidirectionally coupled nodes."""

    @classmethod
    def setUpClass(cls):
        p = OscillatorParams()
        coupling = bidirectional(0, 1, 1.0, 0.018)
        cls.matched = integrate([p, p], coupling, duration=2.0, seed=0)
        cls.mismatched = integrate([p, p.replace(tau_f=0.015)], coupling, duration=2.0, seed=0)

    def report(self, run):
        return sync_report(run.post_transient(0), run.post_transient(1), run.step, 0.005,
                           start=run.transient_end * run.step)

    def test_matched_parameters_synchronize(self):
        report = self.report(self.matched)
        self.assertGreaterEqual(report.pearson, 0.99)
        self.assertEqual(report.classification, SyncClass.ISOCHRONAL)
        self.assertAlmostEqual(report.window[0], 1.0)

    def test_mismatched_delay_desynchronizes(self):
        report = self.report(self.mismatched)
        self.assertLess(report.pearson, 0.5)
        self.assertEqual(report.classification, SyncClass.UNSYNCHRONIZED)


class TestSyncScan(unittest.TestCase):

    def test_rows_follow_values(self):
        rows = sync_scan(OscillatorParams(), "tau_f", [0.018, 0.015], duration=2.0,
                         seed=0, scheduler=TaskScheduler(max_workers=2))
        self.assertEqual([r.value for r in rows], [0.018, 0.015])
        self.assertTrue(rows[0].report.synchronized)
        self.assertFalse(rows[1].report.synchronized)
        self.assertEqual(rows[0].as_row()[3], "isochronal")

    def test_array_values(self):
        rows = sync_scan(OscillatorParams(), "tau_f", np.array([0.018, 0.0171]), duration=0.3,
                         transient=0.1, seed=0, scheduler=TaskScheduler(max_workers=1))
        self.assertEqual([r.value for r in rows], [0.018, 0.0171])
        with self.assertRaises(InvalidParameter):
            sync_scan(OscillatorParams(), "tau_f", np.array([]))

    def test_unknown_parameter(self):
        with self.assertRaises(InvalidParameter):
            sync_scan(OscillatorParams(), "beta", [1.0])

    def test_scan_node_zero_rejected(self):
        with self.assertRaises(InvalidParameter):
            sync_scan(OscillatorParams(), "tau_f", [0.018], node=0)


if __name__ == "__main__":
    unittest.main()
