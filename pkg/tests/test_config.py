"""
Unit tests for the ConfigManager component.
"""

import logging
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from chaoscomm.core.config_manager import ConfigManager, render_value, validate
from chaoscomm.core.errors import ConfigError


def diagnostics_of(text, **kwargs):
    """Diagnostics of a configuration that must be rejected."""
    with patch.object(logging.getLogger("chaoscomm.config"), "disabled", True):
        try:
            ConfigManager(text, **kwargs)
        except ConfigError as e:
            return e.diagnostics
    raise AssertionError("configuration was accepted")


class TestConfigParsing(unittest.TestCase):
    """Test cases for reading and rejecting configuration text."""

    def test_empty_config_needs_experiment(self):
        self.assertEqual(diagnostics_of(""), ["missing required key 'experiment'"])

    def test_errors_are_logged(self):
        with self.assertLogs("chaoscomm.config", level="ERROR") as logs:
            with self.assertRaises(ConfigError):
                ConfigManager("experiment: simulate\noscillator.alpha: -1\n", source="a.yaml")
        self.assertIn("a.yaml: line 2: alpha must be > 0", logs.output[0])

    def test_every_problem_reported(self):
        problems = diagnostics_of("experiment: simulate\noscillator.alpha: -1\nfoo.bar: 3\n")
        self.assertEqual(len(problems), 2)
        self.assertIn("line 2: alpha must be > 0 (got -1.0)", problems)
        self.assertIn("line 3: unknown key 'foo.bar'", problems)

    def test_duplicate_key(self):
        problems = diagnostics_of("experiment: ber\nseed: 1\nseed: 2\n")
        self.assertEqual(len(problems), 1)
        self.assertIn("first defined on line 2, again on line 3", problems[0])

    def test_nested_mapping_rejected(self):
        problems = diagnostics_of("experiment: ber\noscillator:\n  tau_f: 0.02\n")
        self.assertTrue(any(p.startswith("line 2: 'oscillator' holds a nested mapping")
                            for p in problems))

    def test_type_errors(self):
        problems = diagnostics_of("experiment: ber\nseed: abc\noutput.svg: 1\n")
        self.assertTrue(problems[0].startswith("line 2: seed:"))
        self.assertIn("line 3: output.svg: expected true or false (got 1)", problems)

    def test_range_errors(self):
        problems = diagnostics_of("experiment: mask\nmask.epsilon: 0.5\n")
        self.assertIn("line 2: mask.epsilon must be in [0.0, 0.2] (got 0.5)", problems)
        problems = diagnostics_of("experiment: dance\n")
        self.assertIn("line 1: experiment must be one of", problems[0])

    def test_invalid_yaml(self):
        problems = diagnostics_of("experiment: [ber\n")
        self.assertIn("invalid YAML", problems[0])

    def test_step_must_resolve_rc(self):
        problems = diagnostics_of("experiment: simulate\nsimulation.step: 1.0e-04\n")
        self.assertEqual(problems, ["simulation.step 0.0001 exceeds rc/50 = 2e-05 for node 0"])

    def test_transient_within_duration(self):
        problems = diagnostics_of("experiment: simulate\nsimulation.transient: 3.0\n")
        self.assertIn("simulation.transient must not exceed simulation.duration", problems)

    def test_missing_file(self):
        with self.assertRaises(ConfigError) as ctx:
            ConfigManager.from_file("/nonexistent/experiment.yaml")
        self.assertIn("cannot read configuration", ctx.exception.diagnostics[0])

    def test_from_file(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "run.yaml"
            path.write_text("experiment: simulate\nseed: 4\n")
            config = ConfigManager.from_file(path)
        self.assertEqual(config.seed, 4)
        self.assertEqual(config.source, str(path))


class TestNormalizedEcho(unittest.TestCase):
    """Test cases for validate and the normalized configuration text."""

    def test_defaults_filled(self):
        text = validate("experiment: ber\n")
        self.assertIn("experiment: ber\n", text)
        self.assertIn("modem.beta: 64\n", text)
        self.assertIn("ber.ebn0_grid: [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0]\n", text)
        self.assertIn("oscillator.tau_f: 0.018  # paper\n", text)
        self.assertIn("seed: 0\n", text)

    def test_paper_tag_dropped_when_changed(self):
        text = validate("experiment: simulate\noscillator.tau_f: 0.02\n")
        self.assertIn("oscillator.tau_f: 0.02\n", text)

    def test_normalization_is_idempotent(self):
        for source in ("experiment: ber\n",
                       "experiment: complexity\ncomplexity.fit_range: [2, 30]\n",
                       "experiment: simulate\nnode1.tau_f: 0.015\ntopology.kind: network\n"
                       "topology.matrix: [[0, 1], [1, 0]]\n"):
            with self.subTest(source=source):
                once = validate(source)
                self.assertEqual(validate(once), once)

    def test_exponent_floats(self):
        text = validate("experiment: simulate\nsimulation.step: 1e-05\n")
        self.assertIn("simulation.step: 1.0e-05\n", text)

    def test_render_value(self):
        self.assertEqual(render_value(None), "null")
        self.assertEqual(render_value(True), "true")
        self.assertEqual(render_value(2e-5), "2.0e-05")
        self.assertEqual(render_value(float("inf")), ".inf")
        self.assertEqual(render_value([1, 2.5]), "[1, 2.5]")
        self.assertEqual(render_value(""), "''")
        self.assertEqual(render_value("a: b"), "'a: b'")
        self.assertEqual(render_value("results"), "results")

    def test_node_overrides_follow_oscillator_block(self):
        lines = validate("experiment: simulate\nnode1.tau_f: 0.015\n").splitlines()
        index = lines.index("node1.tau_f: 0.015")
        self.assertTrue(lines[index - 1].startswith("oscillator.rc:"))


class TestConfigAccessors(unittest.TestCase):
    """Test cases for the objects built from a configuration."""

    def test_node_params(self):
        config = ConfigManager("experiment: simulate\nnode1.tau_f: 0.015\n")
        params = config.node_params()
        self.assertEqual([p.tau_f for p in params], [0.018, 0.015])

    def test_node_override_errors(self):
        self.assertEqual(diagnostics_of("experiment: simulate\nnode5.tau_f: 0.015\n"),
                         ["node5 overrides a node beyond simulation.nodes = 2"])
        self.assertEqual(diagnostics_of("experiment: simulate\nnode1.beta: 1\n"),
                         ["line 2: unknown node parameter 'node1.beta'"])
        problems = diagnostics_of("experiment: simulate\nnode1.tau_f: -1\n")
        self.assertTrue(problems[0].startswith("node1:"))

    def test_coupling_kinds(self):
        base = "experiment: simulate\nsimulation.nodes: 4\n"
        uncoupled = ConfigManager(base + "topology.kind: uncoupled\n").coupling()
        self.assertEqual(uncoupled.edges, ())
        directional = ConfigManager(base + "topology.kind: directional\n").coupling()
        self.assertEqual(len(directional.edges), 1)
        self.assertEqual(directional.node_count, 4)
        ring = ConfigManager(base + "topology.kind: network\n").coupling()
        self.assertEqual(len(ring.edges), 8)
        driven = ConfigManager(base + "topology.kind: external\n"
                                      "topology.drive_nodes: [2, 3]\n").coupling()
        self.assertEqual(driven.external_drive.nodes, frozenset({2, 3}))

    def test_bad_topology(self):
        problems = diagnostics_of("experiment: simulate\ntopology.follower: 5\n")
        self.assertTrue(problems[0].startswith("topology:"))

    def test_ber_spreading(self):
        self.assertEqual(ConfigManager("experiment: ber\n").ber_spreading(), 128)
        csk = ConfigManager("experiment: ber\nber.scheme: csk\nmodem.beta: 32\n")
        self.assertEqual(csk.ber_spreading(), 32)
        self.assertEqual(ConfigManager("experiment: ber\nber.scheme: bpsk\n").ber_spreading(), 1)
        self.assertEqual(diagnostics_of("experiment: ber\nber.spreading: 11\n"),
                         ["ber.spreading must be even for dcsk"])

    def test_channel_and_masking(self):
        config = ConfigManager("experiment: mask\nmask.epsilon: 0.1\nchannel.kind: two_ray\n")
        self.assertEqual(config.masking_config().epsilon, 0.1)
        self.assertEqual(config.channel_spec().kind.value, "two_ray")

    def test_fit_range_follows_delay(self):
        config = ConfigManager("experiment: complexity\n")
        self.assertEqual(config.complexity_settings(step=1e-4).fit_range, (1, 90))
        self.assertEqual(config.complexity_settings().fit_range, (1, 10))
        explicit = ConfigManager("experiment: complexity\ncomplexity.fit_range: [2, 30]\n")
        self.assertEqual(explicit.complexity_settings(step=1e-4).fit_range, (2, 30))
        self.assertEqual(diagnostics_of("experiment: complexity\ncomplexity.fit_range: [5, 5]\n"),
                         ["complexity.fit_range must be [first, last] with 0 <= first < last"])

    def test_overrides(self):
        config = ConfigManager("experiment: simulate\nseed: 1\n",
                               overrides={"seed": 5, "output.dir": "/tmp/out"})
        self.assertEqual(config.seed, 5)
        self.assertEqual(config.output_dir, Path("/tmp/out"))
        self.assertEqual(diagnostics_of("experiment: simulate\n", overrides={"seed": -1}),
                         ["command line: seed must be >= 0 (got -1)"])


if __name__ == "__main__":
    unittest.main()
