"""
Configuration manager for chaoscomm experiments.

An experiment file is a flat YAML mapping of dotted keys::

    experiment: simulate
    oscillator.tau_f: 0.018
    node1.tau_f: 0.015

Every known key has a default, a validator and, where the value comes from
the reference circuit, a ``paper`` marker shown in the normalized echo.
Per-node overrides ``node<i>.<field>`` replace ``oscillator.<field>`` for
node i.
"""

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import yaml

from chaoscomm.core.errors import ConfigError, InvalidParameter

logger = logging.getLogger("chaoscomm.config")

EXPERIMENTS = ("simulate", "sync-scan", "mask", "ber", "complexity")
OSCILLATOR_FIELDS = ("G", "alpha", "mu", "x_hat", "kappa_f", "tau_f", "rc")
NODE_KEY = re.compile(r"^node(\d+)\.(\w+)$")


class DottedKeyLoader(yaml.SafeLoader):
    """SafeLoader that records key lines and rejects duplicate or nested keys."""

    def __init__(self, stream):
        super().__init__(stream)
        self.key_lines: Dict[str, int] = {}
        self.diagnostics: List[str] = []

    def construct_mapping(self, node, deep=False):
        mapping = {}
        for key_node, value_node in node.value:
            line = key_node.start_mark.line + 1
            key = self.construct_object(key_node, deep=True)
            if not isinstance(key, str):
                self.diagnostics.append(f"line {line}: key {key!r} is not a string")
                continue
            if key in self.key_lines:
                self.diagnostics.append(
                    f"line {line}: duplicate key '{key}' (first defined on line "
                    f"{self.key_lines[key]}, again on line {line})")
                continue
            self.key_lines[key] = line
            if isinstance(value_node, yaml.MappingNode):
                self.diagnostics.append(
                    f"line {line}: '{key}' holds a nested mapping; use dotted keys instead")
                continue
            mapping[key] = self.construct_object(value_node, deep=True)
        return mapping


def _as_float(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(value)
    raise ValueError("expected a number")


def _as_int(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        return int(value)
    raise ValueError("expected an integer")


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    raise ValueError("expected true or false")


def _as_str(value: Any) -> str:
    if isinstance(value, str):
        return value
    raise ValueError("expected a string")


def _as_float_list(value: Any) -> List[float]:
    if not isinstance(value, list):
        raise ValueError("expected a list of numbers")
    return [_as_float(v) for v in value]


def _as_int_list(value: Any) -> List[int]:
    if not isinstance(value, list):
        raise ValueError("expected a list of integers")
    return [_as_int(v) for v in value]


def _as_matrix(value: Any) -> List[List[float]]:
    if not isinstance(value, list) or any(not isinstance(row, list) for row in value):
        raise ValueError("expected a list of rows")
    rows = [[_as_float(v) for v in row] for row in value]
    if rows and any(len(row) != len(rows) for row in rows):
        raise ValueError("matrix must be square")
    return rows


def _optional(convert: Callable[[Any], Any]) -> Callable[[Any], Any]:
    def wrapped(value):
        if value is None or value == "none":
            return None
        return convert(value)
    return wrapped


def positive(name: str):
    def check(value):
        if not value > 0:
            return f"{name} must be > 0 (got {value})"
        return None
    return check


def at_least(name: str, low):
    def check(value):
        if value < low:
            return f"{name} must be >= {low} (got {value})"
        return None
    return check


def within(name: str, low, high):
    def check(value):
        if not low <= value <= high:
            return f"{name} must be in [{low}, {high}] (got {value})"
        return None
    return check


def finite(name: str):
    def check(value):
        if not math.isfinite(value):
            return f"{name} must be finite (got {value})"
        return None
    return check


def one_of(name: str, choices: Sequence[str]):
    def check(value):
        if value not in choices:
            return f"{name} must be one of {', '.join(choices)} (got {value!r})"
        return None
    return check


def each(check_one):
    def check(values):
        for value in values:
            problem = check_one(value)
            if problem:
                return problem
        return None
    return check


def non_empty(name: str):
    def check(values):
        if not values:
            return f"{name} must not be empty"
        return None
    return check


@dataclass(frozen=True)
class KeySpec:
    convert: Callable[[Any], Any]
    default: Any
    check: Optional[Callable[[Any], Optional[str]]] = None
    paper: bool = False
    required: bool = False


KEYS: Dict[str, KeySpec] = {
    "experiment": KeySpec(_as_str, None, one_of("experiment", EXPERIMENTS), required=True),
    "seed": KeySpec(_as_int, 0, at_least("seed", 0)),

    "oscillator.G": KeySpec(_as_float, 0.7, finite("G"), paper=True),
    "oscillator.alpha": KeySpec(_as_float, 2.0, positive("alpha"), paper=True),
    "oscillator.mu": KeySpec(_as_float, 1.0, positive("mu"), paper=True),
    "oscillator.x_hat": KeySpec(_as_float, 0.4, positive("x_hat"), paper=True),
    "oscillator.kappa_f": KeySpec(_as_float, 0.4, finite("kappa_f"), paper=True),
    "oscillator.tau_f": KeySpec(_as_float, 0.018, positive("tau_f"), paper=True),
    "oscillator.rc": KeySpec(_as_float, 1.0e-3, positive("rc"), paper=True),

    "simulation.nodes": KeySpec(_as_int, 2, at_least("simulation.nodes", 1), paper=True),
    "simulation.duration": KeySpec(_as_float, 2.0, positive("simulation.duration")),
    "simulation.step": KeySpec(_as_float, 1.0e-5, positive("simulation.step")),
    "simulation.transient": KeySpec(_as_float, 1.0, at_least("simulation.transient", 0.0)),
    "simulation.sample_every": KeySpec(_as_int, 1, at_least("simulation.sample_every", 1)),

    "topology.kind": KeySpec(_as_str, "bidirectional",
                             one_of("topology.kind", ("uncoupled", "directional", "bidirectional",
                                                      "external", "network")), paper=True),
    "topology.kappa_c": KeySpec(_as_float, 1.0, finite("kappa_c"), paper=True),
    "topology.tau_c": KeySpec(_as_float, 0.018, positive("tau_c"), paper=True),
    "topology.driver": KeySpec(_as_int, 0, at_least("topology.driver", 0)),
    "topology.follower": KeySpec(_as_int, 1, at_least("topology.follower", 0)),
    "topology.matrix": KeySpec(_as_matrix, []),
    "topology.drive_nodes": KeySpec(_as_int_list, [0, 1], each(at_least("topology.drive_nodes", 0))),
    "topology.drive_amplitude": KeySpec(_as_float, 0.1, finite("topology.drive_amplitude")),
    "topology.drive_frequency": KeySpec(_as_float, 10.0, positive("topology.drive_frequency")),
    "topology.drive_gain": KeySpec(_as_float, 1.0, finite("topology.drive_gain")),

    "sync.max_lag": KeySpec(_as_float, 0.005, at_least("sync.max_lag", 0.0)),
    "sync_scan.parameter": KeySpec(_as_str, "tau_f", one_of("sync_scan.parameter", OSCILLATOR_FIELDS)),
    "sync_scan.node": KeySpec(_as_int, 1, at_least("sync_scan.node", 1)),
    "sync_scan.values": KeySpec(_as_float_list, [0.018, 0.0171, 0.0162, 0.0153, 0.015],
                                non_empty("sync_scan.values")),

    "mask.epsilon": KeySpec(_as_float, 0.05, within("mask.epsilon", 0.0, 0.2)),
    "mask.bit_duration": KeySpec(_as_float, 0.2, positive("mask.bit_duration")),
    "mask.bits": KeySpec(_as_int, 200, at_least("mask.bits", 1)),
    "mask.receiver_tau_f": KeySpec(_optional(_as_float), None),
    "mask.require_sync": KeySpec(_as_bool, True),
    "mask.residual_every": KeySpec(_as_int, 100, at_least("mask.residual_every", 1)),

    "modem.beta": KeySpec(_as_int, 64, at_least("modem.beta", 1)),
    "ber.scheme": KeySpec(_as_str, "dcsk", one_of("ber.scheme", ("bpsk", "csk", "dcsk"))),
    "ber.spreading": KeySpec(_optional(_as_int), None),
    "ber.ebn0_grid": KeySpec(_as_float_list, [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0],
                             non_empty("ber.ebn0_grid")),
    "ber.bits_per_point": KeySpec(_as_int, 100000, at_least("ber.bits_per_point", 10000)),
    "ber.chip_source": KeySpec(_as_str, "logistic",
                               one_of("ber.chip_source", ("logistic", "mackey_glass"))),
    "ber.csk_reference": KeySpec(_as_str, "genie", one_of("ber.csk_reference", ("genie", "sync"))),
    "channel.kind": KeySpec(_as_str, "awgn", one_of("channel.kind", ("awgn", "two_ray"))),
    "channel.ray2_power_db": KeySpec(_as_float, 0.0),
    "channel.ray2_delay_chips": KeySpec(_as_int, 2, at_least("channel.ray2_delay_chips", 1)),

    "complexity.input": KeySpec(_as_str, ""),
    "complexity.column": KeySpec(_as_int, 0, at_least("complexity.column", 0)),
    "complexity.k": KeySpec(_as_int, 4, at_least("complexity.k", 2)),
    "complexity.binning": KeySpec(_as_str, "quantile",
                                  one_of("complexity.binning", ("quantile", "uniform"))),
    "complexity.L_max": KeySpec(_as_int, 8, at_least("complexity.L_max", 1)),
    "complexity.embed_dim": KeySpec(_as_int, 3, at_least("complexity.embed_dim", 1)),
    "complexity.embed_lag": KeySpec(_as_int, 1, at_least("complexity.embed_lag", 1)),
    "complexity.theiler": KeySpec(_as_int, 10, at_least("complexity.theiler", 0)),
    "complexity.fit_range": KeySpec(_optional(_as_int_list), None),
    "complexity.lyapunov": KeySpec(_as_bool, True),
    "complexity.max_exact_n": KeySpec(_as_int, 12, at_least("complexity.max_exact_n", 1)),
    "complexity.subset_samples": KeySpec(_as_int, 256, at_least("complexity.subset_samples", 1)),

    "output.dir": KeySpec(_as_str, "results"),
    "output.svg": KeySpec(_as_bool, False),
}


def render_value(value: Any) -> str:
    """YAML text that loads back to ``value``."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ".nan"
        if math.isinf(value):
            return ".inf" if value > 0 else "-.inf"
        text = repr(value)
        if "e" in text:
            # the YAML 1.1 float pattern needs a dot and a signed exponent
            mantissa, exponent = text.split("e")
            if "." not in mantissa:
                mantissa += ".0"
            if exponent[0] not in "+-":
                exponent = "+" + exponent
            text = f"{mantissa}e{exponent}"
        return text
    if isinstance(value, list):
        return "[" + ", ".join(render_value(v) for v in value) + "]"
    text = str(value)
    if text and yaml.safe_load(text) == text and ":" not in text and "#" not in text:
        return text
    return "'" + text.replace("'", "''") + "'"


def parse_text(text: str) -> Tuple[Dict[str, Any], Dict[str, int], List[str]]:
    """Raw key/value mapping, key line numbers and parse diagnostics."""
    loader = DottedKeyLoader(text)
    try:
        data = loader.get_single_data()
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark is not None else ""
        return {}, {}, [f"{where}invalid YAML: {getattr(e, 'problem', None) or e}"]
    finally:
        loader.dispose()
    diagnostics = list(loader.diagnostics)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        return {}, {}, ["line 1: configuration must be a mapping of dotted keys"]
    return data, dict(loader.key_lines), diagnostics


class ConfigManager:
    """Validated, normalized configuration of one experiment."""

    def __init__(self, text: str = "", source: str = "<config>",
                 overrides: Optional[Dict[str, Any]] = None):
        """Parse and validate a configuration.

        Args:
            text: YAML text of the configuration file.
            source: Name used in log messages.
            overrides: Values that replace the file's (command-line flags).

        Raises:
            ConfigError: With one diagnostic per violation.
        """
        self.source = source
        self._values: Dict[str, Any] = {}
        self._nodes: Dict[int, Dict[str, float]] = {}
        self._load(text, overrides or {})
        logger.debug(f"Loaded configuration from {source}")

    @classmethod
    def from_file(cls, path, overrides: Optional[Dict[str, Any]] = None) -> "ConfigManager":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError([f"{path}: cannot read configuration ({e.strerror or e})"])
        return cls(text, str(path), overrides)

    def _load(self, text: str, overrides: Dict[str, Any]) -> None:
        raw, lines, diagnostics = parse_text(text)
        for key, value in overrides.items():
            raw[key] = value
            lines[key] = 0

        def where(key: str) -> str:
            line = lines.get(key, 0)
            return f"line {line}: " if line else "command line: "

        for key, value in raw.items():
            node_match = NODE_KEY.match(key)
            if node_match:
                node, name = int(node_match.group(1)), node_match.group(2)
                if name not in OSCILLATOR_FIELDS:
                    diagnostics.append(f"{where(key)}unknown node parameter '{key}'")
                    continue
                try:
                    self._nodes.setdefault(node, {})[name] = _as_float(value)
                except ValueError as e:
                    diagnostics.append(f"{where(key)}{key}: {e} (got {value!r})")
                continue
            spec = KEYS.get(key)
            if spec is None:
                diagnostics.append(f"{where(key)}unknown key '{key}'")
                continue
            try:
                converted = spec.convert(value)
            except (TypeError, ValueError) as e:
                diagnostics.append(f"{where(key)}{key}: {e} (got {value!r})")
                continue
            problem = spec.check(converted) if spec.check and converted is not None else None
            if problem:
                diagnostics.append(f"{where(key)}{problem}")
                continue
            self._values[key] = converted

        for key, spec in KEYS.items():
            if key in raw:
                continue
            if spec.required:
                diagnostics.append(f"missing required key '{key}'")
            else:
                self._values[key] = spec.default

        if not diagnostics:
            diagnostics.extend(self._cross_checks())
        if diagnostics:
            for diagnostic in diagnostics:
                logger.error(f"{self.source}: {diagnostic}")
            raise ConfigError(diagnostics)

    def _cross_checks(self) -> List[str]:
        problems: List[str] = []
        nodes = self.get("simulation.nodes")
        for node in sorted(self._nodes):
            if node >= nodes:
                problems.append(f"node{node} overrides a node beyond simulation.nodes = {nodes}")
        if problems:
            return problems
        try:
            params = self.node_params()
        except InvalidParameter as e:
            return [str(e)]
        step = self.get("simulation.step")
        for i, p in enumerate(params):
            if step > p.max_step * (1.0 + 1e-12):
                problems.append(f"simulation.step {step:g} exceeds rc/50 = {p.max_step:g} for node {i}")
        if self.get("simulation.transient") > self.get("simulation.duration"):
            problems.append("simulation.transient must not exceed simulation.duration")
        try:
            self.coupling()
        except Exception as e:
            problems.append(f"topology: {e}")
        if self.get("experiment") == "sync-scan" and self.get("sync_scan.node") >= nodes:
            problems.append(f"sync_scan.node must be below simulation.nodes = {nodes}")
        fit_range = self.get("complexity.fit_range")
        if fit_range is not None and (len(fit_range) != 2 or not 0 <= fit_range[0] < fit_range[1]):
            problems.append("complexity.fit_range must be [first, last] with 0 <= first < last")
        if self.get("ber.scheme") == "dcsk" and self.get("ber.spreading") is not None \
                and self.get("ber.spreading") % 2:
            problems.append("ber.spreading must be even for dcsk")
        return problems

    def get(self, key: str) -> Any:
        return self._values[key]

    @property
    def values(self) -> Dict[str, Any]:
        return dict(self._values)

    @property
    def experiment(self) -> str:
        return self._values["experiment"]

    @property
    def seed(self) -> int:
        return self._values["seed"]

    @property
    def output_dir(self) -> Path:
        return Path(self._values["output.dir"])

    @property
    def svg(self) -> bool:
        return self._values["output.svg"]

    def node_params(self):
        """OscillatorParams per node: oscillator.* with node overrides applied."""
        from chaoscomm.dynamics.oscillator import OscillatorParams

        base = {name: self._values[f"oscillator.{name}"] for name in OSCILLATOR_FIELDS}
        params = []
        for i in range(self._values["simulation.nodes"]):
            fields = dict(base, **self._nodes.get(i, {}))
            try:
                params.append(OscillatorParams(**fields))
            except InvalidParameter as e:
                raise InvalidParameter(f"node{i}: {e}") from e
        return params

    def coupling(self):
        """CouplingSpec described by the topology.* keys."""
        from chaoscomm.dynamics.drive import DriveSignal
        from chaoscomm.network import coupling as net

        n = self._values["simulation.nodes"]
        kind = self._values["topology.kind"]
        kappa_c = self._values["topology.kappa_c"]
        tau_c = self._values["topology.tau_c"]
        a, b = self._values["topology.driver"], self._values["topology.follower"]
        if kind == "uncoupled":
            return net.CouplingSpec.uncoupled(n)
        if kind in ("directional", "bidirectional"):
            if max(a, b) >= n:
                raise InvalidParameter(f"driver/follower must be below simulation.nodes = {n}")
            build = net.directional if kind == "directional" else net.bidirectional
            return build(a, b, kappa_c, tau_c).with_node_count(n)
        if kind == "external":
            drive = DriveSignal.sine(self._values["topology.drive_amplitude"],
                                     self._values["topology.drive_frequency"])
            return net.external_driving(self._values["topology.drive_nodes"], drive,
                                        self._values["topology.drive_gain"], node_count=n)
        matrix = self._values["topology.matrix"] or net.ring_adjacency(n, kappa_c)
        return net.network_coupling(n, matrix, tau_c)

    def masking_config(self):
        from chaoscomm.sync.masking import MaskingConfig

        return MaskingConfig(epsilon=self._values["mask.epsilon"],
                             bit_duration=self._values["mask.bit_duration"],
                             step=self._values["simulation.step"],
                             transient=self._values["simulation.transient"],
                             max_lag=self._values["sync.max_lag"])

    def ber_spreading(self) -> int:
        """Chips per bit: ber.spreading, else 1 / beta / 2*beta by scheme."""
        if self._values["ber.spreading"] is not None:
            return self._values["ber.spreading"]
        beta = self._values["modem.beta"]
        return {"bpsk": 1, "csk": beta, "dcsk": 2 * beta}[self._values["ber.scheme"]]

    def channel_spec(self):
        from chaoscomm.modem.channel import ChannelSpec

        return ChannelSpec(kind=self._values["channel.kind"],
                           ray2_power_db=self._values["channel.ray2_power_db"],
                           ray2_delay_chips=self._values["channel.ray2_delay_chips"])

    def complexity_settings(self, step: float = 1.0):
        """ComplexitySettings for signals sampled every ``step`` seconds.

        Without complexity.fit_range the Lyapunov fit covers half a feedback
        delay, (1, tau_f/step/2), and never less than the library default.
        """
        from chaoscomm.complexity.embedding import DEFAULT_FIT_RANGE
        from chaoscomm.complexity.report import ComplexitySettings

        fit_range = self._values["complexity.fit_range"]
        if fit_range is None:
            half_delay = int(round(self._values["oscillator.tau_f"] / step / 2.0))
            fit_range = (DEFAULT_FIT_RANGE[0], max(DEFAULT_FIT_RANGE[1], half_delay))
        return ComplexitySettings(k=self._values["complexity.k"],
                                  binning=self._values["complexity.binning"],
                                  L_max=self._values["complexity.L_max"],
                                  embed_dim=self._values["complexity.embed_dim"],
                                  embed_lag=self._values["complexity.embed_lag"],
                                  theiler=self._values["complexity.theiler"],
                                  fit_range=(int(fit_range[0]), int(fit_range[1])),
                                  step=step,
                                  lyapunov=self._values["complexity.lyapunov"],
                                  max_exact_n=self._values["complexity.max_exact_n"],
                                  subset_samples=self._values["complexity.subset_samples"])

    def normalized_text(self) -> str:
        """Every key with its value, defaults filled, paper values tagged."""
        lines = []
        for key, spec in KEYS.items():
            value = self._values[key]
            line = f"{key}: {render_value(value)}"
            if spec.paper and value == spec.default:
                line += "  # paper"
            lines.append(line)
            if key == "oscillator.rc":
                for node in sorted(self._nodes):
                    for name in OSCILLATOR_FIELDS:
                        if name in self._nodes[node]:
                            lines.append(f"node{node}.{name}: {render_value(self._nodes[node][name])}")
        return "\n".join(lines) + "\n"


def validate(text: str) -> str:
    """Normalized configuration text, or ConfigError with all diagnostics."""
    return ConfigManager(text).normalized_text()
