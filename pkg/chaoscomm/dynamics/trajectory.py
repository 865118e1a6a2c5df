"""
Uniformly sampled multi-node time series and their CSV form.

CSV layout: header ``t,node0,node1,...``; time and values written with
9 significant digits.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from chaoscomm.core.errors import InvalidParameter
from chaoscomm.output.writers import atomic_write_text, format_number

logger = logging.getLogger("chaoscomm.dynamics.trajectory")


@dataclass(frozen=True)
class Trajectory:
    """Per-node sample sequences on a common grid.

    Attributes:
        node_count: Number of nodes.
        step: Sample period in seconds.
        transient_end: Index of the first sample that counts for statistics.
        data: Array of shape (node_count, samples); read-only.
        initial_history: Constant history each node started from.
    """

    node_count: int
    step: float
    transient_end: int
    data: np.ndarray = field(repr=False)
    initial_history: Tuple[float, ...] = ()

    def __post_init__(self):
        data = np.array(self.data, dtype=float, ndmin=2)
        if data.shape[0] != self.node_count:
            raise InvalidParameter(
                f"data has {data.shape[0]} rows for {self.node_count} nodes")
        if not self.step > 0:
            raise InvalidParameter("trajectory step must be > 0")
        if not 0 <= self.transient_end <= data.shape[1]:
            raise InvalidParameter("transient_end beyond the recorded samples")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "initial_history", tuple(float(h) for h in self.initial_history))

    @property
    def samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration(self) -> float:
        return (self.samples - 1) * self.step

    def times(self) -> np.ndarray:
        return self.step * np.arange(self.samples)

    def node(self, index: int) -> np.ndarray:
        return self.data[index]

    def post_transient(self, index: Optional[int] = None) -> np.ndarray:
        """Samples after the transient, for one node or all of them."""
        if index is None:
            return self.data[:, self.transient_end:]
        return self.data[index, self.transient_end:]

    def select(self, nodes: Sequence[int]) -> "Trajectory":
        """Trajectory restricted to ``nodes`` in the given order."""
        nodes = list(nodes)
        history = [self.initial_history[i] for i in nodes] if self.initial_history else []
        return Trajectory(len(nodes), self.step, self.transient_end,
                          self.data[nodes], tuple(history))


def trajectory_to_csv(trajectory: Trajectory) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t"] + [f"node{i}" for i in range(trajectory.node_count)])
    for t, row in zip(trajectory.times(), trajectory.data.T):
        writer.writerow([format_number(t)] + [format_number(v) for v in row])
    return buffer.getvalue()


def save_trajectory(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """Write the trajectory CSV atomically and return its path."""
    path = atomic_write_text(path, trajectory_to_csv(trajectory))
    logger.info(f"Wrote trajectory ({trajectory.node_count} nodes, "
                f"{trajectory.samples} samples) to {path}")
    return path


def load_trajectory(path: Union[str, Path], transient: float = 0.0) -> Trajectory:
    """Read a trajectory CSV written by save_trajectory.

    The step is taken from the first two time stamps; ``transient`` (seconds)
    sets the transient marker since the CSV does not carry it.
    """
    with open(path, "r", newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    if not header or header[0] != "t":
        raise InvalidParameter(f"{path} is not a trajectory CSV (missing 't' column)")
    table = np.array(body, dtype=float)
    if table.shape[0] < 2:
        raise InvalidParameter(f"{path} holds fewer than two samples")
    step = float(table[1, 0] - table[0, 0])
    transient_end = min(int(math.ceil(transient / step - 1e-9)), table.shape[0])
    return Trajectory(len(header) - 1, step, transient_end, table[:, 1:].T)


def autocorrelation(signal: np.ndarray, lag_samples: int) -> float:
    """Sample autocorrelation of ``signal`` at a lag of ``lag_samples``."""
    x = np.asarray(signal, dtype=float)
    lag = abs(int(lag_samples))
    if lag >= x.size - 1:
        raise InvalidParameter(f"lag {lag} leaves fewer than two samples of {x.size}")
    centered = x - x.mean()
    variance = float(np.dot(centered, centered))
    if variance == 0.0:
        return 1.0 if lag == 0 else 0.0
    return float(np.dot(centered[: x.size - lag], centered[lag:]) / variance)
