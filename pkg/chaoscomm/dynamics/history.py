"""
Bounded history storage for delay differential equations.

A HistoryBuffer keeps the most recent samples of one node's state together
with their time derivatives, which is what cubic Hermite interpolation needs
to answer delayed lookups x(t - tau) between grid points.
"""

import logging
import math

import numpy as np

from chaoscomm.core.errors import DelayUnresolvable, InvalidParameter

logger = logging.getLogger("chaoscomm.dynamics.history")


def hermite_weights(theta: float):
    """Cubic Hermite basis at fractional position theta in [0, 1).

    Returns:
        (h00, h10, h01, h11): weights of y0, h*m0, y1, h*m1.
    """
    t2 = theta * theta
    t3 = t2 * theta
    return (2 * t3 - 3 * t2 + 1,
            t3 - 2 * t2 + theta,
            -2 * t3 + 3 * t2,
            t3 - t2)


class HistoryBuffer:
    """Ring of state values and slopes on a uniform time grid.

    Sample ``k`` is the state at time ``k * step``. Times before zero return the
    constant initial history. Lookups further back than ``capacity`` samples
    behind the newest written sample raise DelayUnresolvable.
    """

    def __init__(self, capacity: int, step: float, initial_value: float):
        """Initialize the buffer.

        Args:
            capacity: Number of samples kept.
            step: Sample period in seconds.
            initial_value: Constant history for t <= 0.
        """
        if capacity < 2:
            raise InvalidParameter("history capacity must be at least 2 samples")
        if step <= 0:
            raise InvalidParameter("history step must be > 0")
        self.capacity = int(capacity)
        self.step = float(step)
        self.initial_value = float(initial_value)
        self._values = np.full(self.capacity, self.initial_value)
        self._slopes = np.zeros(self.capacity)
        self.newest = 0

    @classmethod
    def for_delays(cls, max_delay: float, step: float, initial_value: float,
                   margin: int = 0) -> "HistoryBuffer":
        """Create a buffer that covers ``max_delay`` plus ``margin`` samples."""
        capacity = int(math.ceil(max_delay / step)) + int(margin) + 3
        return cls(capacity, step, initial_value)

    @property
    def span(self) -> float:
        """Longest lag, in seconds, that a lookup can resolve."""
        return self.capacity * self.step

    def write_values(self, start: int, values: np.ndarray) -> None:
        """Store states for samples ``start .. start + len(values) - 1``."""
        values = np.asarray(values, dtype=float)
        if len(values) > self.capacity:
            raise DelayUnresolvable("block larger than history capacity")
        idx = np.arange(start, start + len(values)) % self.capacity
        self._values[idx] = values
        self.newest = max(self.newest, start + len(values) - 1)

    def write_slopes(self, start: int, slopes: np.ndarray) -> None:
        """Store time derivatives for samples ``start .. start + len(slopes) - 1``."""
        idx = np.arange(start, start + len(slopes)) % self.capacity
        self._slopes[idx] = slopes

    def values_at(self, index: np.ndarray) -> np.ndarray:
        """States at integer sample indices (history value for negative ones)."""
        index = np.asarray(index)
        self._check(index)
        out = self._values[np.maximum(index, 0) % self.capacity]
        return np.where(index < 0, self.initial_value, out)

    def interpolate(self, index: np.ndarray, theta: float) -> np.ndarray:
        """States at times ``(index + theta) * step`` with 0 <= theta < 1.

        Exactly the stored sample when theta is zero; otherwise the cubic
        Hermite interpolant between samples ``index`` and ``index + 1``.
        """
        index = np.asarray(index)
        if theta == 0.0:
            return self.values_at(index)
        self._check(index + 1)
        h00, h10, h01, h11 = hermite_weights(theta)
        lo = np.maximum(index, 0) % self.capacity
        hi = np.maximum(index + 1, 0) % self.capacity
        inner = (h00 * self._values[lo] + h01 * self._values[hi]
                 + self.step * (h10 * self._slopes[lo] + h11 * self._slopes[hi]))
        # (index + theta) * step <= 0 lies inside the constant history
        return np.where(index < 0, self.initial_value, inner)

    def _check(self, index: np.ndarray) -> None:
        if index.size == 0:
            return
        oldest = self.newest - self.capacity + 1
        positive = index[index >= 0]
        if positive.size and (positive.min() < oldest or positive.max() > self.newest):
            raise DelayUnresolvable(
                f"lookup of samples [{positive.min()}, {positive.max()}] outside "
                f"stored range [{max(oldest, 0)}, {self.newest}]")
