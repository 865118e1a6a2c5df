"""
External drive signals d(t) added to a node's input.
"""

from typing import Callable, Optional

import numpy as np

from chaoscomm.core.errors import InvalidParameter


class DriveSignal:
    """A time function evaluated on arrays of times (seconds), times a gain."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray],
                 gain: float = 1.0, name: str = "drive"):
        self.func = func
        self.gain = float(gain)
        self.name = name

    def __call__(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        if self.gain == 0.0:
            return np.zeros_like(times)
        return self.gain * np.asarray(self.func(times), dtype=float)

    def __repr__(self) -> str:
        return f"DriveSignal({self.name!r}, gain={self.gain})"

    @property
    def is_zero(self) -> bool:
        return self.gain == 0.0

    def scaled(self, gain: float) -> "DriveSignal":
        """Same waveform with the gain multiplied by ``gain``."""
        return DriveSignal(self.func, self.gain * gain, self.name)

    @classmethod
    def zero(cls) -> "DriveSignal":
        return cls(np.zeros_like, gain=0.0, name="zero")

    @classmethod
    def sine(cls, amplitude: float, frequency: float, phase: float = 0.0,
             offset: float = 0.0) -> "DriveSignal":
        """offset + amplitude * sin(2*pi*frequency*t + phase)."""
        if frequency <= 0:
            raise InvalidParameter("sine drive frequency must be > 0")

        def wave(t):
            return offset + amplitude * np.sin(2.0 * np.pi * frequency * t + phase)

        return cls(wave, name=f"sine({amplitude}, {frequency} Hz)")

    @classmethod
    def from_samples(cls, values: np.ndarray, step: float, gain: float = 1.0,
                     start: float = 0.0, name: Optional[str] = None) -> "DriveSignal":
        """Linearly interpolated recording; holds the end values outside its span."""
        samples = np.asarray(values, dtype=float).copy()
        if samples.ndim != 1 or samples.size < 2:
            raise InvalidParameter("recorded drive needs a 1-D array of >= 2 samples")
        if step <= 0:
            raise InvalidParameter("recorded drive step must be > 0")
        grid = start + step * np.arange(samples.size)

        def playback(t):
            return np.interp(t, grid, samples)

        return cls(playback, gain=gain, name=name or f"recording[{samples.size}]")
