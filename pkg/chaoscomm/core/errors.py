"""
Error types raised by the chaoscomm library.

Library code raises these; the experiment runner in ``main.py`` maps them to
process exit codes.
"""

from typing import List, Optional


class ChaosCommError(Exception):
    """Base class for every error raised by chaoscomm."""


class InvalidParameter(ChaosCommError, ValueError):
    """A constructor or operation argument is outside its admissible range."""


class ConfigError(ChaosCommError):
    """The experiment configuration failed to parse or validate.

    Carries every diagnostic found, not only the first one.
    """

    def __init__(self, diagnostics: List[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics) or "invalid configuration")


class StepTooLarge(ChaosCommError):
    """Integration step exceeds rc/50 for some node."""


class DelayUnresolvable(ChaosCommError):
    """A delayed lookup falls outside the stored history."""


class SelfCoupling(ChaosCommError):
    """An edge would connect a node to itself."""


class EmptyNodeSet(ChaosCommError):
    """External driving was requested for no nodes."""


class NonzeroDiagonal(ChaosCommError):
    """A coupling matrix carries self-coupling on its diagonal."""


class WindowTooShort(ChaosCommError):
    """Signals are too short for the requested lag search."""


class NotSynchronized(ChaosCommError):
    """A receiver failed to synchronize with the received line."""

    def __init__(self, message: str, correlation: Optional[float] = None):
        self.correlation = correlation
        super().__init__(message)


class OddSpreading(ChaosCommError):
    """DCSK needs an even number of chips per bit."""


class MissingReference(ChaosCommError):
    """Coherent CSK demodulation was asked for without reference chips."""


class DegenerateSignal(ChaosCommError):
    """A constant signal cannot be quantile-binned."""


class TooShort(ChaosCommError):
    """A signal is too short for the requested embedding."""


class NoNeighbors(ChaosCommError):
    """No nearest-neighbour candidate survives the Theiler window."""


class SingularCovariance(ChaosCommError):
    """Covariance regularization failed, usually because of non-finite input."""
