"""
Spread-spectrum modulation and detection.

Chips carry unit mean energy, so a bit spread over S chips has energy S in
chip units. Frames of one call are held together as an (n_bits, S) matrix.
"""

import enum
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from chaoscomm.core.errors import InvalidParameter, MissingReference, OddSpreading

logger = logging.getLogger("chaoscomm.modem")

DEFAULT_BETA = 64


class Scheme(str, enum.Enum):
    BPSK = "bpsk"
    CSK = "csk"
    DCSK = "dcsk"


def default_spreading(scheme) -> int:
    """Chips per bit when none is configured: BPSK 1, CSK beta, DCSK 2*beta."""
    scheme = Scheme(scheme)
    if scheme == Scheme.BPSK:
        return 1
    if scheme == Scheme.CSK:
        return DEFAULT_BETA
    return 2 * DEFAULT_BETA


@dataclass(frozen=True)
class SymbolFrame:
    chips: np.ndarray
    bit: int
    scheme: Scheme
    spreading: int


@dataclass(frozen=True)
class FrameBatch:
    """Consecutive frames of one scheme.

    Attributes:
        scheme: Modulation scheme.
        spreading: Chips per bit.
        bits: Transmitted bits, shape (n,).
        chips: Transmitted chips, shape (n, spreading).
        reference: Chaotic segment behind each frame (CSK segment or DCSK
            reference half); None for BPSK.
    """

    scheme: Scheme
    spreading: int
    bits: np.ndarray
    chips: np.ndarray
    reference: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return int(self.bits.size)

    def __iter__(self) -> Iterator[SymbolFrame]:
        for bit, chips in zip(self.bits, self.chips):
            yield SymbolFrame(chips, int(bit), self.scheme, self.spreading)

    def stream(self) -> np.ndarray:
        return self.chips.reshape(-1)

    def energy_per_bit(self) -> float:
        """Mean transmitted energy per bit, in units of spreading * chip energy."""
        return float(np.mean(np.sum(self.chips ** 2, axis=1)) / self.spreading)


def _unit_energy(segments: np.ndarray) -> np.ndarray:
    energy = np.sqrt(np.mean(segments ** 2, axis=1, keepdims=True))
    if np.any(energy == 0):
        raise InvalidParameter("chip segment with zero energy")
    return segments / energy


def modulate(bits: Sequence[int], scheme, spreading: int,
             chips: Optional[np.ndarray] = None) -> FrameBatch:
    """Map bits to frames.

    Args:
        bits: Bit sequence.
        scheme: "bpsk", "csk" or "dcsk".
        spreading: Chips per bit (even for DCSK).
        chips: Chaotic chips, at least n*spreading (CSK) or n*spreading/2
            (DCSK); ignored for BPSK.

    Raises:
        OddSpreading: DCSK with an odd spreading factor.
    """
    scheme = Scheme(scheme)
    bits = np.asarray(bits, dtype=int)
    if bits.ndim != 1 or np.any((bits != 0) & (bits != 1)):
        raise InvalidParameter("bits must be a 1-D sequence of 0/1")
    if spreading < 1:
        raise InvalidParameter("spreading must be >= 1")
    sign = (2 * bits - 1).astype(float)[:, None]
    n = bits.size

    if scheme == Scheme.BPSK:
        return FrameBatch(scheme, spreading, bits, np.repeat(sign, spreading, axis=1))

    if scheme == Scheme.DCSK and spreading % 2:
        raise OddSpreading(f"DCSK needs an even spreading factor (got {spreading})")
    width = spreading if scheme == Scheme.CSK else spreading // 2
    if chips is None:
        raise InvalidParameter(f"{scheme.value} modulation needs chaotic chips")
    chips = np.asarray(chips, dtype=float).reshape(-1)
    if chips.size < n * width:
        raise InvalidParameter(f"{n * width} chips needed, {chips.size} given")
    segments = _unit_energy(chips[: n * width].reshape(n, width))
    if scheme == Scheme.CSK:
        return FrameBatch(scheme, spreading, bits, sign * segments, segments)
    return FrameBatch(scheme, spreading, bits, np.hstack((segments, sign * segments)), segments)


def demodulate(received: np.ndarray, scheme, spreading: int,
               reference: Optional[np.ndarray] = None) -> np.ndarray:
    """Decide bits from received chips.

    Args:
        received: Received chips, flat or shaped (n, spreading).
        scheme: Modulation scheme.
        spreading: Chips per bit.
        reference: Replica of the CSK segments, shape (n, spreading).

    Raises:
        MissingReference: Coherent CSK without a reference.
    """
    scheme = Scheme(scheme)
    y = np.asarray(received, dtype=float).reshape(-1, spreading)
    if scheme == Scheme.BPSK:
        statistic = y.sum(axis=1)
    elif scheme == Scheme.CSK:
        if reference is None:
            raise MissingReference("coherent CSK detection needs the chip replica")
        replica = np.asarray(reference, dtype=float).reshape(y.shape)
        statistic = np.sum(y * replica, axis=1)
    else:
        if spreading % 2:
            raise OddSpreading(f"DCSK needs an even spreading factor (got {spreading})")
        half = spreading // 2
        statistic = np.sum(y[:, :half] * y[:, half:], axis=1)
    return (statistic > 0).astype(int)
