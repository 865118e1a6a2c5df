"""
Channel models: AWGN and two-ray block-fading Rayleigh.

Noise convention: with unit mean chip energy and S chips per bit, the
per-chip noise variance is sigma^2 = S / (2 * Eb/N0).
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from chaoscomm.core.errors import InvalidParameter
from chaoscomm.modem.frames import FrameBatch, Scheme
from chaoscomm.utils.seeding import rng_for

logger = logging.getLogger("chaoscomm.modem.channel")

SEVERE_RAY2_DB = 0.0
NEGLIGIBLE_RAY2_DB = -20.0
DEFAULT_RAY2_DELAY = 2


class ChannelKind(str, enum.Enum):
    AWGN = "awgn"
    TWO_RAY = "two_ray"


@dataclass(frozen=True)
class ChannelSpec:
    """Channel settings.

    Attributes:
        kind: awgn or two_ray.
        ebn0_db: Eb/N0 in dB; +inf disables the noise.
        ray2_power_db: Mean power of the second ray relative to the first (dB);
            -inf leaves a single flat Rayleigh ray.
        ray2_delay_chips: Delay of the second ray in chips (>= 1).
        block_fading: Fading held constant over each symbol (always true).
    """

    kind: ChannelKind = ChannelKind.AWGN
    ebn0_db: float = math.inf
    ray2_power_db: float = SEVERE_RAY2_DB
    ray2_delay_chips: int = DEFAULT_RAY2_DELAY
    block_fading: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        if math.isnan(self.ebn0_db) or self.ebn0_db == -math.inf:
            raise InvalidParameter(f"ebn0_db must be a number or +inf (got {self.ebn0_db})")
        if math.isnan(self.ray2_power_db) or self.ray2_power_db == math.inf:
            raise InvalidParameter("ray2_power_db must be finite or -inf")
        if int(self.ray2_delay_chips) != self.ray2_delay_chips or self.ray2_delay_chips < 1:
            raise InvalidParameter("ray2_delay_chips must be an integer >= 1")
        if not self.block_fading:
            raise InvalidParameter("only block fading is supported")

    @classmethod
    def severe(cls, ebn0_db: float = math.inf) -> "ChannelSpec":
        return cls(ChannelKind.TWO_RAY, ebn0_db, SEVERE_RAY2_DB, DEFAULT_RAY2_DELAY)

    @classmethod
    def negligible(cls, ebn0_db: float = math.inf) -> "ChannelSpec":
        return cls(ChannelKind.TWO_RAY, ebn0_db, NEGLIGIBLE_RAY2_DB, DEFAULT_RAY2_DELAY)

    def at(self, ebn0_db: float) -> "ChannelSpec":
        return ChannelSpec(self.kind, ebn0_db, self.ray2_power_db,
                           self.ray2_delay_chips, self.block_fading)

    @property
    def label(self) -> str:
        if self.kind == ChannelKind.AWGN:
            return "awgn"
        return f"two_ray({self.ray2_power_db:g}dB,{self.ray2_delay_chips})"

    def ray_powers(self) -> Tuple[float, float]:
        """Mean powers (E[h1^2], E[h2^2]), summing to one."""
        if self.ray2_power_db == -math.inf:
            return 1.0, 0.0
        ratio = 10.0 ** (self.ray2_power_db / 10.0)
        return 1.0 / (1.0 + ratio), ratio / (1.0 + ratio)


def noise_variance(ebn0_db: float, spreading: int) -> float:
    """Per-chip noise variance for unit chip energy; 0 when ebn0_db is +inf."""
    if ebn0_db == math.inf:
        return 0.0
    return spreading / (2.0 * 10.0 ** (ebn0_db / 10.0))


def rayleigh(rng: np.random.Generator, power: float, size: int) -> np.ndarray:
    """Real Rayleigh amplitudes with E[h^2] = power."""
    if power == 0.0:
        return np.zeros(size)
    gaussians = rng.standard_normal((size, 2))
    return np.sqrt(power / 2.0 * np.sum(gaussians ** 2, axis=1))


def channel_apply(frames: FrameBatch, spec: ChannelSpec,
                  seed: Union[int, np.random.Generator] = 0) -> np.ndarray:
    """Pass frames through the channel.

    ``seed`` is an integer seed or a Generator already positioned in its stream.

    Returns:
        Received chips shaped like ``frames.chips``. The stream is continuous:
        the delayed ray of a symbol's first chips carries the previous symbol.
    """
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed, 0)
    s = frames.chips
    n, spreading = s.shape
    if spec.kind == ChannelKind.TWO_RAY:
        delay = int(spec.ray2_delay_chips)
        if frames.scheme == Scheme.DCSK and delay >= spreading // 2:
            raise InvalidParameter(
                f"second-ray delay {delay} must stay within the DCSK half of {spreading // 2} chips")
        p1, p2 = spec.ray_powers()
        h1 = rayleigh(rng, p1, n)[:, None]
        h2 = rayleigh(rng, p2, n)[:, None]
        flat = s.reshape(-1)
        delayed = np.zeros_like(flat)
        if delay < flat.size:
            delayed[delay:] = flat[:-delay]
        y = h1 * s + h2 * delayed.reshape(n, spreading)
    else:
        y = s.copy()
    variance = noise_variance(spec.ebn0_db, spreading)
    if variance > 0.0:
        y = y + rng.normal(0.0, math.sqrt(variance), size=y.shape)
    return y
