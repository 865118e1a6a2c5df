"""
Monte-Carlo bit error rate sweeps and their closed-form references.

Every Eb/N0 point draws its bits, chips, fading and noise from streams derived
from (seed, point index), so a curve does not depend on how its points are
scheduled.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from chaoscomm.core.errors import InvalidParameter, OddSpreading
from chaoscomm.modem.channel import ChannelSpec, channel_apply
from chaoscomm.modem.chips import ChipKind, chip_source, synchronized_replica
from chaoscomm.modem.frames import Scheme, default_spreading, demodulate, modulate
from chaoscomm.scheduler.task_scheduler import TaskScheduler
from chaoscomm.utils.seeding import derive_seed, point_rng, purpose_key

logger = logging.getLogger("chaoscomm.modem.ber")

MIN_BITS_PER_POINT = 10_000
MIN_ERRORS = 10
WILSON_Z = 1.96
CHUNK_BITS = 8192
BER_HEADER = ("scheme", "channel", "ebn0_db", "bits", "errors", "ber", "ci_lo", "ci_hi")


def q_function(x: float) -> float:
    return float(norm.sf(x))


def wilson_interval(errors: int, n: int, z: float = WILSON_Z) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion errors/n."""
    if n <= 0:
        raise InvalidParameter("wilson interval needs n >= 1")
    if not 0 <= errors <= n:
        raise InvalidParameter(f"errors must be in 0..{n} (got {errors})")
    p = errors / n
    z2 = z * z
    centre = (p + z2 / (2 * n)) / (1 + z2 / n)
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
    return max(0.0, centre - half), min(1.0, centre + half)


def theoretical_ber(scheme, ebn0_db: float, spreading: Optional[int] = None,
                    channel: str = "awgn") -> float:
    """Closed-form BER.

    BPSK/CSK over AWGN: Q(sqrt(2 g)); BPSK/CSK over flat Rayleigh:
    (1 - sqrt(g / (1 + g))) / 2; DCSK over AWGN with beta = spreading/2
    reference chips: Q((2/g + beta/g^2)^(-1/2)).
    """
    scheme = Scheme(scheme)
    gamma = 10.0 ** (ebn0_db / 10.0)
    if channel == "rayleigh":
        if scheme == Scheme.DCSK:
            raise InvalidParameter("no closed form for DCSK over Rayleigh fading")
        return 0.5 * (1.0 - math.sqrt(gamma / (1.0 + gamma)))
    if channel != "awgn":
        raise InvalidParameter(f"unknown channel {channel!r}")
    if scheme == Scheme.DCSK:
        beta = (spreading or default_spreading(scheme)) / 2.0
        return q_function((2.0 / gamma + beta / gamma ** 2) ** -0.5)
    return q_function(math.sqrt(2.0 * gamma))


@dataclass(frozen=True)
class BerPoint:
    ebn0_db: float
    bit_errors: int
    bits_simulated: int
    ci95: Tuple[float, float]
    under_sampled: bool = False

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_simulated

    @property
    def standard_error(self) -> float:
        """Wilson half-width divided by z."""
        return (self.ci95[1] - self.ci95[0]) / (2.0 * WILSON_Z)


@dataclass(frozen=True)
class BerCurve:
    scheme: Scheme
    channel: ChannelSpec
    spreading: int
    seed: int
    points: Tuple[BerPoint, ...] = field(default=())

    def rows(self) -> List[List[Any]]:
        return [[self.scheme.value, self.channel.label, p.ebn0_db, p.bits_simulated,
                 p.bit_errors, p.ber, p.ci95[0], p.ci95[1]] for p in self.points]

    def point(self, ebn0_db: float) -> BerPoint:
        for p in self.points:
            if p.ebn0_db == ebn0_db:
                return p
        raise KeyError(ebn0_db)


@dataclass(frozen=True)
class BerSettings:
    scheme: Scheme
    channel: ChannelSpec
    spreading: int
    bits: int
    seed: int
    chip_kind: ChipKind = ChipKind.LOGISTIC
    csk_reference: str = "genie"


def _chunk_chips(settings: BerSettings, count: int, index: int, chunk: int):
    """Transmit chips and the receiver's replica for one chunk."""
    chip_seed = derive_seed(settings.seed, index, chunk, purpose_key("chips"))
    if settings.csk_reference == "sync":
        sent, replica = synchronized_replica(count, chip_seed,
                                             derive_seed(chip_seed, purpose_key("receiver")))
        return sent, replica
    chips = chip_source(settings.chip_kind, count, chip_seed)
    return chips, None


def simulate_point(index: int, ebn0_db: float, settings: BerSettings) -> BerPoint:
    """Monte-Carlo errors at one Eb/N0 point, processed in chunks of bits."""
    scheme, spreading = settings.scheme, settings.spreading
    channel = settings.channel.at(ebn0_db)
    bit_rng = point_rng(settings.seed, index, "bits")
    channel_rng = point_rng(settings.seed, index, "channel")
    width = spreading if scheme == Scheme.CSK else spreading // 2
    errors = 0
    done = 0
    chunk = 0
    while done < settings.bits:
        count = min(CHUNK_BITS, settings.bits - done)
        bits = bit_rng.integers(0, 2, size=count)
        chips, replica = (None, None)
        if scheme != Scheme.BPSK:
            chips, replica = _chunk_chips(settings, count * width, index, chunk)
        frames = modulate(bits, scheme, spreading, chips)
        received = channel_apply(frames, channel, channel_rng)
        reference = None
        if scheme == Scheme.CSK:
            if replica is None:
                reference = frames.reference
            else:
                reference = modulate(np.ones(count, dtype=int), scheme, spreading, replica).reference
        decided = demodulate(received, scheme, spreading, reference)
        errors += int(np.count_nonzero(decided != bits))
        done += count
        chunk += 1
    point = BerPoint(float(ebn0_db), errors, done, wilson_interval(errors, done),
                     under_sampled=errors < MIN_ERRORS)
    if point.under_sampled:
        logger.warning(f"{scheme.value} at {ebn0_db:g} dB: only {errors} errors in "
                       f"{done} bits, point is under-sampled")
    logger.info(f"{scheme.value}/{channel.label} at {ebn0_db:g} dB: BER={point.ber:.4g} "
                f"({errors}/{done})")
    return point


def ber_sweep(scheme, channel: ChannelSpec, ebn0_grid: Sequence[float],
              spreading: Optional[int] = None, bits_per_point: int = 100_000,
              seed: int = 0, chip_kind="logistic", csk_reference: str = "genie",
              scheduler: Optional[TaskScheduler] = None) -> BerCurve:
    """Monte-Carlo BER curve over an Eb/N0 grid.

    Args:
        scheme: "bpsk", "csk" or "dcsk".
        channel: Channel model; its ebn0_db is replaced by each grid value.
        ebn0_grid: Eb/N0 values in dB.
        spreading: Chips per bit; 1 for BPSK, beta for CSK, 2*beta for DCSK by default.
        bits_per_point: Bits per grid point (>= 10^4).
        seed: Experiment seed.
        chip_kind: Chaotic chip source for CSK and DCSK.
        csk_reference: "genie" (exact chips) or "sync" (replica from a
            synchronized Mackey-Glass receiver).
        scheduler: Pool the grid points run on.
    """
    scheme = Scheme(scheme)
    spreading = int(spreading or default_spreading(scheme))
    chip_kind = ChipKind(chip_kind)
    if bits_per_point < MIN_BITS_PER_POINT:
        raise InvalidParameter(f"bits_per_point must be >= {MIN_BITS_PER_POINT}")
    if not len(ebn0_grid):
        raise InvalidParameter("ebn0 grid is empty")
    if csk_reference not in ("genie", "sync"):
        raise InvalidParameter(f"csk reference must be 'genie' or 'sync' (got {csk_reference!r})")
    if csk_reference == "sync" and (scheme != Scheme.CSK or chip_kind != ChipKind.MACKEY_GLASS):
        raise InvalidParameter("a synchronized reference needs CSK with mackey_glass chips")
    if scheme == Scheme.DCSK and spreading % 2:
        raise OddSpreading(f"DCSK needs an even spreading factor (got {spreading})")

    settings = BerSettings(scheme, channel, spreading, int(bits_per_point), int(seed),
                           chip_kind, csk_reference)
    logger.info(f"BER sweep: {scheme.value} over {channel.label}, spreading {spreading}, "
                f"{len(ebn0_grid)} point(s) x {bits_per_point} bits")
    scheduler = scheduler or TaskScheduler()
    points = scheduler.map("ber_point", simulate_point, [float(e) for e in ebn0_grid],
                           settings=settings)
    return BerCurve(scheme, channel, spreading, int(seed), tuple(points))


def curve_summary(curve: BerCurve) -> Dict[str, Any]:
    flagged = [p.ebn0_db for p in curve.points if p.under_sampled]
    return {
        "scheme": curve.scheme.value,
        "channel": curve.channel.label,
        "spreading": curve.spreading,
        "points": len(curve.points),
        "under_sampled": ",".join(f"{e:g}" for e in flagged) or "none",
    }
