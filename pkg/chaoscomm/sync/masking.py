"""
Chaotic masking: a small NRZ message rides on a chaotic carrier.

The transmitter adds the message to its output line. The receiver is an
open-loop replica of the transmitter: a node without self-feedback whose
delayed input is the received line, so with matched parameters it reproduces
the carrier and the message appears in the residual tx - x_b. A known
preamble precedes the message and fixes the receiver's lag and polarity.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import welch

from chaoscomm.core.errors import InvalidParameter, NotSynchronized
from chaoscomm.dynamics.integrator import DEFAULT_STEP, DEFAULT_TRANSIENT, integrate
from chaoscomm.dynamics.oscillator import OscillatorParams
from chaoscomm.dynamics.trajectory import Trajectory
from chaoscomm.network.coupling import directional
from chaoscomm.sync.report import DEFAULT_MAX_LAG, lagged_pair, pearson, sync_report

logger = logging.getLogger("chaoscomm.sync.masking")

RECEIVER_SYNC_THRESHOLD = 0.9
DEFAULT_PREAMBLE = (1, 0, 1, 1, 0, 0, 1, 0, 1, 0)
# per-bit means below this fraction of the line RMS carry no decision
DECISION_FLOOR = 1e-6


@dataclass(frozen=True)
class MaskingConfig:
    """Message timing and amplitude.

    ``epsilon`` = 0 is accepted as the no-message control run; every bit
    decided from it is flagged undecidable.
    """

    epsilon: float = 0.05
    bit_duration: float = 0.2
    preamble: Tuple[int, ...] = DEFAULT_PREAMBLE
    step: float = DEFAULT_STEP
    transient: float = DEFAULT_TRANSIENT
    max_lag: float = DEFAULT_MAX_LAG

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 0.2:
            raise InvalidParameter(f"epsilon must be in [0, 0.2] (got {self.epsilon})")
        if not self.bit_duration > 0:
            raise InvalidParameter("bit_duration must be > 0")
        if not self.step > 0 or self.transient < 0:
            raise InvalidParameter("step must be > 0 and transient >= 0")
        object.__setattr__(self, "preamble", tuple(int(b) for b in self.preamble))
        if any(b not in (0, 1) for b in self.preamble):
            raise InvalidParameter("preamble must be a bit sequence")

    def check(self, params: OscillatorParams) -> None:
        """Validate the bit timing against an oscillator."""
        if self.bit_duration < 10.0 * params.tau_f * (1.0 - 1e-12):
            raise InvalidParameter(
                f"bit_duration {self.bit_duration:g} s is shorter than 10*tau_f = "
                f"{10.0 * params.tau_f:g} s")
        if self.step > params.max_step * (1.0 + 1e-12):
            raise InvalidParameter(f"masking step {self.step:g} s exceeds rc/50")

    @property
    def samples_per_bit(self) -> int:
        return int(round(self.bit_duration / self.step))

    @property
    def transient_samples(self) -> int:
        return int(round(self.transient / self.step))

    def levels(self, rms: float) -> Tuple[float, float]:
        """(low, high) line offsets for bits 0 and 1."""
        amplitude = self.epsilon * rms
        return (-amplitude, amplitude)

    def message_start(self) -> int:
        """Sample index where the payload (after the preamble) begins."""
        return self.transient_samples + len(self.preamble) * self.samples_per_bit


class MaskRecovery(NamedTuple):
    """Outcome of mask_recover."""

    bits: np.ndarray
    residual: np.ndarray
    receiver: np.ndarray
    correlation: float
    lag_samples: int
    polarity: int
    undecidable: bool


def nrz_waveform(bits: Sequence[int], levels: Tuple[float, float],
                 samples_per_bit: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=int)
    return np.repeat(np.where(bits == 1, levels[1], levels[0]), samples_per_bit)


def rms(signal: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(signal))))


def mask_transmit(carrier_node: OscillatorParams, message_bits: Sequence[int],
                  cfg: MaskingConfig, seed: int = 0) -> Tuple[np.ndarray, Trajectory]:
    """Simulate the carrier and add the preamble and message to its line.

    Returns:
        tx: The transmitted line x_a(t) + m(t), one value per integration step.
        truth: Two-row Trajectory holding x_a (row 0) and m(t) (row 1).
    """
    cfg.check(carrier_node)
    bits = np.asarray(message_bits, dtype=int)
    if bits.ndim != 1 or np.any((bits != 0) & (bits != 1)):
        raise InvalidParameter("message must be a 1-D bit sequence")
    framed = np.concatenate((np.asarray(cfg.preamble, dtype=int), bits))
    spb = cfg.samples_per_bit
    n_steps = cfg.transient_samples + framed.size * spb
    logger.info(f"Masking {bits.size} bits (+{len(cfg.preamble)} preamble) "
                f"at epsilon={cfg.epsilon:g}, {spb} samples per bit")

    carrier = integrate([carrier_node], duration=n_steps * cfg.step, step=cfg.step,
                        seed=seed, transient=cfg.transient)
    x_a = carrier.node(0)
    carrier_rms = rms(x_a[cfg.transient_samples:])
    message = np.zeros_like(x_a)
    start = cfg.transient_samples
    if framed.size:
        message[start: start + framed.size * spb] = nrz_waveform(framed, cfg.levels(carrier_rms), spb)
        # the closing grid point keeps the last bit's level
        message[-1] = message[-2]
    tx = x_a + message
    truth = Trajectory(2, cfg.step, carrier.transient_end, np.vstack((x_a, message)),
                       (carrier.initial_history[0], 0.0))
    return tx, truth


def _bit_means(signal: np.ndarray, first: int, count: int, spb: int) -> np.ndarray:
    block = signal[first: first + count * spb].reshape(count, spb)
    return block.mean(axis=1)


def mask_recover(tx_signal: np.ndarray, receiver_params: OscillatorParams,
                 kappa_c: Optional[float] = None, tau_c: Optional[float] = None,
                 cfg: Optional[MaskingConfig] = None, seed: int = 0,
                 require_sync: bool = True) -> MaskRecovery:
    """Recover the message from the transmitted line.

    Args:
        tx_signal: Received line sampled at cfg.step, as returned by mask_transmit.
        receiver_params: Receiver oscillator (its kappa_f is replaced by the line drive).
        kappa_c: Gain on the received line; defaults to receiver_params.kappa_f.
        tau_c: Delay on the received line; defaults to receiver_params.tau_f.
        cfg: Message timing shared with the transmitter.
        seed: Seed for the receiver's initial history.
        require_sync: Raise NotSynchronized when the receiver does not follow the line.

    Raises:
        NotSynchronized: If the post-transient zero-lag correlation between the
            line and the receiver output is below 0.9 and ``require_sync``.
    """
    cfg = cfg or MaskingConfig()
    tx = np.asarray(tx_signal, dtype=float)
    spb = cfg.samples_per_bit
    start = cfg.transient_samples
    total_bits = (tx.size - 1 - start) // spb
    payload_bits = total_bits - len(cfg.preamble)
    if payload_bits < 0 or tx.size < start + 2:
        raise InvalidParameter(f"{tx.size} line samples do not hold the configured preamble")

    kappa_c = receiver_params.kappa_f if kappa_c is None else kappa_c
    tau_c = receiver_params.tau_f if tau_c is None else tau_c
    params = [receiver_params, receiver_params.replace(kappa_f=0.0)]
    n_steps = tx.size - 1
    run = integrate(params, directional(0, 1, kappa_c, tau_c), duration=n_steps * cfg.step,
                    step=cfg.step, seed=seed, replay={0: tx}, transient=cfg.transient)
    x_b = run.node(1)

    correlation = pearson(tx[start:], x_b[start:])
    logger.info(f"Receiver correlation with the line: {correlation:.4f}")
    if correlation < RECEIVER_SYNC_THRESHOLD:
        message = (f"receiver not synchronized: correlation {correlation:.3f} "
                   f"< {RECEIVER_SYNC_THRESHOLD}")
        if require_sync:
            raise NotSynchronized(message, correlation)
        logger.warning(message)

    first = start
    preamble_len = len(cfg.preamble)
    if preamble_len:
        window = slice(first, first + preamble_len * spb)
        lag = sync_report(tx[window], x_b[window], cfg.step, cfg.max_lag).lag_samples
    else:
        lag = 0

    aligned = x_b.copy()
    head, tail = lagged_pair(np.arange(tx.size), np.arange(tx.size), lag)
    aligned[head] = x_b[tail]
    residual = tx - aligned

    means = _bit_means(residual, first, total_bits, spb)
    magnitude_floor = DECISION_FLOOR * rms(tx[start:])
    polarity = 1
    undecidable = bool(np.all(np.abs(means) <= magnitude_floor)) if means.size else True
    if preamble_len:
        reference = np.where(np.asarray(cfg.preamble) == 1, 1.0, -1.0)
        preamble_means = means[:preamble_len]
        polarity = 1 if np.dot(preamble_means, reference) >= 0 else -1
        decoded = (polarity * preamble_means > 0).astype(int)
        if np.any(decoded != np.asarray(cfg.preamble)):
            undecidable = True
        if np.max(np.abs(preamble_means)) <= magnitude_floor:
            undecidable = True
    bits = (polarity * means[preamble_len:] > 0).astype(int)
    if undecidable:
        logger.warning("Masked bits are undecidable: the preamble was not recovered")
    return MaskRecovery(bits, residual, x_b, correlation, lag, polarity, undecidable)


def bit_error_rate(sent: Sequence[int], received: Sequence[int]) -> float:
    sent = np.asarray(sent, dtype=int)
    received = np.asarray(received, dtype=int)
    if sent.shape != received.shape:
        raise InvalidParameter(f"bit counts differ: {sent.size} sent, {received.size} received")
    if sent.size == 0:
        return 0.0
    return float(np.mean(sent != received))


def spectral_deviation(tx: np.ndarray, carrier: np.ndarray, step: float,
                       nperseg: int = 8192, power_floor: float = 0.01) -> float:
    """Largest relative Welch-PSD difference over bins holding >= power_floor of the carrier power."""
    nperseg = min(nperseg, len(carrier))
    _, p_tx = welch(np.asarray(tx, dtype=float), fs=1.0 / step, nperseg=nperseg)
    _, p_c = welch(np.asarray(carrier, dtype=float), fs=1.0 / step, nperseg=nperseg)
    total = float(np.sum(p_c))
    if total == 0.0:
        raise InvalidParameter("carrier has no power")
    bins = p_c >= power_floor * total
    return float(np.max(np.abs(p_tx[bins] - p_c[bins]) / p_c[bins]))
