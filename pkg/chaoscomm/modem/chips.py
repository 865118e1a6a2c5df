"""
Chaotic chip sequences for spreading.

Two sources:
    logistic     x_{n+1} = 4 x_n (1 - x_n), many short orbits iterated side by side
    mackey_glass one delay-feedback node sampled every tau_f/2

Both are standardized to zero mean and unit variance.
"""

import enum
import logging
from typing import Optional, Tuple

import numpy as np

from chaoscomm.core.errors import InvalidParameter
from chaoscomm.dynamics.integrator import DEFAULT_TRANSIENT, integrate
from chaoscomm.dynamics.oscillator import OscillatorParams
from chaoscomm.network.coupling import directional
from chaoscomm.utils.seeding import rng_for

logger = logging.getLogger("chaoscomm.modem.chips")

LOGISTIC_ORBIT = 256
LOGISTIC_BURN_IN = 64
# Single-node gain where the delay map x -> 8.75*kappa_f*x*exp(-6.25 x^2) is chaotic
# and never collapses towards zero (at 1.4 nearby histories re-lock).
MG_CHIP_GAIN = 0.6


class ChipKind(str, enum.Enum):
    MACKEY_GLASS = "mackey_glass"
    LOGISTIC = "logistic"


def standardize(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    std = values.std()
    if std == 0.0:
        raise InvalidParameter("chip source produced a constant sequence")
    return (values - values.mean()) / std


def logistic_chips(count: int, seed: int) -> np.ndarray:
    orbits = -(-count // LOGISTIC_ORBIT)
    rng = rng_for(seed, 0)
    x = rng.uniform(0.01, 0.99, size=orbits)
    for _ in range(LOGISTIC_BURN_IN):
        x = 4.0 * x * (1.0 - x)
    table = np.empty((orbits, LOGISTIC_ORBIT))
    for n in range(LOGISTIC_ORBIT):
        table[:, n] = x
        x = 4.0 * x * (1.0 - x)
    return table.reshape(-1)[:count]


def mackey_glass_params() -> OscillatorParams:
    return OscillatorParams(kappa_f=MG_CHIP_GAIN)


def _mg_grid(params: OscillatorParams) -> Tuple[float, int]:
    """Integration step and decimation for chips every tau_f/2."""
    period = params.tau_f / 2.0
    every = int(np.ceil(period / params.max_step - 1e-9))
    return period / every, every


def mackey_glass_trajectory(count: int, seed: int, history: Optional[float] = None,
                            params: Optional[OscillatorParams] = None):
    """Raw node samples every tau_f/2 after the transient, count of them."""
    params = params or mackey_glass_params()
    step, every = _mg_grid(params)
    transient = DEFAULT_TRANSIENT
    duration = transient + count * step * every
    run = integrate([params], duration=duration, step=step, seed=seed,
                    history=None if history is None else [history],
                    transient=transient, sample_every=every)
    return run


def mackey_glass_chips(count: int, seed: int, history: Optional[float] = None,
                       params: Optional[OscillatorParams] = None) -> np.ndarray:
    run = mackey_glass_trajectory(count, seed, history, params)
    return run.post_transient(0)[:count]


def synchronized_replica(count: int, seed: int, receiver_seed: int,
                         history: Optional[float] = None,
                         params: Optional[OscillatorParams] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Transmitter chips and the chips regenerated by a synchronized receiver.

    The receiver is an open-loop copy of the chip oscillator driven by the
    transmitter's output, started from its own history (``receiver_seed``).
    Both sequences are standardized with the transmitter's statistics.
    """
    params = params or mackey_glass_params()
    step, every = _mg_grid(params)
    transient = DEFAULT_TRANSIENT
    duration = transient + count * step * every
    tx = integrate([params], duration=duration, step=step, seed=seed,
                   history=None if history is None else [history], transient=transient)
    line = tx.node(0)
    rx = integrate([params, params.replace(kappa_f=0.0)],
                   directional(0, 1, params.kappa_f, params.tau_f),
                   duration=duration, step=step, seed=receiver_seed,
                   replay={0: line}, transient=transient)
    start = tx.transient_end
    sent = line[start::every][:count]
    replica = rx.node(1)[start::every][:count]
    mean, std = sent.mean(), sent.std()
    if std == 0.0:
        raise InvalidParameter("chip source produced a constant sequence")
    return (sent - mean) / std, (replica - mean) / std


def chip_source(kind, count: int, seed: int, history: Optional[float] = None) -> np.ndarray:
    """Zero-mean, unit-variance chaotic chips.

    Args:
        kind: "logistic" or "mackey_glass".
        count: Number of chips (>= 1).
        seed: Seed of the initial conditions.
        history: Explicit constant history for the mackey_glass node.
    """
    kind = ChipKind(kind)
    if count < 1:
        raise InvalidParameter("chip count must be >= 1")
    if kind == ChipKind.LOGISTIC:
        if history is not None:
            raise InvalidParameter("history applies to the mackey_glass source only")
        raw = logistic_chips(max(count, 2), seed)
    else:
        raw = mackey_glass_chips(max(count, 2), seed, history)
    logger.debug(f"{count} {kind.value} chips for seed {seed}")
    return standardize(raw)[:count]
