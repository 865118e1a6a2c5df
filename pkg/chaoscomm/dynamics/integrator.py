"""
Fixed-step integrator for coupled delay-feedback oscillators.

Node i follows

    rc * dx_i/dt = -x_i(t) + kappa_f * f(x_i(t - tau_f))
                   + sum_j kappa_c(j->i) * f(x_j(t - tau_c)) + d_i(t)

and is advanced with classical RK4. The stage inputs (every term except -x_i)
only involve delayed states and the drive, so with all delays longer than two
steps they are known for a whole block of steps before the block is taken:
the inputs come from the cubic Hermite interpolant of the stored history and
the linear RC part of the RK4 map is then applied to the block with
scipy.signal.lfilter.
"""

import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import lfilter

from chaoscomm.core.errors import DelayUnresolvable, InvalidParameter, StepTooLarge
from chaoscomm.dynamics.drive import DriveSignal
from chaoscomm.dynamics.history import HistoryBuffer
from chaoscomm.dynamics.oscillator import OscillatorParams, nonlinearity
from chaoscomm.dynamics.trajectory import Trajectory
from chaoscomm.network.coupling import CouplingSpec
from chaoscomm.utils.seeding import node_rng

logger = logging.getLogger("chaoscomm.dynamics.integrator")

DEFAULT_STEP = 1.0e-5
DEFAULT_TRANSIENT = 1.0
HISTORY_RANGE = (0.1, 0.9)
UNDELAYED_BLOCK = 4096

# RK4 stage times as fractions of a step
_STAGES = (0.0, 0.5, 1.0)


def rk4_step(x, u0, u_half, u1, step: float, rc: float):
    """One classical RK4 step of rc*x' = -x + u(t) with known stage inputs."""
    k1 = (u0 - x) / rc
    k2 = (u_half - (x + 0.5 * step * k1)) / rc
    k3 = (u_half - (x + 0.5 * step * k2)) / rc
    k4 = (u1 - (x + step * k3)) / rc
    return x + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def initial_histories(node_count: int, seed: int) -> List[float]:
    """Seeded constant histories, one per node, drawn from [0.1, 0.9] V.

    Node i draws from its own stream, so its history does not depend on how
    many nodes are simulated.
    """
    low, high = HISTORY_RANGE
    return [float(node_rng(seed, i).uniform(low, high)) for i in range(node_count)]


def _lag_offsets(delay: float, step: float) -> List[Tuple[int, float]]:
    """(index offset, theta) of t + c*step - delay for each RK4 stage fraction c."""
    samples = delay / step
    if abs(samples - round(samples)) < 1e-9 * max(1.0, samples):
        samples = float(round(samples))
    whole = math.floor(samples)
    frac = samples - whole
    offsets = []
    for c in _STAGES:
        position = c - frac
        base = math.floor(position)
        offsets.append((base - whole, position - base))
    return offsets


class _DelayedTerm:
    """One kappa * f(x_src(t - delay)) contribution to a node's input."""

    def __init__(self, source: int, gain: float, delay: float,
                 params: OscillatorParams, step: float):
        self.source = source
        self.gain = gain
        self.delay = delay
        self.params = params
        self.offsets = _lag_offsets(delay, step)

    def stage_inputs(self, buffers: Sequence[HistoryBuffer], steps: np.ndarray) -> List[np.ndarray]:
        history = buffers[self.source]
        return [self.gain * nonlinearity(history.interpolate(steps + offset, theta), self.params)
                for offset, theta in self.offsets]


def integrate(params: Sequence[OscillatorParams],
              coupling: Optional[CouplingSpec] = None,
              drive: Optional[Mapping[int, DriveSignal]] = None,
              duration: float = 2.0,
              step: float = DEFAULT_STEP,
              seed: int = 0,
              history: Optional[Sequence[float]] = None,
              replay: Optional[Mapping[int, np.ndarray]] = None,
              transient: float = DEFAULT_TRANSIENT,
              sample_every: int = 1) -> Trajectory:
    """Integrate N coupled Mackey-Glass nodes.

    Args:
        params: One OscillatorParams per node. Node i's nonlinearity is used for
            its own feedback and for every edge leaving node i.
        coupling: Edges and shared drive; uncoupled nodes when omitted.
        drive: Extra additive drive per node index.
        duration: Simulated time in seconds.
        step: Integration step in seconds (<= rc/50 for every node).
        seed: Seed for the per-node constant histories.
        history: Explicit constant history per node, overriding the seed.
        replay: Nodes whose state is a recorded signal sampled on the
            integration grid (at least duration/step + 1 samples) instead of
            being integrated. Their edges still drive other nodes.
        transient: Seconds marked as transient in the result.
        sample_every: Keep every n-th integration sample in the result.

    Returns:
        The Trajectory, with step = step * sample_every.

    Raises:
        StepTooLarge: If step > rc/50 for an integrated node.
        DelayUnresolvable: If a delay is shorter than two steps or exceeds the
            history span.
    """
    params = list(params)
    node_count = len(params)
    if node_count == 0:
        raise InvalidParameter("at least one node is required")
    coupling = coupling or CouplingSpec.uncoupled(node_count)
    if coupling.node_count != node_count:
        if coupling.node_count > node_count:
            raise InvalidParameter(
                f"coupling references {coupling.node_count} nodes, {node_count} given")
        coupling = coupling.with_node_count(node_count)
    drive = dict(drive or {})
    replay = {int(k): np.asarray(v, dtype=float) for k, v in (replay or {}).items()}
    if step <= 0 or duration <= 0:
        raise InvalidParameter("step and duration must be > 0")
    if duration < transient:
        raise InvalidParameter(f"duration {duration} s is shorter than the transient {transient} s")
    if sample_every < 1:
        raise InvalidParameter("sample_every must be >= 1")

    integrated = [i for i in range(node_count) if i not in replay]
    for i in integrated:
        if step > params[i].max_step * (1.0 + 1e-12):
            raise StepTooLarge(
                f"step {step:g} s exceeds rc/50 = {params[i].max_step:g} s for node {i}")

    n_steps = int(round(duration / step))
    for node, recording in replay.items():
        if recording.ndim != 1 or recording.size < n_steps + 1:
            raise InvalidParameter(
                f"replay for node {node} needs {n_steps + 1} samples, got {recording.size}")

    # Input terms per integrated node: own feedback first, then edges in order.
    terms: Dict[int, List[_DelayedTerm]] = {}
    for i in integrated:
        node_terms = []
        if params[i].kappa_f != 0.0:
            node_terms.append(_DelayedTerm(i, params[i].kappa_f, params[i].tau_f, params[i], step))
        for edge in coupling.in_edges(i):
            node_terms.append(_DelayedTerm(edge.src, edge.kappa_c, edge.tau_c, params[edge.src], step))
        terms[i] = node_terms

    delays = [term.delay for node_terms in terms.values() for term in node_terms]
    if delays:
        min_delay, max_delay = min(delays), max(delays)
        if min_delay < 2.0 * step * (1.0 - 1e-12):
            raise DelayUnresolvable(
                f"delay {min_delay:g} s is shorter than two steps of {step:g} s")
        block = max(1, int(math.floor(min_delay / step + 1e-9)) - 1)
    else:
        # nothing delayed: the block length only bounds memory
        max_delay, block = 2.0 * step, UNDELAYED_BLOCK

    if history is None:
        start_values = initial_histories(node_count, seed)
    else:
        start_values = [float(h) for h in history]
        if len(start_values) != node_count:
            raise InvalidParameter(f"history has {len(start_values)} values for {node_count} nodes")
    for node, recording in replay.items():
        start_values[node] = float(recording[0])

    buffers = [HistoryBuffer.for_delays(max_delay, step, start_values[i], margin=block)
               for i in range(node_count)]
    replay_slopes = {node: np.gradient(rec[: n_steps + 1], step) for node, rec in replay.items()}

    drives: Dict[int, List[DriveSignal]] = {i: [] for i in integrated}
    for i in integrated:
        shared = coupling.drive_for(i)
        if shared is not None and not shared.is_zero:
            drives[i].append(shared)
        if i in drive and drive[i] is not None and not drive[i].is_zero:
            drives[i].append(drive[i])

    n_out = n_steps // sample_every + 1
    output = np.empty((node_count, n_out))
    output[:, 0] = start_values
    current = np.array(start_values, dtype=float)
    transient_samples = int(round(transient / step))

    logger.info(f"Integrating {node_count} node(s) for {duration:g} s "
                f"({n_steps} steps of {step:g} s, block {block})")

    k0 = 0
    while k0 < n_steps:
        count = min(block, n_steps - k0)
        steps = np.arange(k0, k0 + count)
        new_values: Dict[int, np.ndarray] = {}

        for i in integrated:
            p = params[i]
            inputs = [np.zeros(count) for _ in _STAGES]
            for term in terms[i]:
                for stage, value in enumerate(term.stage_inputs(buffers, steps)):
                    inputs[stage] = inputs[stage] + value
            for signal in drives[i]:
                for stage, c in enumerate(_STAGES):
                    inputs[stage] = inputs[stage] + signal((steps + c) * step)
            u0, u_half, u1 = inputs
            decay = rk4_step(1.0, 0.0, 0.0, 0.0, step, p.rc)
            forcing = rk4_step(0.0, u0, u_half, u1, step, p.rc)
            values, _ = lfilter([1.0], [1.0, -decay], forcing, zi=[decay * current[i]])
            new_values[i] = values
            previous = np.concatenate(([current[i]], values[:-1]))
            buffers[i].write_slopes(k0, (u0 - previous) / p.rc)

        for node, recording in replay.items():
            new_values[node] = recording[k0 + 1: k0 + count + 1]
            buffers[node].write_slopes(k0, replay_slopes[node][k0: k0 + count])

        # All inputs of this block are computed before any buffer moves forward.
        for node, values in new_values.items():
            buffers[node].write_values(k0 + 1, values)
            current[node] = values[-1]

        first = k0 + 1
        last = k0 + count
        keep = np.arange(first + (-first) % sample_every, last + 1, sample_every)
        if keep.size:
            for node, values in new_values.items():
                output[node, keep // sample_every] = values[keep - first]
        k0 += count
        if not np.all(np.isfinite(current)):
            raise InvalidParameter(f"integration diverged near t = {k0 * step:g} s")

    logger.debug(f"Integration finished at t = {n_steps * step:g} s")
    transient_end = min(int(math.ceil(transient_samples / sample_every)), n_out)
    return Trajectory(node_count, step * sample_every, transient_end, output, tuple(start_values))
