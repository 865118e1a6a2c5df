"""
Delay embedding and the largest Lyapunov exponent.

lyapunov_max follows Rosenstein et al.: every reconstructed point is paired
with its nearest neighbour outside a Theiler window, the mean log distance of
the pairs is followed forward in time, and the exponent is the least-squares
slope of that curve over a fit range.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.spatial import cKDTree

from chaoscomm.core.errors import InvalidParameter, NoNeighbors, TooShort

logger = logging.getLogger("chaoscomm.complexity.embedding")

MIN_LYAPUNOV_SAMPLES = 5000
DEFAULT_FIT_RANGE = (1, 10)
QUERY_CHUNK = 2048


def delay_embed(signal: np.ndarray, m: int, lag: int) -> np.ndarray:
    """Points (x_t, x_{t+lag}, ..., x_{t+(m-1)lag}) as rows.

    Raises:
        TooShort: If the signal has no more than (m-1)*lag samples.
    """
    x = np.asarray(signal, dtype=float).reshape(-1)
    if m < 1 or lag < 1:
        raise InvalidParameter("embedding dimension and lag must be >= 1")
    span = (m - 1) * lag
    if x.size <= span:
        raise TooShort(f"{x.size} samples cannot be embedded with m={m}, lag={lag}")
    return np.ascontiguousarray(sliding_window_view(x, span + 1)[:, ::lag])


@dataclass(frozen=True)
class LyapunovResult:
    """Largest Lyapunov exponent and the divergence curve it was fitted to.

    Attributes:
        exponent: Slope per second (per sample when step is 1).
        divergence: Mean log distance of neighbour pairs after k samples.
        fit_range: Inclusive (first, last) sample offsets of the fit.
        pairs: Number of neighbour pairs averaged.
    """

    exponent: float
    divergence: np.ndarray
    fit_range: Tuple[int, int]
    pairs: int


def _nearest_outside_window(points: np.ndarray, theiler: int) -> np.ndarray:
    """Index of each point's nearest neighbour with |i - j| > theiler, or -1.

    Equal distances resolve to the lowest index.
    """
    count = points.shape[0]
    tree = cKDTree(points)
    result = np.full(count, -1, dtype=np.int64)
    pending = np.arange(count)
    k = min(count, 2 * theiler + 2)
    while pending.size:
        found = []
        for start in range(0, pending.size, QUERY_CHUNK):
            rows = pending[start: start + QUERY_CHUNK]
            dist, idx = tree.query(points[rows], k=k)
            dist = dist.reshape(rows.size, -1)
            idx = idx.reshape(rows.size, -1)
            valid = (idx < count) & (np.abs(idx - rows[:, None]) > theiler) & (dist > 0)
            key = np.where(valid, dist, np.inf)
            best = key.min(axis=1)
            ties = valid & (key == best[:, None])
            chosen = np.where(ties, idx, count).min(axis=1)
            has = np.isfinite(best)
            result[rows[has]] = chosen[has]
            found.append(rows[~has])
        pending = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
        if k >= count:
            break
        k = min(count, 2 * k)
    return result


def lyapunov_max(signal: np.ndarray, step: float = 1.0, m: int = 2, lag: int = 1,
                 theiler: int = 10, fit_range: Optional[Tuple[int, int]] = None,
                 min_samples: int = MIN_LYAPUNOV_SAMPLES) -> LyapunovResult:
    """Rosenstein estimate of the largest Lyapunov exponent.

    Args:
        signal: Post-transient scalar signal.
        step: Sample period; the exponent is returned per unit of ``step``.
        m: Embedding dimension.
        lag: Embedding lag in samples.
        theiler: Neighbours closer than this many samples in time are excluded.
        fit_range: Inclusive offsets (first, last) of the divergence curve used
            for the slope.
        min_samples: Shortest accepted signal.

    Raises:
        TooShort: If the signal is shorter than ``min_samples``.
        NoNeighbors: If no point has a neighbour outside the Theiler window.
    """
    x = np.asarray(signal, dtype=float).reshape(-1)
    if x.size < min_samples:
        raise TooShort(f"Lyapunov estimation needs {min_samples} samples, got {x.size}")
    first, last = fit_range or DEFAULT_FIT_RANGE
    if not 0 <= first < last:
        raise InvalidParameter(f"fit range must satisfy 0 <= first < last (got {first}, {last})")
    if theiler < 0:
        raise InvalidParameter("theiler window must be >= 0")

    embedded = delay_embed(x, m, lag)
    usable = embedded.shape[0] - last
    if usable < 2:
        raise TooShort(f"fit range up to {last} leaves no usable points")
    neighbour = _nearest_outside_window(embedded[:usable], theiler)
    rows = np.flatnonzero(neighbour >= 0)
    if rows.size == 0:
        raise NoNeighbors(f"no neighbours outside a Theiler window of {theiler} samples")
    partners = neighbour[rows]

    divergence = np.empty(last + 1)
    for offset in range(last + 1):
        distance = np.linalg.norm(embedded[rows + offset] - embedded[partners + offset], axis=1)
        logs = np.log(distance[distance > 0])
        divergence[offset] = logs.mean() if logs.size else -np.inf
    window = np.arange(first, last + 1)
    curve = divergence[window]
    if not np.all(np.isfinite(curve)):
        raise NoNeighbors("neighbour pairs collapsed onto each other inside the fit range")
    slope = np.polyfit(window.astype(float), curve, 1)[0]
    exponent = float(slope / step)
    logger.debug(f"Lyapunov: {rows.size} pairs, slope {slope:.6g} per sample, "
                 f"fit {first}..{last}")
    return LyapunovResult(exponent, divergence, (int(first), int(last)), int(rows.size))
