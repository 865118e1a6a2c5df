"""
Synchronization measures between two node signals.

The lag convention: a positive lag means ``b`` lags ``a``, i.e.
b(t + lag) ~ a(t).
"""

import enum
import logging
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from scipy.signal import correlate

from chaoscomm.core.errors import InvalidParameter, WindowTooShort

logger = logging.getLogger("chaoscomm.sync")

SYNC_THRESHOLD = 0.95
ISOCHRONAL_STEPS = 2
DEFAULT_MAX_LAG = 0.005


class SyncClass(str, enum.Enum):
    ISOCHRONAL = "isochronal"
    ACHRONAL = "achronal"
    UNSYNCHRONIZED = "unsynchronized"


@dataclass(frozen=True)
class SyncReport:
    """Peak correlation between two signals and the lag where it occurs.

    Attributes:
        pearson: Correlation coefficient at the peak lag.
        lag: Peak lag in seconds (positive when b lags a).
        classification: isochronal, achronal or unsynchronized.
        window: (start, end) of the analysed window in seconds.
        step: Sample period of the signals in seconds.
    """

    pearson: float
    lag: float
    classification: SyncClass
    window: Tuple[float, float]
    step: float

    @property
    def lag_samples(self) -> int:
        return int(round(self.lag / self.step))

    @property
    def synchronized(self) -> bool:
        return self.classification != SyncClass.UNSYNCHRONIZED

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pearson": self.pearson,
            "lag_s": self.lag,
            "classification": self.classification.value,
            "window_start_s": self.window[0],
            "window_end_s": self.window[1],
        }


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; 0.0 when either signal has no variance."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    x = x - x.mean()
    y = y - y.mean()
    norm = float(np.sqrt(np.dot(x, x) * np.dot(y, y)))
    if norm == 0.0:
        return 0.0
    return float(np.clip(np.dot(x, y) / norm, -1.0, 1.0))


def lagged_pair(a: np.ndarray, b: np.ndarray, lag: int) -> Tuple[np.ndarray, np.ndarray]:
    """Overlapping parts of a(t) and b(t + lag)."""
    n = len(a)
    if lag >= 0:
        return a[: n - lag], b[lag:]
    return a[-lag:], b[: n + lag]


def _normalized_xcorr(a: np.ndarray, b: np.ndarray, max_lag: int) -> np.ndarray:
    """Pearson coefficient of (a(t), b(t + l)) for l = -max_lag..max_lag.

    Uses an FFT cross-correlation for the cross sums and prefix sums for the
    window means and energies of each overlap.
    """
    n = a.size
    a = a - a.mean()
    b = b - b.mean()
    full = correlate(b, a, mode="full", method="fft")
    lags = np.arange(-max_lag, max_lag + 1)
    cross = full[lags + n - 1]

    ca = np.concatenate(([0.0], np.cumsum(a)))
    cb = np.concatenate(([0.0], np.cumsum(b)))
    caa = np.concatenate(([0.0], np.cumsum(a * a)))
    cbb = np.concatenate(([0.0], np.cumsum(b * b)))
    a_lo = np.maximum(0, -lags)
    a_hi = n - np.maximum(0, lags)
    b_lo = np.maximum(0, lags)
    b_hi = n + np.minimum(0, lags)
    m = (a_hi - a_lo).astype(float)

    sa = ca[a_hi] - ca[a_lo]
    sb = cb[b_hi] - cb[b_lo]
    var_a = caa[a_hi] - caa[a_lo] - sa * sa / m
    var_b = cbb[b_hi] - cbb[b_lo] - sb * sb / m
    cov = cross - sa * sb / m
    with np.errstate(invalid="ignore", divide="ignore"):
        r = cov / np.sqrt(var_a * var_b)
    return np.where(np.isfinite(r), r, 0.0)


def classify(corr: float, lag_samples: int) -> SyncClass:
    if corr >= SYNC_THRESHOLD:
        if abs(lag_samples) <= ISOCHRONAL_STEPS:
            return SyncClass.ISOCHRONAL
        return SyncClass.ACHRONAL
    return SyncClass.UNSYNCHRONIZED


def sync_report(a: np.ndarray, b: np.ndarray, step: float,
                max_lag: float = DEFAULT_MAX_LAG, start: float = 0.0) -> SyncReport:
    """Correlate two post-transient signals over lags within +-max_lag.

    Args:
        a: First signal.
        b: Second signal, same length and sampling as ``a``.
        step: Sample period in seconds.
        max_lag: Largest lag searched, in seconds.
        start: Time of the first sample, recorded in the report window.

    Raises:
        WindowTooShort: If the signals are shorter than 2*max_lag/step samples.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidParameter(f"signals must be 1-D of equal length, got {x.shape} and {y.shape}")
    if step <= 0 or max_lag < 0:
        raise InvalidParameter("step must be > 0 and max_lag >= 0")
    lag_max = int(round(max_lag / step))
    if x.size < max(2, 2 * lag_max) or x.size - lag_max < 2:
        raise WindowTooShort(
            f"{x.size} samples cannot cover lags of +-{max_lag:g} s at step {step:g} s")

    curve = _normalized_xcorr(x, y, lag_max)
    # ties go to the smallest |lag|, then to the negative side
    order = np.argsort(np.abs(np.arange(-lag_max, lag_max + 1)), kind="stable")
    best = order[int(np.argmax(curve[order]))]
    lag = int(best - lag_max)
    corr = pearson(*lagged_pair(x, y, lag))
    window = (float(start), float(start + (x.size - 1) * step))
    report = SyncReport(corr, lag * step, classify(corr, lag), window, float(step))
    logger.debug(f"sync report: pearson={corr:.6f} lag={lag} samples ({report.classification.value})")
    return report
