"""
Symbolic dynamics estimators.

A real signal is mapped to k symbols and the plug-in Shannon entropies of its
overlapping L-blocks give the block entropy curve H(L), the entropy rate
estimate h = H(L) - H(L-1) and the excess entropy E = H(L) - L*h.
"""

import enum
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.stats import rankdata

from chaoscomm.core.errors import DegenerateSignal, InvalidParameter

logger = logging.getLogger("chaoscomm.complexity")

# plug-in estimates need about this many samples per possible block
SAMPLES_PER_BLOCK = 10


class Binning(str, enum.Enum):
    QUANTILE = "quantile"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class SymbolizedSeries:
    symbols: np.ndarray
    k: int
    binning: Binning
    degenerate: bool = False

    def __len__(self) -> int:
        return int(self.symbols.size)

    def frequencies(self) -> np.ndarray:
        return np.bincount(self.symbols, minlength=self.k) / self.symbols.size


def symbolize(signal: np.ndarray, k: int = 4, binning="quantile",
              strict: bool = False) -> SymbolizedSeries:
    """Map a signal to symbols 0..k-1.

    Quantile binning ranks the samples (ties share the lowest rank) and cuts
    the ranks into k equal groups; uniform binning cuts [min, max] into k
    equal intervals. A constant signal maps to all zeros and is flagged
    degenerate, or raises DegenerateSignal when ``strict``.
    """
    binning = Binning(binning)
    x = np.asarray(signal, dtype=float).reshape(-1)
    if k < 2:
        raise InvalidParameter(f"alphabet size must be >= 2 (got {k})")
    if x.size < k:
        raise InvalidParameter(f"signal of {x.size} samples is shorter than k = {k}")
    if not np.all(np.isfinite(x)):
        raise InvalidParameter("signal contains non-finite samples")

    if np.ptp(x) == 0.0:
        if strict:
            raise DegenerateSignal("constant signal has no informative symbolization")
        logger.warning("Constant signal: all samples mapped to symbol 0")
        return SymbolizedSeries(np.zeros(x.size, dtype=int), k, binning, degenerate=True)

    if binning == Binning.QUANTILE:
        ranks = rankdata(x, method="min").astype(np.int64) - 1
        symbols = (ranks * k) // x.size
    else:
        scaled = (x - x.min()) / np.ptp(x)
        symbols = np.minimum((scaled * k).astype(np.int64), k - 1)
    return SymbolizedSeries(symbols.astype(int), k, binning)


def shannon_entropy(symbols, k: Optional[int] = None) -> float:
    """Plug-in Shannon entropy in bits of a symbol sequence."""
    values = symbols.symbols if isinstance(symbols, SymbolizedSeries) else np.asarray(symbols, dtype=int)
    if values.size == 0:
        raise InvalidParameter("entropy of an empty sequence")
    counts = np.bincount(values, minlength=k or 0)
    p = counts[counts > 0] / values.size
    return float(max(0.0, -np.sum(p * np.log2(p))))


def _block_codes(symbols: np.ndarray, k: int, length: int) -> np.ndarray:
    codes = np.zeros(symbols.size - length + 1, dtype=np.int64)
    for offset in range(length):
        codes = codes * k + symbols[offset: symbols.size - length + 1 + offset]
    return codes


def insufficient_lengths(s: SymbolizedSeries, L_max: int) -> List[int]:
    """Block lengths L for which the series is shorter than 10 * k**L."""
    return [L for L in range(1, L_max + 1) if len(s) < SAMPLES_PER_BLOCK * s.k ** L]


def block_entropy(s: SymbolizedSeries, L_max: int) -> np.ndarray:
    """H(L) in bits for L = 1..L_max from overlapping blocks."""
    if L_max < 1:
        raise InvalidParameter("L_max must be >= 1")
    if len(s) < L_max:
        raise InvalidParameter(f"{len(s)} symbols cannot form blocks of {L_max}")
    if np.log2(s.k) * L_max >= 62:
        raise InvalidParameter(f"k**L_max = {s.k}**{L_max} is too large to enumerate")
    short = insufficient_lengths(s, L_max)
    if short:
        logger.warning(f"Block entropy for L={short} uses fewer than "
                       f"{SAMPLES_PER_BLOCK} samples per possible block")
    values = np.empty(L_max)
    for L in range(1, L_max + 1):
        _, counts = np.unique(_block_codes(s.symbols, s.k, L), return_counts=True)
        p = counts / counts.sum()
        values[L - 1] = max(0.0, float(-np.sum(p * np.log2(p))))
    return values


def rate_from_blocks(H: np.ndarray) -> float:
    """h = H(L) - H(L - 1) at the longest L, with H(0) = 0; clamped at zero."""
    previous = H[-2] if H.size > 1 else 0.0
    return max(0.0, float(H[-1] - previous))


def excess_from_blocks(H: np.ndarray) -> float:
    """E = H(L) - L * h at the longest L; clamped at zero."""
    return max(0.0, float(H[-1] - H.size * rate_from_blocks(H)))


def entropy_rate(s: SymbolizedSeries, L_max: int) -> float:
    return rate_from_blocks(block_entropy(s, L_max))


def excess_entropy(s: SymbolizedSeries, L_max: int) -> float:
    return excess_from_blocks(block_entropy(s, L_max))


def lmc_complexity(s: SymbolizedSeries) -> float:
    """LMC statistical complexity C = H_norm * D.

    H_norm is the single-symbol entropy over log2(k) and D the disequilibrium
    sum_i (p_i - 1/k)^2 over all k symbols.
    """
    if len(s) == 0:
        raise InvalidParameter("complexity of an empty sequence")
    p = s.frequencies()
    h_norm = shannon_entropy(s, s.k) / np.log2(s.k)
    disequilibrium = float(np.sum((p - 1.0 / s.k) ** 2))
    return float(h_norm * disequilibrium)
