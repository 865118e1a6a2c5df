"""
All complexity estimators over one signal, bundled into a report.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from chaoscomm.complexity.embedding import lyapunov_max
from chaoscomm.complexity.neural import (DEFAULT_SUBSET_SAMPLES, MAX_EXACT_CHANNELS,
                                          neural_complexity)
from chaoscomm.complexity.symbols import (block_entropy, excess_from_blocks,
                                          insufficient_lengths, lmc_complexity,
                                          rate_from_blocks, shannon_entropy, symbolize)
from chaoscomm.core.errors import InvalidParameter, NoNeighbors, TooShort

logger = logging.getLogger("chaoscomm.complexity.report")


@dataclass(frozen=True)
class ComplexitySettings:
    """Estimator settings recorded with every report."""

    k: int = 4
    binning: str = "quantile"
    L_max: int = 8
    embed_dim: int = 3
    embed_lag: int = 1
    theiler: int = 10
    fit_range: Tuple[int, int] = (1, 10)
    step: float = 1.0
    lyapunov: bool = True
    max_exact_n: int = MAX_EXACT_CHANNELS
    subset_samples: int = DEFAULT_SUBSET_SAMPLES


@dataclass(frozen=True)
class ComplexityReport:
    shannon_bits: float
    block_entropies: Tuple[float, ...]
    entropy_rate_bits: float
    excess_entropy_bits: float
    lmc: float
    neural_complexity_bits: Optional[float] = None
    lyapunov_per_s: Optional[float] = None
    degenerate: bool = False
    insufficient_lengths: Tuple[int, ...] = ()
    params: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Flat mapping in a fixed key order."""
        values: Dict[str, Any] = {
            "shannon_bits": self.shannon_bits,
            "entropy_rate_bits": self.entropy_rate_bits,
            "excess_entropy_bits": self.excess_entropy_bits,
            "lmc": self.lmc,
            "neural_complexity_bits": _or_na(self.neural_complexity_bits),
            "lyapunov_per_s": _or_na(self.lyapunov_per_s),
            "degenerate": self.degenerate,
            "insufficient_lengths": ",".join(str(L) for L in self.insufficient_lengths) or "none",
        }
        for L, value in enumerate(self.block_entropies, start=1):
            values[f"H{L}"] = value
        for key, value in self.params.items():
            values[f"param.{key}"] = ",".join(str(v) for v in value) if isinstance(value, tuple) else value
        return values

    def csv_header(self) -> List[str]:
        return list(self.to_dict())

    def csv_row(self) -> List[Any]:
        return list(self.to_dict().values())


def _or_na(value: Optional[float]) -> Any:
    return "na" if value is None else value


def complexity_report(signal: np.ndarray, settings: Optional[ComplexitySettings] = None,
                      column: int = 0) -> ComplexityReport:
    """Compute every estimator on ``signal``.

    Args:
        signal: 1-D signal, or a 2-D array with channels as rows. Univariate
            estimators use row ``column``; neural complexity uses all rows.
        settings: Estimator settings.
        column: Channel analysed by the univariate estimators.
    """
    settings = settings or ComplexitySettings()
    data = np.atleast_2d(np.asarray(signal, dtype=float))
    if not 0 <= column < data.shape[0]:
        raise InvalidParameter(f"column {column} not among {data.shape[0]} channel(s)")
    x = data[column]
    logger.info(f"Complexity of {x.size} samples (channel {column} of {data.shape[0]})")

    symbols = symbolize(x, settings.k, settings.binning)
    H = block_entropy(symbols, settings.L_max)

    neural = None
    if data.shape[0] >= 2:
        neural = neural_complexity(data, settings.max_exact_n, settings.subset_samples)

    lyapunov = None
    if settings.lyapunov and not symbols.degenerate:
        try:
            lyapunov = lyapunov_max(x, settings.step, settings.embed_dim, settings.embed_lag,
                                    settings.theiler, settings.fit_range).exponent
        except (TooShort, NoNeighbors) as e:
            logger.warning(f"Lyapunov exponent not reported: {str(e)}")

    return ComplexityReport(
        shannon_bits=shannon_entropy(symbols, settings.k),
        block_entropies=tuple(float(h) for h in H),
        entropy_rate_bits=rate_from_blocks(H),
        excess_entropy_bits=excess_from_blocks(H),
        lmc=lmc_complexity(symbols),
        neural_complexity_bits=neural,
        lyapunov_per_s=lyapunov,
        degenerate=symbols.degenerate,
        insufficient_lengths=tuple(insufficient_lengths(symbols, settings.L_max)),
        params=asdict(settings),
    )
