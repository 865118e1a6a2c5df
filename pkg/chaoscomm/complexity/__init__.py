"""Entropies, statistical complexity and Lyapunov exponents of signals."""

from chaoscomm.complexity.embedding import LyapunovResult, delay_embed, lyapunov_max
from chaoscomm.complexity.neural import neural_complexity
from chaoscomm.complexity.report import (ComplexityReport, ComplexitySettings,
                                         complexity_report)
from chaoscomm.complexity.symbols import (SymbolizedSeries, block_entropy,
                                          entropy_rate, excess_entropy,
                                          lmc_complexity, shannon_entropy, symbolize)

__all__ = [
    "ComplexityReport",
    "ComplexitySettings",
    "LyapunovResult",
    "SymbolizedSeries",
    "block_entropy",
    "complexity_report",
    "delay_embed",
    "entropy_rate",
    "excess_entropy",
    "lmc_complexity",
    "lyapunov_max",
    "neural_complexity",
    "shannon_entropy",
    "symbolize",
]
