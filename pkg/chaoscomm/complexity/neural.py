"""
Neural complexity of a multichannel signal under a Gaussian approximation.

    C_N = sum_{k=1}^{n-1} [ <H(X_k)> - (k/n) H(X) ]

where <H(X_k)> averages the entropy over subsets of k channels. Entropies
come from log-determinants of the covariance; the (2*pi*e) terms cancel in
every summand and are left out.
"""

import itertools
import logging
from math import comb

import numpy as np

from chaoscomm.core.errors import InvalidParameter, SingularCovariance, TooShort
from chaoscomm.utils.seeding import rng_for

logger = logging.getLogger("chaoscomm.complexity.neural")

MAX_EXACT_CHANNELS = 12
DEFAULT_SUBSET_SAMPLES = 256
JITTER = 1e-9


def regularized_covariance(data: np.ndarray) -> np.ndarray:
    """Channel covariance plus (1e-9 * trace / n) on the diagonal."""
    cov = np.atleast_2d(np.cov(data))
    if not np.all(np.isfinite(cov)):
        raise SingularCovariance("covariance has non-finite entries")
    n = cov.shape[0]
    return cov + JITTER * np.trace(cov) / n * np.eye(n)


def gaussian_entropy(cov: np.ndarray, subset) -> float:
    """0.5 * log2 det of the covariance restricted to ``subset``."""
    index = np.asarray(subset)
    sign, logdet = np.linalg.slogdet(cov[np.ix_(index, index)])
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularCovariance(f"covariance of channels {list(index)} is not positive definite")
    return 0.5 * logdet / np.log(2.0)


def neural_complexity_from_covariance(cov: np.ndarray, max_exact_n: int = MAX_EXACT_CHANNELS,
                                      subset_samples: int = DEFAULT_SUBSET_SAMPLES,
                                      seed: int = 0) -> float:
    """C_N in bits for a given (regularized) covariance matrix."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0]
    if n < 2 or cov.shape != (n, n):
        raise InvalidParameter("neural complexity needs a square covariance of >= 2 channels")
    whole = gaussian_entropy(cov, range(n))
    exact = n <= max_exact_n
    rng = rng_for(seed, n)
    total = 0.0
    for k in range(1, n):
        if exact or comb(n, k) <= subset_samples:
            subsets = itertools.combinations(range(n), k)
        else:
            subsets = (np.sort(rng.choice(n, size=k, replace=False)) for _ in range(subset_samples))
        entropies = [gaussian_entropy(cov, subset) for subset in subsets]
        total += float(np.mean(entropies)) - k / n * whole
    return total


def neural_complexity(data: np.ndarray, max_exact_n: int = MAX_EXACT_CHANNELS,
                      subset_samples: int = DEFAULT_SUBSET_SAMPLES,
                      seed: int = 0) -> float:
    """Neural complexity in bits of channels given as rows of ``data``.

    Subset entropies are enumerated exactly for n <= max_exact_n channels and
    averaged over ``subset_samples`` random subsets per size beyond that.

    Raises:
        TooShort: Fewer than 10*n samples per channel.
        SingularCovariance: Non-finite input.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise InvalidParameter("neural complexity needs at least two channels as rows")
    n, length = data.shape
    if length < 10 * n:
        raise TooShort(f"{length} samples cannot estimate a {n}-channel covariance")
    if not np.all(np.isfinite(data)):
        raise SingularCovariance("input contains non-finite samples")
    value = neural_complexity_from_covariance(regularized_covariance(data), max_exact_n,
                                              subset_samples, seed)
    logger.debug(f"neural complexity over {n} channels: {value:.6f} bits")
    return value


def clustered_covariance(cluster_sizes, within: float) -> np.ndarray:
    """Unit-variance covariance with correlation ``within`` inside each cluster."""
    n = int(sum(cluster_sizes))
    cov = np.eye(n)
    start = 0
    for size in cluster_sizes:
        block = slice(start, start + size)
        cov[block, block] = within
        start += size
    np.fill_diagonal(cov, 1.0)
    return cov
