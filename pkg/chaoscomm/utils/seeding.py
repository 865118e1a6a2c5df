"""
Seed derivation for reproducible experiments.

Every random stream in chaoscomm is a numpy Generator seeded from the
experiment seed plus integer keys (node index, sweep point index, purpose tag),
so results never depend on the order in which streams are consumed or on
which worker thread evaluates them.
"""

import hashlib
import logging

import numpy as np

logger = logging.getLogger("chaoscomm.seeding")

SEED_MASK = (1 << 64) - 1


def normalize_seed(seed: int) -> int:
    """Map any integer to the unsigned 64-bit range numpy accepts."""
    return int(seed) & SEED_MASK


def purpose_key(name: str) -> int:
    """Stable integer key for a named random stream."""
    digest = hashlib.sha256(name.encode("utf-8")).hexdigest()
    return int(digest[:8], 16)


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the stream identified by ``seed`` and ``keys``."""
    return np.random.default_rng([normalize_seed(seed)] + [int(k) & SEED_MASK for k in keys])


def node_rng(seed: int, node: int) -> np.random.Generator:
    """Stream used for the initial history of one node."""
    return rng_for(seed, node)


def point_rng(seed: int, index: int, purpose: str = "") -> np.random.Generator:
    """Stream for one sweep point, optionally split further by purpose."""
    if purpose:
        return rng_for(seed, index, purpose_key(purpose))
    return rng_for(seed, index)


def derive_seed(seed: int, *keys: int) -> int:
    """Integer seed derived from ``seed`` and ``keys`` (for APIs taking ints)."""
    return int(rng_for(seed, *keys).integers(0, 2 ** 63 - 1))
