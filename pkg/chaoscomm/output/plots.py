"""
Optional SVG figures.

Rendering goes through the Agg backend into memory and is then written with
the same atomic writer as the CSV artifacts.
"""

import io
import logging
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from chaoscomm.output.writers import PathLike, atomic_write_text  # noqa: E402

logger = logging.getLogger("chaoscomm.output.plots")

# keeps SVG ids stable between runs
matplotlib.rcParams["svg.hashsalt"] = "chaoscomm"
MAX_POINTS = 20000


def _thin(times: np.ndarray, values: np.ndarray):
    stride = max(1, int(np.ceil(times.size / MAX_POINTS)))
    return times[::stride], values[..., ::stride]


def _save(fig, path: PathLike) -> Path:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    path = atomic_write_text(path, buffer.getvalue())
    logger.info(f"Wrote figure {path}")
    return path


def plot_trajectory(path: PathLike, times: np.ndarray, data: np.ndarray,
                    labels: Optional[Sequence[str]] = None, title: str = "") -> Path:
    """One panel per node plus an x_a vs x_b phase plot for two nodes."""
    times, data = _thin(np.asarray(times), np.atleast_2d(data))
    rows = data.shape[0]
    labels = list(labels or [f"node{i}" for i in range(rows)])
    panels = rows + (1 if rows == 2 else 0)
    fig, axes = plt.subplots(panels, 1, figsize=(8, 2.2 * panels), squeeze=False)
    for i in range(rows):
        ax = axes[i, 0]
        ax.plot(times, data[i], linewidth=0.6)
        ax.set_ylabel(f"{labels[i]} (V)")
        ax.grid(True, alpha=0.3)
    axes[rows - 1, 0].set_xlabel("t (s)")
    if rows == 2:
        ax = axes[2, 0]
        ax.plot(data[0], data[1], linewidth=0.3)
        ax.set_xlabel(f"{labels[0]} (V)")
        ax.set_ylabel(f"{labels[1]} (V)")
        ax.grid(True, alpha=0.3)
    if title:
        axes[0, 0].set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_masking(path: PathLike, times: np.ndarray, carrier: np.ndarray,
                 tx: np.ndarray, residual: np.ndarray) -> Path:
    """Carrier, transmitted line and receiver residual panels."""
    times, stacked = _thin(np.asarray(times), np.vstack((carrier, tx, residual)))
    fig, axes = plt.subplots(3, 1, figsize=(8, 6.6), sharex=True)
    for ax, values, label in zip(axes, stacked, ("carrier", "transmitted", "residual")):
        ax.plot(times, values, linewidth=0.6)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel("t (s)")
    fig.tight_layout()
    return _save(fig, path)


def plot_ber(path: PathLike, ebn0_db: Sequence[float], ber: Sequence[float],
             ci_lo: Sequence[float], ci_hi: Sequence[float], label: str,
             theory: Optional[Sequence[float]] = None) -> Path:
    """Log-BER curve with Wilson intervals and an optional closed form."""
    x = np.asarray(ebn0_db, dtype=float)
    y = np.asarray(ber, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    err = np.vstack((y - np.asarray(ci_lo), np.asarray(ci_hi) - y))
    ax.errorbar(x, np.where(y > 0, y, np.nan), yerr=err, marker="o", capsize=3, label=label)
    if theory is not None:
        ax.plot(x, theory, "k--", linewidth=1.0, label="closed form")
    ax.set_yscale("log")
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_sync_scan(path: PathLike, values: Sequence[float], correlation: Sequence[float],
                   parameter: str) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(values, correlation, marker="o")
    ax.set_xlabel(parameter)
    ax.set_ylabel("peak correlation")
    ax.set_ylim(-1.05, 1.05)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)
