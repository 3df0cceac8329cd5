"""Matplotlib figures written next to the CLI's JSON/CSV output."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .noise import Histogram  # noqa: E402
from .qcore import StateVector  # noqa: E402

_ALLOWED = "#3b6ea8"
_FORBIDDEN = "#c23b22"


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_amplitudes(state: StateVector, path: str | Path, title: str = "") -> Path:
    """Modulus and real part per basis state; only the first 64 labels are
    drawn for wide registers."""
    n = state.num_qubits
    amps = state.amps
    x = np.arange(amps.size)
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(max(6, min(amps.size, 64) * 0.3), 5), sharex=True)
    top.bar(x, np.abs(amps), color=_ALLOWED)
    top.set_ylabel("|amplitude|")
    bottom.bar(x, amps.real, color=_ALLOWED)
    bottom.axhline(0, color="k", lw=0.5)
    bottom.set_ylabel("Re amplitude")
    if amps.size <= 64:
        bottom.set_xticks(x)
        bottom.set_xticklabels([format(i, f"0{n}b") for i in x], rotation=90, fontsize=7)
    if title:
        top.set_title(title)
    return _finish(fig, path)


def plot_histogram(hist: Histogram, probs: np.ndarray, path: str | Path, title: str = "") -> Path:
    """Sampled frequencies against exact probabilities; bins that the ideal
    state never produces are drawn in red."""
    freqs = hist.frequencies()
    n = hist.num_qubits
    x = np.arange(freqs.size)
    colors = [_FORBIDDEN if p <= 1e-12 else _ALLOWED for p in probs]
    fig, ax = plt.subplots(figsize=(max(6, min(freqs.size, 64) * 0.35), 3.5))
    ax.bar(x, freqs, color=colors)
    ax.scatter(x, probs, marker="_", color="k", s=120, label="exact", zorder=3)
    ax.set_ylabel(f"frequency ({hist.shots} shots)")
    if freqs.size <= 64:
        ax.set_xticks(x)
        ax.set_xticklabels([format(i, f"0{n}b") for i in x], rotation=90, fontsize=7)
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_values(labels: Sequence[str], values: Sequence[float], path: str | Path,
                title: str = "", ylabel: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(max(4, len(labels) * 0.5), 3))
    ax.bar(range(len(values)), values, color=_ALLOWED)
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels, rotation=90, fontsize=8)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    return _finish(fig, path)
