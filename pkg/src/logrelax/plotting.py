"""Figure rendering for curve CSVs emitted by the CLI.

All functions write PNG files; the Agg backend keeps this usable in
headless environments.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_curve_plot", "save_matching_plot"]


def save_curve_plot(
    times: np.ndarray,
    curves: Mapping[str, np.ndarray],
    path: str | Path,
    xlabel: str = "t",
    ylabel: str = "stress",
    logx: bool = False,
    logy: bool = False,
    title: str | None = None,
    dpi: int = 150,
) -> Path:
    """Plot labeled curves over a shared time axis and save to path."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for label, values in curves.items():
        ax.plot(times, values, label=label, linewidth=1.4)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def save_matching_plot(
    times: np.ndarray,
    exact: Mapping[str, np.ndarray],
    asymptotic: Mapping[str, np.ndarray],
    path: str | Path,
    title: str | None = None,
    dpi: int = 150,
) -> Path:
    """Overlay exact curves (solid) and their large-time tails (dashed) on log axes."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, label in enumerate(exact):
        c = colors[i % len(colors)]
        ax.plot(times, exact[label], color=c, linewidth=1.4, label=label)
        if label in asymptotic:
            ax.plot(times, asymptotic[label], color=c, linewidth=1.0, linestyle="--")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("stress")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
