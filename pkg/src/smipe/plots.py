"""Figure rendering for report outputs. File-based, no display needed."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .corpus import FertilityReport  # noqa: E402


def plot_fertility_histogram(
    report: FertilityReport,
    path: str | Path,
    label_a: str = "atom units",
    label_b: str = "trained",
) -> None:
    """Render the tokens-per-string distributions of both tokenizers."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    upper = max(max(report.counts_a), max(report.counts_b))
    bins = range(1, upper + 2)
    ax.hist(
        report.counts_a,
        bins=bins,
        alpha=0.6,
        label=f"{label_a} (median {report.median_a})",
    )
    ax.hist(
        report.counts_b,
        bins=bins,
        alpha=0.6,
        label=f"{label_b} (median {report.median_b})",
    )
    ax.set_xlabel("tokens per string")
    ax.set_ylabel("strings")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_similarity_histogram(values: Sequence[float], path: str | Path) -> None:
    """Render the distribution of per-record fingerprint similarities."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(list(values), bins=20, range=(0.0, 1.0), color="#4878d0")
    ax.set_xlabel("fingerprint similarity")
    ax.set_ylabel("records")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
