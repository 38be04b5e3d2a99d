"""Figures of cumulative per-server cost, rendered off-screen to image files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .schedules import CostLedger  # noqa: E402

TAG_COLOURS = {"phase-swap": "0.75", "correction": "#f4c7a1", "tail-correction": "#e08a5a", "swap": "#9ecae1"}


def plot_curves(ledger: CostLedger, path, title: str = "", mark_tags: bool = True):
    """Write a step plot of every server's cumulative cost; returns ``path``."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=120)
    steps = list(range(ledger.steps + 1))
    for i in range(ledger.k):
        ys = [0.0] + [float(x) for x in ledger.cumulative(i)]
        ax.step(steps, ys, where="post", lw=1.2, label=f"server {i + 1}")
    if mark_tags:
        seen = set()
        for t, tag in enumerate(ledger.tags, start=1):
            if tag is None:
                continue
            label = tag if tag not in seen else None
            seen.add(tag)
            ax.axvline(t, color=TAG_COLOURS.get(tag, "0.85"), lw=0.6, zorder=0, label=label)
    ax.set_xlabel("step")
    ax.set_ylabel("cumulative cost")
    if title:
        ax.set_title(title)
    if ledger.k <= 12:
        ax.legend(fontsize=7, frameon=False, ncol=2)
    ax.spines[["top", "right"]].set_visible(False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_column(xs, ys, path, xlabel: str, ylabel: str, title: str = ""):
    """Simple marker-and-line plot of one experiment column against another."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6), dpi=120)
    ax.plot([float(x) for x in xs], [float(y) for y in ys], "o-", lw=1.2, ms=4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.spines[["top", "right"]].set_visible(False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
