"""Render stats reports as figures next to their machine-readable record."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .stats import StatsReport, round_fraction


def render_stats_figures(report: StatsReport, out_dir, stem: str = "stats") -> list[Path]:
    """Write bar charts for the report; returns the paths written.

    One chart for how sessions start (engine / direct / other) and, when
    any session started at an engine, one for the per-engine shares.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    labels = ["engine", "direct", "other"]
    values = [
        float(round_fraction(report.pct_start_engine, 1)),
        float(round_fraction(report.pct_start_direct, 1)),
        float(round_fraction(report.pct_start_other, 1)),
    ]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, values, color=["#4c72b0", "#55a868", "#c44e52"])
    ax.set_ylabel("% of sessions")
    ax.set_title("How sessions start")
    ax.set_ylim(0, 100)
    for x, v in enumerate(values):
        ax.text(x, v, f"{v:.1f}", ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    path = out_dir / f"{stem}_start_categories.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    if report.per_engine_shares:
        bases = [base for base, _ in report.per_engine_shares]
        shares = [float(round_fraction(s, 1)) for _, s in report.per_engine_shares]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.bar(bases, shares, color="#4c72b0")
        ax.set_ylabel("% of engine-initiated sessions")
        ax.set_title("Search engine shares")
        ax.set_ylim(0, 100)
        ax.tick_params(axis="x", labelrotation=20)
        for x, v in enumerate(shares):
            ax.text(x, v, f"{v:.1f}", ha="center", va="bottom", fontsize=9)
        fig.tight_layout()
        path = out_dir / f"{stem}_engine_shares.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    return written
