"""Figures for verification reports (matplotlib, headless)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import SuiteReport  # noqa: E402

STATUS_COLOURS = {"pass": "#2e7d32", "xfail": "#f9a825", "fail": "#c62828", "xpass": "#6a1b9a"}


def plot_summary(reports: list[SuiteReport], path: str | Path) -> Path:
    """Horizontal bars of instances checked per suite (log scale), coloured by status."""
    path = Path(path)
    labels = [f"{r.suite} {r.engine}" for r in reports]
    counts = [max(r.instances, 1) for r in reports]
    colours = [STATUS_COLOURS[r.status] for r in reports]
    height = max(2.5, 0.28 * len(reports) + 1.0)
    fig, ax = plt.subplots(figsize=(9, height))
    ys = range(len(reports))
    ax.barh(list(ys), counts, color=colours)
    ax.set_yticks(list(ys))
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_xscale("log")
    ax.set_xlabel("instances checked")
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in STATUS_COLOURS.values()]
    ax.legend(handles, list(STATUS_COLOURS), loc="lower right", fontsize=7)
    fig.tight_layout()
    # no timestamp or version metadata, so reruns produce identical files
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_failures(reports: list[SuiteReport], path: str | Path) -> Path:
    """Failure counts for the suites that had any (expected or not)."""
    path = Path(path)
    failing = [r for r in reports if r.failure_count]
    fig, ax = plt.subplots(figsize=(7, max(2.0, 0.35 * len(failing) + 1.0)))
    if failing:
        ys = list(range(len(failing)))
        ax.barh(ys, [r.failure_count for r in failing], color=[STATUS_COLOURS[r.status] for r in failing])
        ax.set_yticks(ys)
        ax.set_yticklabels([f"{r.suite} {r.engine}" for r in failing], fontsize=7)
        ax.invert_yaxis()
        ax.set_xlabel("failing instances")
    else:
        ax.text(0.5, 0.5, "no failing instances", ha="center", va="center")
        ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path
