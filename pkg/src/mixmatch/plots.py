"""Figures for the experiment report path.

Rendered to files (Agg backend) next to the delimited output, never shown
interactively.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiment import Method1Summary
from .optimize import OptimizationReport


def save_loss_trace_figure(summary: Method1Summary, path: str | Path) -> Path:
    """Overlay every seed's objective trace on one set of axes."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for row in summary.rows:
        ax.plot(row.report.loss_trace, lw=1.0, alpha=0.7, label=f"seed {row.seed}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    ax.set_yscale("log")
    ax.set_title("Objective vs reference half A")
    if len(summary.rows) <= 10:
        ax.legend(fontsize=8, ncol=2)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_baseline_comparison_figure(summary: Method1Summary, path: str | Path) -> Path:
    """Per-seed optimized vs equal-loudness style loss against ground truth."""
    path = Path(path)
    seeds = [row.seed for row in summary.rows]
    x = np.arange(len(seeds))
    width = 0.38
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(x - width / 2, [r.af_vs_gt for r in summary.rows], width, label="optimized")
    ax.bar(
        x + width / 2,
        [r.baseline_loss for r in summary.rows],
        width,
        label="equal loudness",
    )
    ax.set_xticks(x)
    ax.set_xticklabels([str(s) for s in seeds], fontsize=8)
    ax.set_xlabel("seed")
    ax.set_ylabel("style loss vs ground truth half B")
    ax.set_yscale("log")
    ax.legend()
    ax.grid(True, axis="y", which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_match_trace_figure(report: OptimizationReport, path: str | Path) -> Path:
    """Single-run objective trace."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(report.loss_trace, lw=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel(f"{report.loss_kind} objective")
    ax.set_title(f"{report.grad_mode} gradient, seed {report.seed}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_method1_figures(summary: Method1Summary, csv_path: str | Path) -> list[Path]:
    """Render the report figures next to the CSV they accompany."""
    base = Path(csv_path)
    stem = base.with_suffix("")
    return [
        save_loss_trace_figure(summary, Path(f"{stem}_loss_traces.png")),
        save_baseline_comparison_figure(summary, Path(f"{stem}_af_vs_baseline.png")),
    ]
