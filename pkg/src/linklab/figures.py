"""Figure rendering for report outputs (written next to the CSV/JSON files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import EvalReport


def render_confusion_heatmap(report: EvalReport, path, title: str = "", metadata: dict | None = None):
    """Row-normalized confusion matrix as a heatmap, rows ordered by support."""
    cm = report.confusion
    n = len(cm.labels)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.6 * n + 2), max(3.5, 0.6 * n + 1.5)))
    data = np.asarray(cm.rows)
    im = ax.imshow(data, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(n), cm.labels, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(n), cm.labels, fontsize=8)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    if title:
        ax.set_title(title)
    for i in range(n):
        for j in range(n):
            value = data[i, j]
            if value >= 0.005:
                ax.text(
                    j,
                    i,
                    f"{value:.2f}",
                    ha="center",
                    va="center",
                    fontsize=7,
                    color="white" if value > 0.5 else "black",
                )
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=metadata)
    plt.close(fig)


def render_repo_scatter(summary_rows: list[dict], path, metadata: dict | None = None):
    """Macro F1 vs across-class F1 std dev, one labeled point per repository."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for row in summary_rows:
        ax.scatter(row["macro_f1"], row["f1_std_dev"], s=30, color="tab:blue")
        ax.annotate(
            row["repo_id"],
            (row["macro_f1"], row["f1_std_dev"]),
            textcoords="offset points",
            xytext=(4, 3),
            fontsize=8,
        )
    ax.set_xlabel("macro F1")
    ax.set_ylabel("F1 std dev across classes")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=metadata)
    plt.close(fig)
