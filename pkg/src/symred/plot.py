"""Figures for algorithm comparisons."""
from __future__ import annotations

from typing import Dict, List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SERIES = (
    ("mono", False, "monolithic", "o-"),
    ("comp", False, "component-wise", "s-"),
    ("comp", True, "component-wise + state sym.", "^--"),
)


def plot_comparison(rows: List[Dict], path: str, title: str = "") -> None:
    """Peak live nodes and run time against problem size, one line per
    algorithm and model family. Incomplete runs are left out."""
    fig, (ax_nodes, ax_time) = plt.subplots(1, 2, figsize=(10, 4))
    models = sorted({r["model"] for r in rows})
    for model in models:
        for algo, sym, label, style in SERIES:
            pts = sorted((r["size_key"], r["peak_live_nodes"], r["time_ms"])
                         for r in rows
                         if r["model"] == model and r["algorithm"] == algo
                         and r["state_symmetries"] == sym and r["status"] == "complete")
            if not pts:
                continue
            xs = [p[0] for p in pts]
            name = label if len(models) == 1 else f"{model}, {label}"
            ax_nodes.plot(xs, [p[1] for p in pts], style, label=name)
            ax_time.plot(xs, [p[2] / 1000.0 for p in pts], style, label=name)
    ax_nodes.set_xlabel("components")
    ax_nodes.set_ylabel("peak live BDD nodes")
    ax_nodes.set_yscale("log")
    ax_time.set_xlabel("components")
    ax_time.set_ylabel("time [s]")
    ax_time.set_yscale("log")
    ax_nodes.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
