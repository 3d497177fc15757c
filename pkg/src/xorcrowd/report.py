"""Figure rendering for experiment results.

Draws FER/BER curves against the query budget from one or more result
tables, next to the CSV they came from.  Zero error rates cannot sit on a
log axis, so they are dropped from the curve rather than clipped.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import ResultRow, read_csv

__all__ = ["plot_error_curves", "plot_csv_files"]


def _curve(ax, rows: list[ResultRow], label: str, color, normalized: bool) -> None:
    rows = sorted(rows, key=lambda r: r.budget_n)
    xs = np.asarray(
        [r.normalized_budget if normalized else r.budget_n for r in rows], dtype=float
    )
    fer = np.asarray([r.fer for r in rows], dtype=float)
    ber = np.asarray([r.ber for r in rows], dtype=float)
    fer[fer == 0] = np.nan
    ber[ber == 0] = np.nan
    ax.plot(xs, fer, "o-", color=color, label=f"{label} FER")
    ax.plot(xs, ber, "s--", color=color, alpha=0.7, label=f"{label} BER")


def plot_error_curves(
    series: dict[str, list[ResultRow]],
    out_path,
    title: str | None = None,
    normalized: bool | None = None,
) -> str:
    """Render error-rate curves to an image file.

    Parameters
    ----------
    series : dict
        Legend label -> result rows.
    out_path : path-like
        Destination image; the extension picks the format.
    normalized : bool, optional
        Plot against the threshold-normalized budget (default: yes whenever
        every row carries a finite normalized budget; a reference line marks
        the threshold).

    Returns
    -------
    str
        The written path.
    """
    if not series or all(not rows for rows in series.values()):
        raise ValueError("nothing to plot")
    if normalized is None:
        normalized = all(
            np.isfinite(r.normalized_budget) for rows in series.values() for r in rows
        )
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for idx, (label, rows) in enumerate(series.items()):
        _curve(ax, list(rows), label, colors[idx % len(colors)], normalized)
    if normalized:
        ax.axvline(1.0, color="0.4", linestyle="-.", linewidth=1, label="threshold")
        ax.set_xlabel("query budget / recovery threshold")
    else:
        ax.set_xlabel("total queries")
    ax.set_ylabel("error rate")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    out_path = os.fspath(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_csv_files(
    paths, out_path, labels: list[str] | None = None, title: str | None = None
) -> str:
    """Render one figure from result CSVs, labeled by file stem by default."""
    paths = [os.fspath(p) for p in paths]
    if labels is not None and len(labels) != len(paths):
        raise ValueError("need one label per results file")
    series: dict[str, list[ResultRow]] = {}
    for i, p in enumerate(paths):
        label = labels[i] if labels else os.path.splitext(os.path.basename(p))[0]
        series[label] = read_csv(p)
    return plot_error_curves(series, out_path, title=title)
