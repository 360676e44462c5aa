"""Delimited report output and the matplotlib figures rendered beside it.

CSV files start with ``# key=value`` comment lines echoing the producing
command and its parameters, then a header row.  Figures are written
atomically next to their CSV unless plotting is disabled.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .._util import atomic_write_text

__all__ = [
    "write_csv", "save_figure",
    "series_figure", "perplexity_figure", "accuracy_figure",
]


def write_csv(path: str, columns, rows, meta: dict | None = None) -> None:
    """Write a CSV with leading ``# key=value`` metadata comment lines."""
    buf = io.StringIO()
    for key in sorted(meta or {}):
        buf.write(f"# {key}={meta[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if x is None else x for x in row])
    atomic_write_text(path, buf.getvalue())


def save_figure(fig, path: str) -> None:
    """Render a figure to ``path`` atomically and release it."""
    directory = os.path.dirname(os.path.abspath(path))
    suffix = os.path.splitext(path)[1] or ".png"
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=suffix)
    os.close(fd)
    try:
        fig.savefig(tmp, format=suffix.lstrip("."), dpi=130)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.unlink(tmp)


def series_figure(series, suggested_n: int | None = None):
    """Merge-cost curve and its ratio: delta_h and delta ratio against n."""
    ns = [n for n, _, _ in series]
    dhs = [dh for _, dh, _ in series]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(ns, dhs, lw=1.2, color="#33557f")
    ax1.set_ylabel("delta h(n)")
    ax1.grid(True, alpha=0.3)
    ratio_ns = [n for n, _, r in series if r is not None]
    ratios = [r for _, _, r in series if r is not None]
    ax2.plot(ratio_ns, ratios, lw=1.2, color="#7f3355")
    if suggested_n is not None:
        ax2.axvline(suggested_n, color="#444444", ls="--", lw=1.0)
        ax2.annotate(f"n={suggested_n}", (suggested_n, max(ratios)),
                     textcoords="offset points", xytext=(4, -2), fontsize=9)
    ax2.set_xlabel("number of topics n")
    ax2.set_ylabel("delta h(n) / delta h(n+1)")
    ax2.grid(True, alpha=0.3)
    if ns and max(ns) > 60:
        ax2.set_xscale("log")
    fig.tight_layout()
    return fig


def perplexity_figure(report):
    """Histogram of per-document, per-token held-out log probability."""
    rates = [lp / ln for _, lp, ln in report.per_doc]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(rates, bins=min(50, max(5, len(rates) // 5)), color="#33557f")
    ax.set_xlabel("log probability per token")
    ax.set_ylabel("documents")
    ax.set_title(f"perplexity {report.perplexity:.2f} "
                 f"({report.token_count} tokens)")
    fig.tight_layout()
    return fig


def accuracy_figure(rows):
    """Micro-averaged accuracy against feature count, log-2 feature axis."""
    counts = [c for c, _ in rows]
    accs = [a for _, a in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(counts, accs, marker="o", lw=1.2, color="#33557f")
    if counts and max(counts) / max(1, min(counts)) >= 4:
        ax.set_xscale("log", base=2)
    ax.set_xlabel("feature count")
    ax.set_ylabel("micro-averaged accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig
