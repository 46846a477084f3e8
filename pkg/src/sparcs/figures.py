"""Figure rendering for the report paths.

Every experiment writes its numbers as CSV first; these helpers render the
same data as PNG files next to them.  Figures are a convenience view, the
CSVs stay the canonical artifact.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "save_sweep_curves",
    "save_eig_histogram",
    "save_pruning_curve",
    "save_param_counts",
    "save_history_curves",
]

_DPI = 150


def _new_axes(xlabel: str, ylabel: str, title: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def save_sweep_curves(path, rows, ylabel: str, title: str) -> str:
    """Mean/std curves vs alpha, one series per beta.

    rows: iterable of (alpha, beta, mean, std).
    """
    series: dict[float, list[tuple[float, float, float]]] = {}
    for alpha, beta, mean, std in rows:
        series.setdefault(beta, []).append((alpha, mean, std))
    fig, ax = _new_axes("alpha", ylabel, title)
    for beta in sorted(series):
        pts = sorted(series[beta])
        xs = [p[0] for p in pts]
        ms = [p[1] for p in pts]
        ss = [p[2] for p in pts]
        ax.errorbar(xs, ms, yerr=ss, marker="o", capsize=3, label=f"beta={beta:g}")
    ax.legend()
    return _save(fig, path)


def save_eig_histogram(path, counts, edges, label: str) -> str:
    fig, ax = _new_axes("|eigenvalue|", "count", label)
    widths = [e2 - e1 for e1, e2 in zip(edges[:-1], edges[1:])]
    ax.bar(edges[:-1], counts, width=widths, align="edge", edgecolor="black", alpha=0.75)
    return _save(fig, path)


def save_pruning_curve(path, active, rel_increase, threshold_pct: float) -> str:
    fig, ax = _new_axes(
        "active hidden neurons", "relative validation-loss increase", "spectral pruning"
    )
    ax.plot(active, rel_increase, marker=".", lw=1)
    ax.axhline(threshold_pct / 100.0, color="red", ls="--", lw=1,
               label=f"threshold {threshold_pct:g}%")
    ax.invert_xaxis()
    ax.legend()
    return _save(fig, path)


def save_param_counts(path, rows) -> str:
    """rows: iterable of (depth, spectral_total, direct_total)."""
    rows = sorted(rows)
    depths = [r[0] for r in rows]
    fig, ax = _new_axes("hidden layers", "trainable parameters", "parameter counts")
    ax.plot(depths, [r[1] for r in rows], marker="o", label="spectral")
    ax.plot(depths, [r[2] for r in rows], marker="s", label="direct with skips")
    ax.legend()
    return _save(fig, path)


def save_history_curves(path, epochs, train_loss, val_loss, title: str) -> str:
    fig, ax = _new_axes("epoch", "loss", title)
    ax.plot(epochs, train_loss, label="train")
    ax.plot(epochs, val_loss, label="validation")
    ax.set_yscale("log")
    ax.legend()
    return _save(fig, path)
