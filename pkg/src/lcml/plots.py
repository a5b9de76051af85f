"""Report figures rendered to files.

SVG output is made byte-reproducible: element ids are salted with a
fixed string and the creation-date metadata is dropped, so identical
inputs give identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .eval import ConfusionMatrix

__all__ = ["save_confusion_figure", "save_lightcurve_figure"]

matplotlib.rcParams["svg.hashsalt"] = "lcml"

_SVG_META = {"Date": None, "Creator": None}


def _save(fig, path: str | Path):
    path = Path(path)
    if path.suffix.lower() == ".svg":
        fig.savefig(path, metadata=_SVG_META)
    else:
        fig.savefig(path)
    plt.close(fig)


def save_confusion_figure(cm: ConfusionMatrix, path: str | Path, title: str = "") -> None:
    """Heatmap of the 2x2 confusion matrix with count annotations."""
    grid = np.array([[cm.tn, cm.fp], [cm.fn, cm.tp]], dtype=float)
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    im = ax.imshow(grid, cmap="Blues")
    for (r, c), value in np.ndenumerate(grid):
        color = "white" if value > grid.max() / 2 else "black"
        ax.text(c, r, f"{int(value)}", ha="center", va="center", color=color)
    ax.set_xticks([0, 1], ["0", "1"])
    ax.set_yticks([0, 1], ["0", "1"])
    ax.set_xlabel("predicted")
    ax.set_ylabel("actual")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    _save(fig, path)


def save_lightcurve_figure(
    curves, path: str | Path, labels=None, title: str = "Light curves"
) -> None:
    """Line plot of one or more flux curves, optionally labeled."""
    curves = np.atleast_2d(np.asarray(curves, dtype=float))
    fig, ax = plt.subplots(figsize=(7.0, 3.2))
    for i, curve in enumerate(curves):
        label = None if labels is None else str(labels[i])
        ax.plot(np.arange(curve.shape[0]), curve, linewidth=0.8, label=label)
    ax.set_xlabel("sample")
    ax.set_ylabel("flux")
    ax.set_title(title)
    if labels is not None:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)
