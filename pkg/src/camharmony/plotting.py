"""Figures for the eval and bench reports, rendered to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bench import METHODS, BenchResult  # noqa: E402
from .metrics import SeamReport, column_gains, images_of  # noqa: E402

CHANNEL_COLORS = ("tab:red", "tab:green", "tab:blue")


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_seams(report: SeamReport, path) -> Path:
    """Pre/post seam discontinuity per adjacent pair."""
    labels = [f"{p.left}|{p.right}" for p in report.pairs]
    pre = [p.pre for p in report.pairs]
    post = [p.post for p in report.pairs]
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(1.2 * len(labels) + 2.5, 3.2))
    ax.bar(x - 0.2, pre, 0.4, label="before", color="0.65")
    ax.bar(x + 0.2, post, 0.4, label="after", color="tab:blue")
    ax.set_xticks(x, labels)
    ax.set_ylabel("mean |difference| (levels)")
    ax.set_title(f"seam discontinuity, mean reduction {report.mean_reduction:.0%}")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_gain_profiles(before, after, path) -> Path:
    """Observed per-column gain of every camera, one panel per camera.

    ``before`` is a RigConfig, ``after`` anything with ``frames`` or a list
    of images in the same order.
    """
    images = images_of(after)
    n = len(before.cameras)
    fig, axes = plt.subplots(1, n, figsize=(3.0 * n, 2.6), sharey=True, squeeze=False)
    for ax, cam, img in zip(axes[0], before.cameras, images):
        g = column_gains(cam.image, img)
        for c in range(3):
            ax.plot(g[:, c], color=CHANNEL_COLORS[c], lw=1)
        ax.axvline(cam.image.width // 2, color="0.5", lw=0.6, ls=":")
        ax.set_title(cam.id)
        ax.set_xlabel("column")
    axes[0][0].set_ylabel("gain")
    return _save(fig, path)


def plot_bench(result: BenchResult, path) -> Path:
    """Stacked stage breakdown per method."""
    fig, ax = plt.subplots(figsize=(5.0, 3.0))
    for row, method in enumerate(METHODS):
        left = 0.0
        for stage, ms in result.stages[method].items():
            ax.barh(row, ms, left=left, label=f"{method}: {stage}")
            left += ms
    ax.set_yticks(range(len(METHODS)), METHODS)
    ax.set_xlabel("median time per frame set (ms)")
    ax.set_title(f"ratio metadata/gct = {result.ratio:.2f}")
    ax.legend(fontsize=7, frameon=False, loc="upper left", bbox_to_anchor=(1.0, 1.0))
    return _save(fig, path)
