"""Objective seam and quality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DimensionMismatch, ImageBuffer, RigConfig


def _arr(image) -> np.ndarray:
    return (image.data if isinstance(image, ImageBuffer) else np.asarray(image)).astype(np.float64)


LUMA = np.array([0.299, 0.587, 0.114])


def luminance(image) -> np.ndarray:
    """Rec. 601 luma, shape ``(H, W, 1)`` so it drops into the seam metrics."""
    return (_arr(image) @ LUMA)[..., None]


def seam_discontinuity(frame_a, frame_b, overlap_cols: int) -> float:
    """Mean absolute difference between a's rightmost and b's leftmost overlap columns."""
    a, b = _arr(frame_a), _arr(frame_b)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"heights differ: {a.shape[0]} vs {b.shape[0]}")
    if overlap_cols < 1 or overlap_cols > min(a.shape[1], b.shape[1]):
        raise DimensionMismatch(f"overlap_cols={overlap_cols} does not fit {a.shape} / {b.shape}")
    return float(np.mean(np.abs(a[:, a.shape[1] - overlap_cols :] - b[:, :overlap_cols])))


def boundary_disagreement(frame_a, frame_b) -> float:
    """Largest per-pixel difference between a's last column and b's first column."""
    a, b = _arr(frame_a), _arr(frame_b)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"heights differ: {a.shape[0]} vs {b.shape[0]}")
    return float(np.max(np.abs(a[:, -1] - b[:, 0])))


def gain_smoothness(gains) -> float:
    """Largest step between adjacent columns of a gain profile.

    ``gains`` is ``(n_cols,)`` or ``(n_cols, channels)``; the max runs over
    channels too.
    """
    g = np.asarray(gains, dtype=np.float64)
    if g.shape[0] < 2:
        raise ValueError("need at least 2 columns")
    return float(np.max(np.abs(np.diff(g, axis=0))))


def column_gains(original, harmonized) -> np.ndarray:
    """Observed per-column, per-channel gain: ratio of column means."""
    o, h = _arr(original), _arr(harmonized)
    if o.shape != h.shape:
        raise DimensionMismatch(f"{o.shape} vs {h.shape}")
    om = o.mean(axis=0)
    hm = h.mean(axis=0)
    return np.divide(hm, om, out=np.ones_like(hm), where=om > 0)


def psnr(image, reference) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    a, b = _arr(image), _arr(reference)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


@dataclass
class PairSeam:
    left: str
    right: str
    overlap_cols: int
    pre: float
    post: float

    @property
    def reduction(self) -> float:
        """Fraction of the pre-harmonization discontinuity removed; NaN when pre is 0."""
        return (self.pre - self.post) / self.pre if self.pre > 0 else math.nan


@dataclass
class SeamReport:
    pairs: list[PairSeam] = field(default_factory=list)
    gain_steps: dict[str, float] = field(default_factory=dict)

    @property
    def mean_reduction(self) -> float:
        vals = [p.reduction for p in self.pairs if not math.isnan(p.reduction)]
        return float(np.mean(vals)) if vals else math.nan

    def rows(self) -> list[dict]:
        return [
            {
                "pair": f"{p.left}|{p.right}",
                "overlap_cols": p.overlap_cols,
                "pre": round(p.pre, 4),
                "post": round(p.post, 4),
                "reduction": round(p.reduction, 4),
            }
            for p in self.pairs
        ]

    def to_dict(self) -> dict:
        return {
            "pairs": self.rows(),
            "mean_reduction": round(self.mean_reduction, 4),
            "max_gain_step": {k: round(v, 6) for k, v in self.gain_steps.items()},
        }


def images_of(rig) -> list:
    """Images of a RigConfig, a HarmonizedRig or a plain sequence, in ring order."""
    if hasattr(rig, "cameras"):
        return [c.image for c in rig.cameras]
    if hasattr(rig, "frames"):
        return list(rig.frames)
    return list(rig)


def seam_report(before: RigConfig, after) -> SeamReport:
    """Compare a rig with its harmonized images, pair by pair.

    ``after`` may be a RigConfig, a HarmonizedRig or a sequence of images in
    ring order.
    """
    images = images_of(after)
    cams = before.cameras
    if len(images) != len(cams):
        raise DimensionMismatch(f"{len(images)} harmonized images for {len(cams)} cameras")
    n = len(cams)
    report = SeamReport()
    for i in range(n):
        j = (i + 1) % n
        ov = before.overlap_cols[i]
        report.pairs.append(
            PairSeam(
                cams[i].id,
                cams[j].id,
                ov,
                seam_discontinuity(cams[i].image, cams[j].image, ov),
                seam_discontinuity(images[i], images[j], ov),
            )
        )
    for cam, img in zip(cams, images):
        report.gain_steps[cam.id] = gain_smoothness(column_gains(cam.image, img))
    return report
