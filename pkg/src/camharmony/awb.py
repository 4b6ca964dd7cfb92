"""White-balance harmonization between two adjacent cameras."""

from __future__ import annotations

import numpy as np

from .blend import BlendWeights, spatial_gain
from .core import AwbGains, DimensionMismatch, ImageBuffer, validate_awb

# Boundary gains share the AWB triple's shape; only the meaning differs.
BoundaryGains = AwbGains


def awb_boundary_gains(awb1: AwbGains, awb2: AwbGains) -> tuple[BoundaryGains, BoundaryGains]:
    """Gains that move both cameras to the pair's mean white balance.

    Camera 1 is the one whose right edge meets camera 2's left edge.  Each
    returned triple is ``mean(awb1, awb2) / own_awb`` per channel, so after
    applying them at the boundary both cameras sit on the averaged AWB.
    """
    validate_awb(awb1, "awb1")
    validate_awb(awb2, "awb2")
    a1 = awb1.as_array()
    a2 = awb2.as_array()
    avg = (a1 + a2) / 2.0
    return BoundaryGains.from_array(avg / a1), BoundaryGains.from_array(avg / a2)


def _check_half(image: np.ndarray, side: str, weights: BlendWeights) -> None:
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionMismatch(f"expected an (H, W, 3) image, got {image.shape}")
    if weights.width != image.shape[1]:
        raise DimensionMismatch(f"weights are for width {weights.width}, image is {image.shape[1]}")
    if weights.side != side:
        raise DimensionMismatch(f"weights are for the {weights.side} half, asked for {side}")


def awb_gain_profile(boundary: BoundaryGains, weights: BlendWeights) -> np.ndarray:
    """Per-column, per-channel gains over one half, shape ``(n_cols, 3)``."""
    return spatial_gain(boundary.as_array()[None, :], weights.weights[:, None])


def apply_awb_half(image, side: str, boundary: BoundaryGains, weights: BlendWeights) -> np.ndarray:
    """Scale one half of ``image`` by the spatially blended AWB gain.

    Returns a float64 working copy.  Columns outside the half are copied
    through unchanged; nothing is rounded or clamped here.
    """
    out = image.as_float() if isinstance(image, ImageBuffer) else np.array(image, dtype=np.float64)
    _check_half(out, side, weights)
    awb_half_inplace(out, boundary, weights)
    return out


def awb_half_inplace(work: np.ndarray, boundary: BoundaryGains, weights: BlendWeights) -> None:
    work[:, weights.columns, :] *= awb_gain_profile(boundary, weights)[None, :, :]
