"""Tone-curve harmonization between two adjacent cameras.

A camera's pixels have already been through its own tone curve.  At the
pair boundary we want them to look as if both cameras had used the
pair-averaged curve instead.  In ``compose`` mode the correction LUT undoes
the camera's own curve and applies the average; in ``literal-average`` mode
the averaged curve is applied to the pixel values as they are.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .awb import _check_half
from .blend import BlendWeights
from .core import GTM_MODES, LUT_SIZE, GtmLut, GtmMode, ImageBuffer, ValidationError, lut_interp

_GRID = np.arange(LUT_SIZE, dtype=np.float64)


def average_lut(lut1: GtmLut, lut2: GtmLut) -> GtmLut:
    return GtmLut((lut1.entries + lut2.entries) / 2.0)


def inverse_values(lut: GtmLut, y) -> np.ndarray:
    """Invert a monotone piecewise-linear LUT at arbitrary values ``y``.

    Plateaus map to the lowest index attaining the value.  Values below
    ``lut[0]`` map to 0 and values above ``lut[255]`` to 255.
    """
    e = lut.entries
    y = np.asarray(y, dtype=np.float64)
    k = np.clip(np.searchsorted(e, y, side="left"), 1, LUT_SIZE - 1)
    lo = e[k - 1]
    hi = e[k]
    span = hi - lo
    frac = np.divide(y - lo, span, out=np.zeros_like(y), where=span > 0)
    out = (k - 1) + frac
    # side="left" lands on the first index of a plateau
    out = np.where(e[k] == y, k, out)
    out = np.where(y <= e[0], 0.0, out)
    out = np.where(y > e[-1], float(LUT_SIZE - 1), out)
    return out


def invert_lut(lut: GtmLut) -> np.ndarray:
    """256-point inverse of ``lut``, sampled at integer output levels."""
    return inverse_values(lut, _GRID)


@dataclass(frozen=True, eq=False)
class CorrectionLut:
    """Tone correction applied at a camera's outer boundary column."""

    entries: np.ndarray
    mode: GtmMode = "compose"

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.float64, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls, mode: GtmMode = "compose") -> "CorrectionLut":
        return cls(_GRID, mode)

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.entries, _GRID))

    def __call__(self, values):
        return lut_interp(self.entries, values)


def boundary_correction_lut(lut_self: GtmLut, lut_avg: GtmLut, mode: GtmMode = "compose") -> CorrectionLut:
    """Correction mapping this camera's tone-mapped values to the pair average.

    ``compose``: ``corr(v) = lut_avg(inverse(lut_self)(v))``.
    ``literal-average``: ``corr(v) = lut_avg(v)``.
    The result is made monotone by a running maximum and clamped to [0, 255].
    """
    if mode not in GTM_MODES:
        raise ValidationError(f"unknown gtm mode {mode!r}", "gtm_mode")
    if mode == "compose":
        if lut_self == lut_avg:
            # f(f^-1(v)) is the identity by definition; skip interpolation noise
            return CorrectionLut.identity(mode)
        corr = lut_avg(invert_lut(lut_self))
    else:
        corr = lut_avg.entries.copy()
    corr = np.clip(np.maximum.accumulate(corr), 0.0, 255.0)
    return CorrectionLut(corr, mode)


def apply_gtm_half(image: np.ndarray, side: str, corr: CorrectionLut, weights: BlendWeights) -> np.ndarray:
    """Blend each pixel of one half toward its tone-corrected value.

    ``out = (1 - w) * v + w * corr(clip(v, 0, 255))`` which equals
    ``v * (1 + (corr(v) / v - 1) * w)`` for ``v > 0`` without dividing by
    ``v``.  Returns a new float64 array.
    """
    out = image.as_float() if isinstance(image, ImageBuffer) else np.array(image, dtype=np.float64)
    _check_half(out, side, weights)
    gtm_half_inplace(out, corr, weights)
    return out


def gtm_half_inplace(work: np.ndarray, corr: CorrectionLut, weights: BlendWeights) -> None:
    if corr.is_identity:
        return
    w = weights.weights[None, :, None]
    v = work[:, weights.columns, :]
    target = lut_interp(corr.entries, v)
    # (1 - w) * v + w * target, without temporaries
    target *= w
    v *= 1.0 - w
    v += target
