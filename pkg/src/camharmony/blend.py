"""Logistic blending curve and per-column blend weights."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .core import HarmonizeError

Side = Literal["left", "right"]

SCALE = 1.005
SHIFT = -0.0025
# remapped column index spans [0, X_MAX]
X_MAX = 12.0


class DomainError(HarmonizeError):
    pass


def _check_domain(x, lo: float, hi: float, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(arr)) or np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"{name} is defined on [{lo:g}, {hi:g}], got {x!r}")
    return arr


def _unwrap(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def logistic_standard(x):
    """Standard logistic ``1 / (1 + exp(-x))`` restricted to [-6, 6]."""
    arr = _check_domain(x, -6.0, 6.0, "logistic_standard")
    return _unwrap(1.0 / (1.0 + np.exp(-arr)))


def logistic_mod(x, clamp: bool = True):
    """Scaled and shifted logistic on [0, 12], truncated to [0, 1].

    ``clamp=False`` returns the raw value, which dips slightly below 0 at
    ``x=0`` and overshoots 1 at ``x=12``.
    """
    arr = _check_domain(x, 0.0, X_MAX, "logistic_mod")
    y = SCALE / (1.0 + np.exp(-arr + 6.0)) + SHIFT
    if clamp:
        y = np.clip(y, 0.0, 1.0)
    return _unwrap(y)


@dataclass(frozen=True, eq=False)
class BlendWeights:
    """Blend weight toward the boundary gain for one half of an image.

    ``weights[k]`` belongs to image column ``start + k``.  It is 0 where the
    original pixel is kept (the center column) and 1 at the outer column.
    """

    width: int
    side: Side
    weights: np.ndarray

    @property
    def start(self) -> int:
        return 0 if self.side == "left" else self.width // 2

    @property
    def stop(self) -> int:
        return self.width // 2 if self.side == "left" else self.width

    @property
    def columns(self) -> slice:
        return slice(self.start, self.stop)


@lru_cache(maxsize=64)
def blend_weights(width: int, side: Side) -> BlendWeights:
    """Precomputed (and cached) weights for one half of a ``width``-wide image.

    The right half covers ``[W/2, W-1]`` and owns the center column; the left
    half covers ``[0, W/2)``.  Column indices are remapped linearly so the
    outer column lands exactly on 12, which makes its weight exactly 1.
    """
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if int(width) != width or width < 4 or width % 2:
        raise DomainError(f"width must be an even integer >= 4, got {width!r}")
    width = int(width)
    half = width // 2
    if side == "right":
        x = np.arange(half, width, dtype=np.float64)
        t = (x - half) / (width - 1 - half) * X_MAX
        w = logistic_mod(t)
    else:
        x = np.arange(0, half, dtype=np.float64)
        t = x / (half - 1) * X_MAX
        w = 1.0 - logistic_mod(t)
    w = np.asarray(w, dtype=np.float64)
    w.flags.writeable = False
    return BlendWeights(width, side, w)


def full_width_weights(width: int) -> np.ndarray:
    """Left and right halves concatenated into one ``width``-long vector."""
    return np.concatenate([blend_weights(width, "left").weights, blend_weights(width, "right").weights])


def spatial_gain(boundary_gain, weight):
    """Gain at a column: 1 at weight 0, ``boundary_gain`` at weight 1.

    Both endpoints are exact in floating point; ``1 + (g - 1) * 1`` is not.
    """
    g = np.asarray(boundary_gain, dtype=np.float64)
    w = np.asarray(weight, dtype=np.float64)
    out = np.where(w == 1.0, g, 1.0 + (g - 1.0) * w)
    return _unwrap(out)
