"""Shared domain types for multi-camera harmonization.

Images are held as ``(height, width, 3)`` ``uint8`` arrays.  All gain math
runs in float64 on the 0-255 scale and is rounded to 8-bit exactly once,
at final output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

LUT_SIZE = 256

GtmMode = Literal["compose", "literal-average"]
GTM_MODES: tuple[str, ...] = ("compose", "literal-average")


class HarmonizeError(ValueError):
    """Base class for all domain errors raised by this package."""


class ValidationError(HarmonizeError):
    """A type invariant does not hold.  ``field`` names the offender."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class NonMonotoneLut(ValidationError):
    pass


class NonPositiveAwbGain(ValidationError):
    pass


class BadDimensions(ValidationError):
    pass


class DimensionMismatch(HarmonizeError):
    pass


class InsufficientCameras(HarmonizeError):
    pass


def lut_interp(entries: np.ndarray, values) -> np.ndarray:
    """Evaluate a 256-entry LUT at real ``values`` with linear interpolation.

    Inputs outside [0, 255] take the end values.  Same result as
    ``np.interp(values, arange(256), entries)`` but indexes the uniform grid
    directly instead of searching it.
    """
    frac = np.clip(values, 0.0, LUT_SIZE - 1.0)
    i = frac.astype(np.intp)
    frac -= i
    slope = np.empty(LUT_SIZE)
    slope[:-1] = np.diff(entries)
    slope[-1] = 0.0
    step = slope[i]
    step *= frac
    out = entries[i]
    out += step
    return out


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """An 8-bit RGB raster, shape ``(height, width, 3)``."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, copy=True)
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1]) if self.data.ndim >= 2 else 0

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    def as_float(self) -> np.ndarray:
        """Return a writable float64 working copy."""
        return self.data.astype(np.float64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))


@dataclass(frozen=True)
class AwbGains:
    """Per-channel white-balance gains reported by the ISP."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        for name in ("r", "g", "b"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "AwbGains":
        r, g, b = (float(v) for v in values)
        return cls(r, g, b)


@dataclass(frozen=True, eq=False)
class GtmLut:
    """256-entry global tone curve, shared by R, G and B."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.float64, copy=True).reshape(-1)
        object.__setattr__(self, "entries", _frozen(arr))

    @classmethod
    def identity(cls) -> "GtmLut":
        return cls(np.arange(LUT_SIZE, dtype=np.float64))

    def __call__(self, values):
        """Evaluate with linear interpolation at fractional inputs."""
        return lut_interp(self.entries, values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GtmLut):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


@dataclass(frozen=True, eq=False)
class CameraFrame:
    id: str
    image: ImageBuffer
    awb: AwbGains
    gtm: GtmLut

    def __post_init__(self):
        if not isinstance(self.image, ImageBuffer):
            object.__setattr__(self, "image", ImageBuffer(self.image))
        if not isinstance(self.awb, AwbGains):
            object.__setattr__(self, "awb", AwbGains.from_array(self.awb))
        if not isinstance(self.gtm, GtmLut):
            object.__setattr__(self, "gtm", GtmLut(self.gtm))


@dataclass(frozen=True)
class RigConfig:
    """Ordered ring of cameras.

    Camera ``i``'s right edge abuts camera ``i+1``'s left edge, wrapping
    around.  ``overlap_cols[i]`` is the overlap width of pair ``(i, i+1)``.
    An ``int`` is broadcast to every pair.
    """

    cameras: tuple[CameraFrame, ...]
    overlap_cols: tuple[int, ...] = field(default=())

    def __post_init__(self):
        cams = tuple(self.cameras)
        object.__setattr__(self, "cameras", cams)
        ov = self.overlap_cols
        if isinstance(ov, (int, np.integer)):
            ov = (int(ov),) * len(cams)
        elif len(ov) == 0 and cams:
            ov = (max(1, cams[0].image.width // 8),) * len(cams)
        object.__setattr__(self, "overlap_cols", tuple(int(v) for v in ov))

    def __len__(self) -> int:
        return len(self.cameras)

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.cameras]

    def index(self, camera_id: str) -> int:
        return self.ids.index(camera_id)

    def neighbors(self, i: int) -> tuple[int, int]:
        """Return ``(left, right)`` neighbour indices of camera ``i``."""
        n = len(self.cameras)
        return (i - 1) % n, (i + 1) % n


@dataclass(frozen=True)
class HarmonizeConfig:
    enable_awb: bool = True
    enable_gtm: bool = True
    gtm_mode: GtmMode = "compose"
    clamp_output: bool = True

    def __post_init__(self):
        if not (self.enable_awb or self.enable_gtm):
            raise ValidationError("at least one of enable_awb/enable_gtm must be set", "enable_awb")
        if self.gtm_mode not in GTM_MODES:
            raise ValidationError(f"unknown gtm_mode {self.gtm_mode!r}", "gtm_mode")


def validate_lut(lut: GtmLut, name: str = "gtm") -> None:
    e = lut.entries
    if e.shape != (LUT_SIZE,):
        raise BadDimensions(f"{name} must have {LUT_SIZE} entries, got {e.size}", name)
    if not np.all(np.isfinite(e)) or e.min() < 0 or e.max() > 255:
        raise ValidationError(f"{name} entries must lie in [0, 255]", name)
    steps = np.diff(e)
    if np.any(steps < 0):
        k = int(np.argmax(steps < 0))
        raise NonMonotoneLut(
            f"{name} decreases at index {k + 1}: {e[k]:g} -> {e[k + 1]:g}", f"{name}[{k + 1}]"
        )


def validate_awb(awb: AwbGains, name: str = "awb") -> None:
    for ch in ("r", "g", "b"):
        v = getattr(awb, ch)
        if not np.isfinite(v) or v <= 0:
            raise NonPositiveAwbGain(f"{name}.{ch} must be > 0, got {v:g}", f"{name}.{ch}")


def validate_image(image: ImageBuffer, name: str = "image") -> None:
    d = image.data
    if d.ndim != 3 or d.shape[2] != 3:
        raise BadDimensions(f"{name} must have shape (H, W, 3), got {d.shape}", name)
    if d.dtype != np.uint8:
        raise BadDimensions(f"{name} must be uint8, got {d.dtype}", name)
    if image.height < 1 or image.width < 2:
        raise BadDimensions(f"{name} is too small: {image.width}x{image.height}", name)
    if image.width % 2:
        raise BadDimensions(f"{name} width must be even, got {image.width}", f"{name}.width")


def validate_frame(frame: CameraFrame) -> CameraFrame:
    """Check every frame invariant; raise on the first violation.

    Returns the frame unchanged so the call can be chained.
    """
    validate_image(frame.image, f"{frame.id}.image")
    validate_awb(frame.awb, f"{frame.id}.awb")
    validate_lut(frame.gtm, f"{frame.id}.gtm")
    return frame


def validate_rig(rig: RigConfig) -> RigConfig:
    if len(rig.cameras) < 2:
        raise InsufficientCameras(f"a rig needs at least 2 cameras, got {len(rig.cameras)}")
    ids = rig.ids
    if len(set(ids)) != len(ids):
        raise ValidationError(f"camera ids must be unique: {ids}", "id")
    for cam in rig.cameras:
        validate_frame(cam)
    shape = rig.cameras[0].image.shape
    for cam in rig.cameras[1:]:
        if cam.image.shape != shape:
            raise BadDimensions(
                f"camera {cam.id} is {cam.image.shape}, expected {shape}", f"{cam.id}.image"
            )
    width = shape[1]
    if len(rig.overlap_cols) != len(rig.cameras):
        raise BadDimensions(
            f"need one overlap_cols entry per pair ({len(rig.cameras)}), got {len(rig.overlap_cols)}",
            "overlap_cols",
        )
    for i, ov in enumerate(rig.overlap_cols):
        if not 1 <= ov < width / 2:
            raise BadDimensions(f"overlap_cols[{i}]={ov} must be in [1, W/2)", f"overlap_cols[{i}]")
    return rig


def to_uint8(working: np.ndarray) -> np.ndarray:
    """Round half up, then clamp to [0, 255]."""
    return np.clip(np.floor(working + 0.5), 0, 255).astype(np.uint8)
