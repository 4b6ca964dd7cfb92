"""Harmonize a whole camera ring: AWB stage, then GTM stage, per half."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .awb import BoundaryGains, apply_awb_half, awb_boundary_gains, awb_gain_profile
from .blend import blend_weights
from .core import (
    LUT_SIZE,
    CameraFrame,
    DimensionMismatch,
    HarmonizeConfig,
    ImageBuffer,
    RigConfig,
    to_uint8,
    validate_frame,
    validate_rig,
)
from .gtm import CorrectionLut, apply_gtm_half, average_lut, boundary_correction_lut

REPORT_SAMPLES = 16
# validation and bookkeeping outside the numeric stages
OVERHEAD_STAGE = "validate and report"


@dataclass(frozen=True)
class SideParams:
    """Everything needed to harmonize one half of one camera."""

    neighbor: str
    awb: BoundaryGains
    corr: CorrectionLut


@dataclass(frozen=True)
class HarmonizedRig:
    """Harmonized output of a rig.

    ``frames`` are the rounded 8-bit images.  ``working`` holds the same
    images before rounding, in float64.
    """

    source: RigConfig
    frames: tuple[ImageBuffer, ...]
    working: tuple[np.ndarray, ...]
    report: dict = field(default_factory=dict)

    @property
    def ids(self) -> list[str]:
        return self.source.ids

    def as_rig(self) -> RigConfig:
        """The harmonized images packaged with the source metadata."""
        cams = tuple(
            CameraFrame(c.id, img, c.awb, c.gtm) for c, img in zip(self.source.cameras, self.frames)
        )
        return RigConfig(cams, self.source.overlap_cols)


def pair_params(frame1: CameraFrame, frame2: CameraFrame, cfg: HarmonizeConfig) -> tuple[SideParams, SideParams]:
    """Boundary parameters for a pair where frame1's right edge meets frame2's left edge.

    Returns ``(params for frame1's right half, params for frame2's left half)``.
    Disabled stages get unit gains or identity corrections.
    """
    if cfg.enable_awb:
        g1, g2 = awb_boundary_gains(frame1.awb, frame2.awb)
    else:
        g1 = g2 = BoundaryGains(1.0, 1.0, 1.0)
    if cfg.enable_gtm:
        avg = average_lut(frame1.gtm, frame2.gtm)
        c1 = boundary_correction_lut(frame1.gtm, avg, cfg.gtm_mode)
        c2 = boundary_correction_lut(frame2.gtm, avg, cfg.gtm_mode)
    else:
        c1 = c2 = CorrectionLut.identity(cfg.gtm_mode)
    return SideParams(frame2.id, g1, c1), SideParams(frame1.id, g2, c2)


def _apply_half(work: np.ndarray, side: str, params: SideParams, cfg: HarmonizeConfig) -> np.ndarray:
    """AWB then GTM on one half of ``work``."""
    weights = blend_weights(work.shape[1], side)
    if cfg.enable_awb:
        work = apply_awb_half(work, side, params.awb, weights)
    if cfg.enable_gtm:
        work = apply_gtm_half(work, side, params.corr, weights)
    return work


def harmonize_camera(image, left: SideParams, right: SideParams, cfg: HarmonizeConfig) -> np.ndarray:
    """Harmonize one camera given the parameters for both of its halves.

    Both halves are processed in one full-width pass.  Per pixel the
    arithmetic is the same as running the AWB and GTM half operations in
    turn, so the result is identical.  Returns a new float64 array.
    """
    work = image.as_float() if isinstance(image, ImageBuffer) else np.array(image, dtype=np.float64)
    if work.ndim != 3 or work.shape[2] != 3 or work.shape[1] % 2 or work.shape[1] < 4:
        raise DimensionMismatch(f"expected an (H, even W >= 4, 3) image, got {work.shape}")
    width = work.shape[1]
    bl, br = blend_weights(width, "left"), blend_weights(width, "right")
    if cfg.enable_awb:
        gains = np.concatenate([awb_gain_profile(left.awb, bl), awb_gain_profile(right.awb, br)])
        work *= gains[None, :, :]
    if cfg.enable_gtm and not (left.corr.is_identity and right.corr.is_identity):
        # identity halves get weight 0 so they pass through untouched
        w = np.concatenate([
            bl.weights if not left.corr.is_identity else np.zeros_like(bl.weights),
            br.weights if not right.corr.is_identity else np.zeros_like(br.weights),
        ])[None, :, None]
        offset = np.repeat(np.array([0, LUT_SIZE], dtype=np.intp), width // 2)[None, :, None]
        target = _stacked_lut_interp(left.corr.entries, right.corr.entries, work, offset)
        target *= w
        work *= 1.0 - w
        work += target
    return work


def _stacked_lut_interp(lut_a: np.ndarray, lut_b: np.ndarray, values: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """``lut_interp`` with a per-column choice of LUT (offset 0 -> a, 256 -> b)."""
    table = np.concatenate([lut_a, lut_b])
    slope = np.zeros(2 * LUT_SIZE)
    slope[: LUT_SIZE - 1] = np.diff(lut_a)
    slope[LUT_SIZE : 2 * LUT_SIZE - 1] = np.diff(lut_b)
    frac = np.clip(values, 0.0, LUT_SIZE - 1.0)
    idx = frac.astype(np.intp)
    frac -= idx
    idx += offset
    step = slope[idx]
    step *= frac
    out = table[idx]
    out += step
    return out


def harmonize_camera_by_halves(image, left: SideParams, right: SideParams, cfg: HarmonizeConfig) -> np.ndarray:
    """Reference composition of the public half operations (slower)."""
    work = image.as_float() if isinstance(image, ImageBuffer) else np.array(image, dtype=np.float64)
    for side, params in (("left", left), ("right", right)):
        weights = blend_weights(work.shape[1], side)
        if cfg.enable_awb:
            work = apply_awb_half(work, side, params.awb, weights)
        if cfg.enable_gtm:
            work = apply_gtm_half(work, side, params.corr, weights)
    return work


def harmonize_pair(frame1: CameraFrame, frame2: CameraFrame, cfg: HarmonizeConfig | None = None):
    """Harmonize the shared seam of two cameras.

    Returns ``(frame1's right half, frame2's left half)`` as float64 working
    arrays of shape ``(H, W/2, 3)``.
    """
    cfg = cfg or HarmonizeConfig()
    validate_frame(frame1)
    validate_frame(frame2)
    if frame1.image.shape != frame2.image.shape:
        raise DimensionMismatch(f"{frame1.id} is {frame1.image.shape}, {frame2.id} is {frame2.image.shape}")
    p1, p2 = pair_params(frame1, frame2, cfg)
    w = frame1.image.width
    right = _apply_half(frame1.image.as_float(), "right", p1, cfg)[:, w // 2 :]
    left = _apply_half(frame2.image.as_float(), "left", p2, cfg)[:, : w // 2]
    return right, left


def rig_params(rig: RigConfig, cfg: HarmonizeConfig) -> list[tuple[SideParams, SideParams]]:
    """Per-camera ``(left, right)`` side parameters for a validated rig."""
    n = len(rig.cameras)
    pairs = [pair_params(rig.cameras[i], rig.cameras[(i + 1) % n], cfg) for i in range(n)]
    # camera i is "camera 1" of pair i and "camera 2" of pair i-1
    return [(pairs[(i - 1) % n][1], pairs[i][0]) for i in range(n)]


def harmonize_rig(
    rig: RigConfig,
    cfg: HarmonizeConfig | None = None,
    images: Sequence[np.ndarray] | None = None,
    timings: dict[str, float] | None = None,
) -> HarmonizedRig:
    """Harmonize every camera of the ring against both neighbours.

    ``images`` optionally replaces the rig's 8-bit images with float working
    images (same order and shape), e.g. to chain passes without rounding.
    ``timings`` (if given) accumulates seconds per stage.
    """
    cfg = cfg or HarmonizeConfig()
    clock = StageClock(timings)
    with clock(OVERHEAD_STAGE):
        _check_inputs(rig, images)
    with clock("pair parameters"):
        params = rig_params(rig, cfg)
    working, frames = [], []
    with clock("apply logistic curve"):
        for i, cam in enumerate(rig.cameras):
            src = cam.image if images is None else images[i]
            left, right = params[i]
            work = harmonize_camera(src, left, right, cfg)
            if cfg.clamp_output:
                np.clip(work, 0.0, 255.0, out=work)
            working.append(work)
            frames.append(ImageBuffer(to_uint8(work)))
    with clock(OVERHEAD_STAGE):
        report = gain_report(rig, params, cfg)
    return HarmonizedRig(rig, tuple(frames), tuple(working), report)


def _check_inputs(rig: RigConfig, images) -> None:
    validate_rig(rig)
    if images is not None:
        if len(images) != len(rig.cameras):
            raise DimensionMismatch(f"got {len(images)} working images for {len(rig.cameras)} cameras")
        for i, (img, cam) in enumerate(zip(images, rig.cameras)):
            if np.shape(img) != cam.image.shape:
                raise DimensionMismatch(f"working image {i} is {np.shape(img)}, expected {cam.image.shape}")


class StageClock:
    """Accumulates wall time per named stage into ``sink``; no-op when ``sink`` is None."""

    def __init__(self, sink: dict[str, float] | None):
        self.sink = sink

    @contextmanager
    def __call__(self, stage: str):
        if self.sink is None:
            yield
            return
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.sink[stage] = self.sink.get(stage, 0.0) + time.perf_counter() - t0


def _sample_columns(start: int, stop: int, n: int = REPORT_SAMPLES) -> np.ndarray:
    return np.unique(np.round(np.linspace(start, stop - 1, n)).astype(int))


def _side_report(width: int, side: str, params: SideParams, cfg: HarmonizeConfig) -> dict:
    weights = blend_weights(width, side)
    cols = _sample_columns(weights.start, weights.stop)
    idx = cols - weights.start
    awb_profile = awb_gain_profile(params.awb, weights)[idx] if cfg.enable_awb else np.ones((idx.size, 3))
    corr = params.corr.entries
    mid = 128.0
    gtm_mid = (1.0 - weights.weights[idx]) + weights.weights[idx] * (params.corr(mid) / mid)
    return {
        "neighbor": params.neighbor,
        "awb_boundary_gain": [params.awb.r, params.awb.g, params.awb.b],
        "correction": {
            "mode": params.corr.mode,
            "identity": params.corr.is_identity,
            "max_abs_shift": float(np.max(np.abs(corr - np.arange(corr.size)))),
            "samples": {str(v): float(corr[v]) for v in range(0, 256, 32)} | {"255": float(corr[255])},
        },
        "columns": cols.tolist(),
        "weight": weights.weights[idx].round(6).tolist(),
        "awb_gain": np.round(awb_profile, 6).tolist(),
        "gtm_gain_at_128": np.round(gtm_mid, 6).tolist() if cfg.enable_gtm else [1.0] * idx.size,
    }


def gain_report(rig: RigConfig, params, cfg: HarmonizeConfig) -> dict:
    width = rig.cameras[0].image.width
    return {
        "config": {
            "enable_awb": cfg.enable_awb,
            "enable_gtm": cfg.enable_gtm,
            "gtm_mode": cfg.gtm_mode,
        },
        "cameras": [
            {
                "id": cam.id,
                "left": _side_report(width, "left", left, cfg),
                "right": _side_report(width, "right", right, cfg),
            }
            for cam, (left, right) in zip(rig.cameras, params)
        ],
    }
