"""Deterministic synthetic camera rings with known ground truth.

A seamless panorama ("scene") wraps around the ring.  Camera ``i`` sees the
window starting at column ``i * (W - overlap)``, so adjacent cameras share
``overlap`` columns of identical content.  Each camera then applies its own
white balance gains and tone curve, and those exact parameters become its
metadata.

Value noise
-----------
``textured-noise`` content is a sum of four octaves of lattice value noise
with cell sizes 64, 32, 16, 8 px and amplitudes 0.4, 0.3, 0.2, 0.1.  Lattice
values are uniform [0, 1) draws from numpy's PCG64 seeded by the content
stream; interpolation is bilinear with smoothstep ``3t^2 - 2t^3``.  The
lattice wraps horizontally so the panorama closes on itself.  A luminance
octave stack is shared by all channels (weight 0.7) and each channel adds
its own stack (weight 0.3).  The result is mapped to [SCENE_LO, SCENE_HI].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .core import AwbGains, CameraFrame, GtmLut, HarmonizeError, ImageBuffer, LUT_SIZE, RigConfig, to_uint8

Content = Literal["gradient", "textured-noise", "object-disparity"]
Distortion = Literal["none", "awb", "gtm", "mixed"]
CONTENTS: tuple[str, ...] = ("gradient", "textured-noise", "object-disparity")
DISTORTIONS: tuple[str, ...] = ("none", "awb", "gtm", "mixed")

SCENE_LO = 40.0
SCENE_HI = 180.0
NOISE_CELLS = (64, 32, 16, 8)
NOISE_AMPS = (0.4, 0.3, 0.2, 0.1)

# Random distortion draws.  R and B gains are relative to G = 1.
AWB_RANGE = (0.8, 1.25)
GAMMA_RANGE = (0.5, 2.0)
SHOULDER_RANGE = (0.0, 1.0)
# Adjacent cameras are redrawn until they differ by at least this much.
MIN_LOG_GAMMA_STEP = 0.35
MIN_LOG_AWB_STEP = 0.12
MAX_DRAWS = 10_000

RING_IDS = ("left", "front", "right", "rear")


class BadSpec(HarmonizeError):
    pass


@dataclass(frozen=True)
class CameraDistortion:
    awb: AwbGains
    gtm: GtmLut


@dataclass(frozen=True)
class SceneSpec:
    """Recipe for a synthetic rig.

    ``distortions`` pins each camera's AWB and tone curve explicitly; when it
    is ``None`` they are drawn from ``seed`` according to ``distortion``.
    ``overlap_cols`` defaults to 12.5% of ``width``.
    """

    seed: int = 0
    width: int = 512
    height: int = 256
    cameras: int = 4
    overlap_cols: int | None = None
    content: Content = "textured-noise"
    distortion: Distortion = "mixed"
    distortions: tuple[CameraDistortion, ...] | None = None
    shoulder: bool = False
    ids: tuple[str, ...] | None = field(default=None)

    @property
    def overlap(self) -> int:
        return self.overlap_cols if self.overlap_cols is not None else max(1, self.width // 8)

    @property
    def camera_ids(self) -> tuple[str, ...]:
        if self.ids is not None:
            return tuple(self.ids)
        if self.cameras == 4:
            return RING_IDS
        return tuple(f"cam{i}" for i in range(self.cameras))

    @property
    def panorama_width(self) -> int:
        return self.cameras * (self.width - self.overlap)

    def validate(self) -> "SceneSpec":
        if self.cameras < 2:
            raise BadSpec(f"need at least 2 cameras, got {self.cameras}")
        if self.width < 4 or self.width % 2:
            raise BadSpec(f"width must be even and >= 4, got {self.width}")
        if self.height < 1:
            raise BadSpec(f"height must be >= 1, got {self.height}")
        if not 1 <= self.overlap < self.width / 2:
            raise BadSpec(f"overlap_cols must be in [1, W/2), got {self.overlap}")
        if self.content not in CONTENTS:
            raise BadSpec(f"content must be one of {CONTENTS}, got {self.content!r}")
        if self.distortion not in DISTORTIONS:
            raise BadSpec(f"distortion must be one of {DISTORTIONS}, got {self.distortion!r}")
        if self.distortions is not None and len(self.distortions) != self.cameras:
            raise BadSpec(f"{len(self.distortions)} distortions given for {self.cameras} cameras")
        if len(set(self.camera_ids)) != self.cameras:
            raise BadSpec(f"need {self.cameras} unique camera ids, got {self.camera_ids}")
        return self


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    """A generated rig plus the ground truth behind it."""

    spec: SceneSpec
    rig: RigConfig
    panorama: np.ndarray
    windows: tuple[np.ndarray, ...]
    distortions: tuple[CameraDistortion, ...]


def gamma_lut(gamma: float, shoulder: float = 0.0) -> GtmLut:
    """``255 * t**gamma`` with an optional highlight roll-off, sampled at 256 points."""
    t = np.arange(LUT_SIZE, dtype=np.float64) / (LUT_SIZE - 1)
    y = t**gamma
    if shoulder > 0:
        y = y * (1.0 + shoulder) / (1.0 + shoulder * y)
    return GtmLut(255.0 * y)


def _streams(seed: int) -> tuple[np.random.Generator, ...]:
    # content / distortion / objects drawn independently so one can change alone
    return tuple(np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))


def _smoothstep(t: np.ndarray) -> np.ndarray:
    return t * t * (3.0 - 2.0 * t)


def _octave(rng: np.random.Generator, height: int, width: int, cell: int) -> np.ndarray:
    nx = max(1, -(-width // cell))
    ny = -(-height // cell) + 1
    lattice = rng.random((ny, nx))
    x = np.arange(width) * (nx / width)
    y = np.arange(height) / cell
    x0 = np.floor(x).astype(int)
    y0 = np.floor(y).astype(int)
    tx = _smoothstep(x - x0)[None, :]
    ty = _smoothstep(y - y0)[:, None]
    x1 = (x0 + 1) % nx
    x0 = x0 % nx
    y1 = np.minimum(y0 + 1, ny - 1)
    a = lattice[y0][:, x0]
    b = lattice[y0][:, x1]
    c = lattice[y1][:, x0]
    d = lattice[y1][:, x1]
    top = a + (b - a) * tx
    bottom = c + (d - c) * tx
    return top + (bottom - top) * ty


def value_noise(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Horizontally periodic fractal value noise on [0, 1], shape ``(H, W)``."""
    total = np.zeros((height, width))
    for cell, amp in zip(NOISE_CELLS, NOISE_AMPS):
        total += amp * _octave(rng, height, width, cell)
    return total / sum(NOISE_AMPS)


def _panorama(spec: SceneSpec, rng: np.random.Generator) -> np.ndarray:
    h, pw = spec.height, spec.panorama_width
    if spec.content == "gradient":
        phase = rng.uniform(0, 2 * np.pi, 3)
        x = np.arange(pw)[None, :, None] / pw * 2 * np.pi
        y = np.arange(h)[:, None, None] / max(h - 1, 1)
        unit = 0.5 + 0.5 * np.sin(x + phase[None, None, :])
        unit = unit * (0.7 + 0.3 * y)
    else:
        lum = value_noise(rng, h, pw)
        unit = np.stack([0.7 * lum + 0.3 * value_noise(rng, h, pw) for _ in range(3)], axis=-1)
    return SCENE_LO + (SCENE_HI - SCENE_LO) * unit


def _window_columns(spec: SceneSpec, i: int) -> np.ndarray:
    step = spec.width - spec.overlap
    return (np.arange(spec.width) + i * step) % spec.panorama_width


def _add_objects(spec: SceneSpec, windows: list[np.ndarray], rng: np.random.Generator) -> None:
    """Paint a distinct object into each camera's overlap bands.

    Adjacent cameras see different objects in the same overlap, as happens
    with parallax between widely separated cameras.
    """
    ov, w, h = spec.overlap, spec.width, spec.height
    oh = max(1, h // 3)
    for i, win in enumerate(windows):
        for band in (slice(0, ov), slice(w - ov, w)):
            row = int(rng.integers(0, max(1, h - oh + 1)))
            color = rng.uniform(SCENE_LO, SCENE_HI, 3)
            # saturate one channel so the object clearly differs from the backdrop
            color[int(rng.integers(0, 3))] = SCENE_HI
            color[int(rng.integers(0, 3))] = SCENE_LO
            win[row : row + oh, band, :] = color


def _draw_distortions(spec: SceneSpec, rng: np.random.Generator) -> tuple[CameraDistortion, ...]:
    n = spec.cameras
    use_awb = spec.distortion in ("awb", "mixed")
    use_gtm = spec.distortion in ("gtm", "mixed")
    for _ in range(MAX_DRAWS):
        awb = np.ones((n, 3))
        if use_awb:
            awb[:, 0] = rng.uniform(*AWB_RANGE, n)
            awb[:, 2] = rng.uniform(*AWB_RANGE, n)
        gammas = np.exp(rng.uniform(np.log(GAMMA_RANGE[0]), np.log(GAMMA_RANGE[1]), n)) if use_gtm else np.ones(n)
        shoulders = rng.uniform(*SHOULDER_RANGE, n) if (use_gtm and spec.shoulder) else np.zeros(n)
        nxt = np.roll(np.arange(n), -1)
        ok = True
        if use_awb:
            ok &= bool(np.all(np.max(np.abs(np.log(awb / awb[nxt])), axis=1) >= MIN_LOG_AWB_STEP))
        if use_gtm:
            ok &= bool(np.all(np.abs(np.log(gammas / gammas[nxt])) >= MIN_LOG_GAMMA_STEP))
        if ok:
            return tuple(
                CameraDistortion(
                    AwbGains.from_array(awb[i]),
                    GtmLut.identity() if not use_gtm else gamma_lut(gammas[i], shoulders[i]),
                )
                for i in range(n)
            )
    raise BadSpec(f"could not draw separated distortions for {n} cameras")


def render_camera(scene: np.ndarray, distortion: CameraDistortion) -> np.ndarray:
    """White balance, then tone curve, then 8-bit quantization."""
    lin = scene * distortion.awb.as_array()
    return to_uint8(distortion.gtm(np.clip(lin, 0.0, 255.0)))


def generate_scene(spec: SceneSpec) -> SyntheticScene:
    spec.validate()
    content_rng, distortion_rng, object_rng = _streams(spec.seed)
    pano = _panorama(spec, content_rng)
    windows = [pano[:, _window_columns(spec, i), :].copy() for i in range(spec.cameras)]
    if spec.content == "object-disparity":
        _add_objects(spec, windows, object_rng)
    if spec.distortions is not None:
        distortions = tuple(spec.distortions)
    elif spec.distortion == "none":
        distortions = tuple(CameraDistortion(AwbGains(1, 1, 1), GtmLut.identity()) for _ in range(spec.cameras))
    else:
        distortions = _draw_distortions(spec, distortion_rng)
    cams = tuple(
        CameraFrame(cid, ImageBuffer(render_camera(win, d)), d.awb, d.gtm)
        for cid, win, d in zip(spec.camera_ids, windows, distortions)
    )
    rig = RigConfig(cams, (spec.overlap,) * spec.cameras)
    return SyntheticScene(spec, rig, pano, tuple(windows), distortions)


def generate_rig(spec: SceneSpec) -> RigConfig:
    return generate_scene(spec).rig


def distortions_from(awbs: Sequence[Sequence[float]], luts: Sequence[GtmLut]) -> tuple[CameraDistortion, ...]:
    return tuple(CameraDistortion(AwbGains.from_array(a), lut) for a, lut in zip(awbs, luts))
