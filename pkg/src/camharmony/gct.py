"""Patch-based global color transfer, the reference-camera baseline.

Each source camera is matched to a reference camera by transferring the
mean and standard deviation of their shared overlap patches (Reinhard et
al. 2001, "Color transfer between images").  Transfer runs either directly
in RGB or in the decorrelated log-LMS ``l-alpha-beta`` space of that work.
"""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Literal, Mapping

import numpy as np

from .core import HarmonizeError, ImageBuffer, RigConfig, to_uint8, validate_rig
from .pipeline import OVERHEAD_STAGE, HarmonizedRig, StageClock

Space = Literal["rgb", "decorrelated"]
SPACES: tuple[str, ...] = ("rgb", "decorrelated")

STD_EPS = 1e-6
# floor applied to LMS (on a 0-1 scale) before the log
LOG_FLOOR = 1.0 / 255.0

RGB_TO_LMS = np.array(
    [
        [0.3811, 0.5783, 0.0402],
        [0.1967, 0.7244, 0.0782],
        [0.0241, 0.1288, 0.8444],
    ]
)
LMS_TO_RGB = np.linalg.inv(RGB_TO_LMS)
LOGLMS_TO_LAB = np.diag([1 / np.sqrt(3), 1 / np.sqrt(6), 1 / np.sqrt(2)]) @ np.array(
    [[1.0, 1.0, 1.0], [1.0, 1.0, -2.0], [1.0, -1.0, 0.0]]
)
LAB_TO_LOGLMS = np.linalg.inv(LOGLMS_TO_LAB)

# Source camera -> reference camera for the left/front/right/rear ring.
RING_PLAN = {"left": "front", "right": "front", "rear": "right"}


class EmptyRegion(HarmonizeError):
    pass


class RegionOutOfBounds(HarmonizeError):
    pass


class CyclicPlan(HarmonizeError):
    pass


class PlanError(HarmonizeError):
    pass


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """0-255 RGB to decorrelated ``l-alpha-beta``; last axis is the channel."""
    lms = (np.asarray(rgb, dtype=np.float64) / 255.0) @ RGB_TO_LMS.T
    return np.log10(np.maximum(lms, LOG_FLOOR)) @ LOGLMS_TO_LAB.T


def lab_to_rgb(lab: np.ndarray) -> np.ndarray:
    lms = 10.0 ** (np.asarray(lab, dtype=np.float64) @ LAB_TO_LOGLMS.T)
    return (lms @ LMS_TO_RGB.T) * 255.0


def to_space(rgb: np.ndarray, space: Space) -> np.ndarray:
    if space == "rgb":
        return np.asarray(rgb, dtype=np.float64)
    if space == "decorrelated":
        return rgb_to_lab(rgb)
    raise HarmonizeError(f"unknown color space {space!r}")


def from_space(values: np.ndarray, space: Space) -> np.ndarray:
    if space == "rgb":
        return np.asarray(values, dtype=np.float64)
    if space == "decorrelated":
        return lab_to_rgb(values)
    raise HarmonizeError(f"unknown color space {space!r}")


@dataclass(frozen=True)
class Region:
    """Half-open column and row ranges ``[col0, col1) x [row0, row1)``."""

    col0: int
    col1: int
    row0: int = 0
    row1: int | None = None

    def slices(self, height: int, width: int) -> tuple[slice, slice]:
        row1 = height if self.row1 is None else self.row1
        if self.col1 <= self.col0 or row1 <= self.row0:
            raise EmptyRegion(f"region {self} is empty")
        if self.col0 < 0 or self.row0 < 0 or self.col1 > width or row1 > height:
            raise RegionOutOfBounds(f"region {self} exceeds {width}x{height}")
        return slice(self.row0, row1), slice(self.col0, self.col1)


@dataclass(frozen=True)
class ChannelStats:
    mean: np.ndarray
    std: np.ndarray
    space: Space = "rgb"


def patch_stats(image, region: Region, space: Space = "decorrelated") -> ChannelStats:
    """Per-channel mean and population std over ``region``."""
    data = image.data if isinstance(image, ImageBuffer) else np.asarray(image)
    rows, cols = region.slices(data.shape[0], data.shape[1])
    patch = to_space(data[rows, cols].reshape(-1, 3), space)
    return ChannelStats(patch.mean(axis=0), patch.std(axis=0), space)


def color_transfer(image, src: ChannelStats, ref: ChannelStats, space: Space = "decorrelated") -> ImageBuffer:
    """Shift and scale every pixel so ``src`` statistics become ``ref``'s."""
    if src.space != space or ref.space != space:
        raise HarmonizeError(f"stats were computed in {src.space}/{ref.space}, transfer asked for {space}")
    data = image.data if isinstance(image, ImageBuffer) else np.asarray(image)
    values = to_space(data, space)
    scale = ref.std / np.maximum(src.std, STD_EPS)
    values = (values - src.mean) * scale + ref.mean
    return ImageBuffer(to_uint8(np.clip(from_space(values, space), 0.0, 255.0)))


class ReferencePlan(dict):
    """Mapping of source camera id to reference camera id."""

    def order(self) -> list[str]:
        """Sources in dependency order (a reference is processed before its users)."""
        ts = TopologicalSorter({src: [ref] for src, ref in self.items()})
        try:
            return [c for c in ts.static_order() if c in self]
        except CycleError as exc:
            raise CyclicPlan(f"reference plan has a cycle: {exc.args[1]}") from None

    @property
    def roots(self) -> set[str]:
        return {ref for ref in self.values() if ref not in self}


def default_plan(rig: RigConfig) -> ReferencePlan:
    """The left/front/right/rear plan when those ids exist, else a chain from camera 0."""
    ids = rig.ids
    if set(RING_PLAN) | set(RING_PLAN.values()) <= set(ids):
        return ReferencePlan(RING_PLAN)
    return ReferencePlan({ids[i]: ids[i - 1] for i in range(1, len(ids))})


def overlap_regions(rig: RigConfig, src: int, ref: int) -> tuple[Region, Region]:
    """Overlap patches of two adjacent cameras: ``(source patch, reference patch)``."""
    n = len(rig.cameras)
    w = rig.cameras[0].image.width
    if ref == (src + 1) % n:
        ov = rig.overlap_cols[src]
        return Region(w - ov, w), Region(0, ov)
    if src == (ref + 1) % n:
        ov = rig.overlap_cols[ref]
        return Region(0, ov), Region(w - ov, w)
    raise PlanError(f"{rig.ids[src]} and {rig.ids[ref]} are not adjacent")


@dataclass(frozen=True, eq=False)
class GroundProjection:
    """Nearest-neighbour remap standing in for fisheye-to-ground projection.

    The map is a fixed radial warp with the same pixel count as the input.
    """

    index: np.ndarray
    shape: tuple[int, int]

    @classmethod
    def radial(cls, height: int, width: int, k: float = 0.15) -> "GroundProjection":
        yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
        cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
        u = (xx - cx) / max(cx, 1.0)
        v = (yy - cy) / max(cy, 1.0)
        s = 1.0 / (1.0 + k * (u * u + v * v))
        sx = np.clip(np.rint(cx + u * s * cx), 0, width - 1).astype(np.intp)
        sy = np.clip(np.rint(cy + v * s * cy), 0, height - 1).astype(np.intp)
        return cls((sy * width + sx).ravel(), (height, width))

    def __call__(self, data: np.ndarray) -> np.ndarray:
        h, w = self.shape
        return data.reshape(h * w, -1)[self.index].reshape(h, w, -1)


def run_gct_rig(
    rig: RigConfig,
    plan: Mapping[str, str] | None = None,
    space: Space = "decorrelated",
    projection: GroundProjection | None = None,
    timings: dict[str, float] | None = None,
) -> HarmonizedRig:
    """Color-transfer every planned source camera onto its reference.

    Sources are processed in dependency order, so a reference that is itself
    a source contributes its already-transferred image.  With a
    ``projection``, patch statistics come from projected images; each image
    is projected once and reprojected only after it has been transferred.
    ``timings`` (if given) accumulates seconds per stage.
    """
    clock = StageClock(timings)
    with clock(OVERHEAD_STAGE):
        validate_rig(rig)
        plan = ReferencePlan(plan if plan is not None else default_plan(rig))
        ids = rig.ids
        for src, ref in plan.items():
            if src not in ids or ref not in ids:
                raise PlanError(f"plan entry {src} -> {ref} names an unknown camera")
        order = plan.order()
    out = {c.id: c.image.data for c in rig.cameras}
    projected: dict[str, np.ndarray] = {}

    def view(cid: str) -> np.ndarray:
        if projection is None:
            return out[cid]
        if cid not in projected:
            with clock("project to ground"):
                projected[cid] = projection(out[cid])
        return projected[cid]

    report = {"method": "gct", "space": space, "plan": dict(plan), "order": order, "transfers": []}
    for src in order:
        ref = plan[src]
        src_region, ref_region = overlap_regions(rig, ids.index(src), ids.index(ref))
        src_view, ref_view = view(src), view(ref)
        with clock("compute color statistics"):
            s = patch_stats(src_view, src_region, space)
            r = patch_stats(ref_view, ref_region, space)
        with clock("apply global transfer"):
            out[src] = color_transfer(out[src], s, r, space).data
        projected.pop(src, None)
        report["transfers"].append(
            {
                "source": src,
                "reference": ref,
                "src_mean": s.mean.tolist(),
                "src_std": s.std.tolist(),
                "ref_mean": r.mean.tolist(),
                "ref_std": r.std.tolist(),
            }
        )
    with clock(OVERHEAD_STAGE):
        frames = tuple(ImageBuffer(out[i]) for i in ids)
        working = tuple(f.as_float() for f in frames)
    return HarmonizedRig(rig, frames, working, report)

