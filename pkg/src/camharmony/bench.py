"""Runtime comparison of the metadata path and the patch-based GCT path."""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass, field

import numpy as np

from .core import HarmonizeConfig, RigConfig, validate_rig
from .gct import GroundProjection, Space, default_plan, run_gct_rig
from .pipeline import OVERHEAD_STAGE, harmonize_rig

METHODS = ("metadata", "gct")
STAGES = {
    "metadata": ("pair parameters", "apply logistic curve", OVERHEAD_STAGE),
    "gct": ("project to ground", "compute color statistics", "apply global transfer", OVERHEAD_STAGE),
}
# ratio above this means the metadata path has lost most of its advantage
RATIO_WARN = 0.9


@dataclass
class BenchResult:
    """Median wall time per frame set, in milliseconds."""

    repetitions: int
    cameras: int
    shape: tuple[int, int]
    space: str
    stages: dict[str, dict[str, float]] = field(default_factory=dict)
    totals: dict[str, float] = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return self.totals["metadata"] / self.totals["gct"]

    @property
    def flagged(self) -> bool:
        return self.ratio > RATIO_WARN

    def rows(self) -> list[tuple[str, str, float]]:
        out = []
        for method in METHODS:
            for stage, ms in self.stages[method].items():
                out.append((method, stage, ms))
            out.append((method, "total", self.totals[method]))
        return out

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "cameras": self.cameras,
            "height": self.shape[0],
            "width": self.shape[1],
            "space": self.space,
            "stages_ms": self.stages,
            "totals_ms": self.totals,
            "ratio": self.ratio,
            "flagged": self.flagged,
        }


def bench(
    rig: RigConfig,
    repetitions: int = 20,
    space: Space = "decorrelated",
    warmup: int = 2,
    cfg: HarmonizeConfig | None = None,
) -> BenchResult:
    """Time both methods on the same rig; medians over ``repetitions`` runs.

    Runs are sequential and interleaved (metadata, gct, metadata, ...) so
    drift in machine load hits both methods alike.
    """
    if repetitions < 10:
        raise ValueError(f"repetitions must be >= 10, got {repetitions}")
    validate_rig(rig)
    cfg = cfg or HarmonizeConfig()
    h, w = rig.cameras[0].image.height, rig.cameras[0].image.width
    projection = GroundProjection.radial(h, w)
    plan = default_plan(rig)

    def run(method: str, sink: dict[str, float]) -> None:
        if method == "metadata":
            harmonize_rig(rig, cfg, timings=sink)
        else:
            run_gct_rig(rig, plan, space, projection, timings=sink)

    for _ in range(warmup):
        for method in METHODS:
            run(method, {})

    samples: dict[str, list[dict[str, float]]] = {m: [] for m in METHODS}
    gc_was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        for _ in range(repetitions):
            for method in METHODS:
                sink: dict[str, float] = {}
                t0 = time.perf_counter()
                run(method, sink)
                sink["total"] = time.perf_counter() - t0
                samples[method].append(sink)
    finally:
        if gc_was_enabled:
            gc.enable()

    result = BenchResult(repetitions, len(rig.cameras), (h, w), space)
    for method in METHODS:
        runs = samples[method]
        result.stages[method] = {
            stage: 1e3 * float(np.median([r.get(stage, 0.0) for r in runs])) for stage in STAGES[method]
        }
        result.totals[method] = 1e3 * float(np.median([r["total"] for r in runs]))
    return result
