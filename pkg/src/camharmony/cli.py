"""Command line entry point: ``camharmony <command> ...``.

Exit codes: 0 success, 1 validation or schema problem, 2 I/O problem.
Commands that take a rig directory also accept a directory of numbered
rig directories (a frame sequence) and process each one in turn.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from .bench import bench
from .core import AwbGains, GtmLut, HarmonizeConfig
from .gct import SPACES, GroundProjection, ReferencePlan, default_plan, run_gct_rig
from .metrics import seam_report
from .pipeline import harmonize_rig
from .rigio import IMAGE_FORMATS, MissingFile, RigIOError, SchemaError, is_rig_dir, read_rig, write_image, write_rig
from .synth import CONTENTS, DISTORTIONS, BadSpec, CameraDistortion, SceneSpec, gamma_lut, generate_rig, generate_scene

log = logging.getLogger("camharmony")

SEAM_MARKER = np.array([255, 0, 255], dtype=np.uint8)


def rig_dirs(path) -> list[tuple[str, Path]]:
    """``[("", path)]`` for a rig directory, or one entry per numbered sub-rig."""
    root = Path(path)
    if is_rig_dir(root):
        return [("", root)]
    if root.is_dir():
        subs = sorted(p for p in root.iterdir() if p.is_dir() and is_rig_dir(p))
        if subs:
            return [(p.name, p) for p in subs]
    raise MissingFile(f"{root} is neither a rig directory nor a sequence of rig directories")


# -- scene specs -----------------------------------------------------------

def _distortion_from(obj: dict, i: int) -> CameraDistortion:
    if not isinstance(obj, dict) or "awb" not in obj:
        raise SchemaError(f"distortions[{i}] needs an 'awb' triple", f"distortions[{i}]")
    unknown = set(obj) - {"awb", "gamma", "shoulder", "gtm"}
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)}", f"distortions[{i}]")
    if "gtm" in obj:
        lut = GtmLut(obj["gtm"])
    else:
        lut = gamma_lut(float(obj.get("gamma", 1.0)), float(obj.get("shoulder", 0.0)))
    return CameraDistortion(AwbGains.from_array(obj["awb"]), lut)


def load_scene_config(path) -> dict:
    """Read a scene config file: a JSON object with SceneSpec field names."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}", path=path) from None
    if not isinstance(obj, dict):
        raise SchemaError("scene config must be a JSON object", path=path)
    known = {f.name for f in fields(SceneSpec)}
    unknown = set(obj) - known
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)}", sorted(unknown)[0], path)
    if obj.get("distortions") is not None:
        obj["distortions"] = tuple(_distortion_from(d, i) for i, d in enumerate(obj["distortions"]))
    if obj.get("ids") is not None:
        obj["ids"] = tuple(obj["ids"])
    return obj


def scene_spec(args) -> SceneSpec:
    values = load_scene_config(args.config) if args.config else {}
    for name in ("seed", "cameras", "width", "height", "overlap_cols", "content", "distortion"):
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    if args.shoulder:
        values["shoulder"] = True
    try:
        return SceneSpec(**values).validate()
    except TypeError as exc:
        raise BadSpec(str(exc)) from None


# -- commands --------------------------------------------------------------

def cmd_synth(args) -> int:
    spec = scene_spec(args)
    out = Path(args.out)
    if args.frames < 1:
        raise BadSpec(f"--frames must be >= 1, got {args.frames}")
    if args.frames == 1:
        write_rig(generate_rig(spec), out, args.format)
        print(f"wrote {spec.cameras} cameras to {out}")
        return 0
    # every frame keeps the cameras of the first one; only the content moves
    spec = replace(spec, distortions=generate_scene(spec).distortions)
    for k in range(args.frames):
        frame_spec = replace(spec, seed=spec.seed + k)
        write_rig(generate_rig(frame_spec), out / f"{k:04d}", args.format)
    print(f"wrote {args.frames} frames of {spec.cameras} cameras to {out}")
    return 0


def harmonize_config(args) -> HarmonizeConfig:
    return HarmonizeConfig(
        enable_awb=not args.gtm_only,
        enable_gtm=not args.awb_only,
        gtm_mode=args.gtm_mode,
    )


def cmd_harmonize(args) -> int:
    cfg = harmonize_config(args)
    dirs = rig_dirs(args.rig)
    for name, src in dirs:
        write_rig(harmonize_rig(read_rig(src), cfg), Path(args.out) / name, args.format)
    print(f"harmonized {len(dirs)} rig(s) into {args.out}")
    return 0


def parse_plan(text: str) -> ReferencePlan:
    """``"left=front,right=front,rear=right"`` -> source/reference mapping."""
    plan = ReferencePlan()
    for item in filter(None, (s.strip() for s in text.split(","))):
        src, sep, ref = item.partition("=")
        if not sep or not src or not ref:
            raise SchemaError(f"plan entry {item!r} is not source=reference", "plan")
        plan[src.strip()] = ref.strip()
    return plan


def cmd_gct(args) -> int:
    for name, src in rig_dirs(args.rig):
        rig = read_rig(src)
        plan = parse_plan(args.plan) if args.plan else default_plan(rig)
        h, w = rig.cameras[0].image.height, rig.cameras[0].image.width
        out = run_gct_rig(rig, plan, args.space, GroundProjection.radial(h, w))
        write_rig(out, Path(args.out) / name, args.format)
    print(f"transferred into {args.out}")
    return 0


def cmd_eval(args) -> int:
    before, after = rig_dirs(args.before), rig_dirs(args.after)
    if [n for n, _ in before] != [n for n, _ in after]:
        raise MissingFile(f"{args.before} and {args.after} hold different frame sets")
    results = []
    for (name, b), (_, a) in zip(before, after):
        rig_b, rig_a = read_rig(b), read_rig(a)
        if rig_b.ids != rig_a.ids:
            raise SchemaError(f"camera order differs: {rig_b.ids} vs {rig_a.ids}", "cameras")
        report = seam_report(rig_b, rig_a)
        results.append((name, report))
        if args.plot_dir:
            from . import plotting

            stem = Path(args.plot_dir) / (name or ".")
            plotting.plot_seams(report, stem / "seams.png")
            plotting.plot_gain_profiles(rig_b, rig_a, stem / "gains.png")
    if args.json:
        payload = {name or "rig": r.to_dict() for name, r in results}
        print(json.dumps(payload, indent=1))
        return 0
    print("frame\tpair\toverlap_cols\tpre\tpost\treduction")
    for name, report in results:
        for row in report.rows():
            print(f"{name or '-'}\t{row['pair']}\t{row['overlap_cols']}\t{row['pre']:.4f}\t{row['post']:.4f}\t{row['reduction']:.4f}")
        print(f"{name or '-'}\tmean\t\t\t\t{report.mean_reduction:.4f}")
    return 0


def cmd_bench(args) -> int:
    (_, path), *_ = rig_dirs(args.rig)
    result = bench(read_rig(path), args.repetitions, args.space)
    if args.plot:
        from . import plotting

        plotting.plot_bench(result, args.plot)
    if args.json:
        print(json.dumps(result.to_dict(), indent=1))
    else:
        print("method\tstage\tms")
        for method, stage, ms in result.rows():
            print(f"{method}\t{stage}\t{ms:.3f}")
        print(f"ratio\tmetadata/gct\t{result.ratio:.3f}")
    if result.flagged:
        log.warning("metadata path is %.0f%% of the gct path, above the %.0f%% mark", 100 * result.ratio, 90)
    return 0


def strip_image(rig) -> np.ndarray:
    """Cameras side by side in ring order, a 1-pixel marker column at each seam."""
    h = rig.cameras[0].image.height
    marker = np.broadcast_to(SEAM_MARKER, (h, 1, 3))
    parts = []
    for i, cam in enumerate(rig.cameras):
        if i:
            parts.append(marker)
        parts.append(cam.image.data)
    return np.concatenate(parts, axis=1)


def cmd_strip(args) -> int:
    rows = [strip_image(read_rig(path)) for d in args.rigs for _, path in rig_dirs(d)]
    widths = {r.shape[1] for r in rows}
    if len(widths) != 1:
        raise SchemaError(f"rigs have different strip widths {sorted(widths)}", "width")
    write_image(args.output, np.concatenate(rows, axis=0))
    print(f"wrote {args.output}")
    return 0


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="camharmony", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("synth", help="generate a synthetic rig directory")
    s.add_argument("out")
    s.add_argument("--config", help="JSON scene config; flags override its fields")
    s.add_argument("--seed", type=int)
    s.add_argument("--cameras", type=int)
    s.add_argument("--width", type=int)
    s.add_argument("--height", type=int)
    s.add_argument("--overlap-cols", type=int)
    s.add_argument("--content", choices=CONTENTS)
    s.add_argument("--distortion", choices=DISTORTIONS)
    s.add_argument("--shoulder", action="store_true", help="add a highlight roll-off to tone curves")
    s.add_argument("--frames", type=int, default=1, help="write a sequence of numbered rigs")
    s.add_argument("--format", choices=IMAGE_FORMATS, default="png")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("harmonize", help="harmonize a rig using its metadata")
    s.add_argument("rig")
    s.add_argument("out")
    stage = s.add_mutually_exclusive_group()
    stage.add_argument("--awb-only", action="store_true")
    stage.add_argument("--gtm-only", action="store_true")
    s.add_argument("--gtm-mode", choices=("compose", "literal-average"), default="compose")
    s.add_argument("--format", choices=IMAGE_FORMATS, default="png")
    s.set_defaults(func=cmd_harmonize)

    s = sub.add_parser("gct", help="run the patch-statistics color transfer baseline")
    s.add_argument("rig")
    s.add_argument("out")
    s.add_argument("--plan", help="source=reference pairs, e.g. left=front,right=front,rear=right")
    s.add_argument("--space", choices=SPACES, default="decorrelated")
    s.add_argument("--format", choices=IMAGE_FORMATS, default="png")
    s.set_defaults(func=cmd_gct)

    s = sub.add_parser("eval", help="seam discontinuity before vs after")
    s.add_argument("before")
    s.add_argument("after")
    s.add_argument("--json", action="store_true", help="print JSON instead of TSV")
    s.add_argument("--plot-dir", help="also render seam and gain figures here")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("bench", help="time the metadata path against the gct path")
    s.add_argument("rig")
    s.add_argument("--repetitions", type=int, default=20)
    s.add_argument("--space", choices=SPACES, default="decorrelated")
    s.add_argument("--json", action="store_true")
    s.add_argument("--plot", help="render the stage breakdown to this file")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("strip", help="side-by-side strip of one or more rigs")
    s.add_argument("rigs", nargs="+")
    s.add_argument("-o", "--output", required=True, help=".png or .ppm")
    s.set_defaults(func=cmd_strip)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.func(args)
    except ValueError as exc:
        # HarmonizeError and SchemaError are ValueErrors
        where = getattr(exc, "path", None)
        field = getattr(exc, "field", None)
        detail = "".join(f" [{k}: {v}]" for k, v in (("file", where), ("field", field)) if v)
        print(f"error: {exc}{detail}", file=sys.stderr)
        return 1
    except (RigIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
