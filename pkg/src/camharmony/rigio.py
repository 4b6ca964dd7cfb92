"""Rig directories on disk: images, per-camera metadata and a manifest.

Layout::

    rig.json            manifest: ring order, overlap widths, image format
    <id>.png | <id>.ppm 8-bit RGB image per camera
    <id>.json           metadata record per camera
    gain_report.json    only in harmonized outputs

Metadata record (schema_version 1)::

    {"schema_version": 1, "camera_id": "front",
     "awb": {"r": 1.9, "g": 1.0, "b": 1.6},
     "gtm": [256 numbers, non-decreasing, within 0..255]}

Unknown fields are rejected.
"""

from __future__ import annotations

import io
import json
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .core import (
    LUT_SIZE,
    AwbGains,
    CameraFrame,
    GtmLut,
    HarmonizeError,
    ImageBuffer,
    RigConfig,
    ValidationError,
    validate_awb,
    validate_lut,
    validate_rig,
)

SCHEMA_VERSION = 1
MANIFEST = "rig.json"
REPORT = "gain_report.json"
IMAGE_FORMATS = ("png", "ppm")


class SchemaError(HarmonizeError):
    """A file parsed but does not match its schema."""

    def __init__(self, message: str, field: str | None = None, path: str | os.PathLike | None = None):
        where = f"{path}: " if path is not None else ""
        super().__init__(where + message)
        self.field = field
        self.path = path


class RigIOError(OSError):
    pass


class MissingFile(RigIOError):
    pass


class IoError(RigIOError):
    pass


@contextmanager
def _located(path):
    """Tag validation errors raised inside with the file they came from."""
    try:
        yield
    except ValidationError as exc:
        if getattr(exc, "path", None) is None:
            exc.path = path
        raise


def _atomic_write(path: Path, payload: bytes) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc


# -- images ------------------------------------------------------------------


def encode_ppm(data: np.ndarray) -> bytes:
    h, w = data.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(data, dtype=np.uint8).tobytes()


def _ppm_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos : pos + 1].isspace():
            pos += 1
        if buf[pos : pos + 1] == b"#":
            while pos < len(buf) and buf[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise SchemaError("truncated PPM header")
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_ppm(buf: bytes, path=None) -> np.ndarray:
    tokens, offset = _ppm_tokens(buf, 4)
    if tokens[0] != b"P6":
        raise SchemaError(f"expected binary PPM (P6), got {tokens[0][:8]!r}", "magic", path)
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise SchemaError("malformed PPM header", "header", path) from None
    if maxval != 255:
        raise SchemaError(f"only 8-bit PPM is supported, maxval={maxval}", "maxval", path)
    raster = buf[offset : offset + w * h * 3]
    if len(raster) != w * h * 3:
        raise SchemaError(f"PPM raster holds {len(raster)} bytes, expected {w * h * 3}", "raster", path)
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w, 3).copy()


def read_image(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"missing image {path}")
    if path.suffix.lower() == ".ppm":
        return decode_ppm(path.read_bytes(), path)
    try:
        with Image.open(path) as im:
            if im.mode != "RGB":
                raise SchemaError(f"expected 8-bit RGB, got mode {im.mode}", "mode", path)
            return np.asarray(im, dtype=np.uint8).copy()
    except OSError as exc:
        raise SchemaError(f"cannot decode image: {exc}", "image", path) from exc


def write_image(path, data: np.ndarray) -> None:
    path = Path(path)
    data = np.asarray(data, dtype=np.uint8)
    if path.suffix.lower() == ".ppm":
        _atomic_write(path, encode_ppm(data))
        return
    buf = io.BytesIO()
    Image.fromarray(data, "RGB").save(buf, format="PNG")
    _atomic_write(path, buf.getvalue())


# -- metadata ----------------------------------------------------------------


@dataclass(frozen=True)
class MetadataRecord:
    camera_id: str
    awb: AwbGains
    gtm: GtmLut
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "camera_id": self.camera_id,
            "awb": {"r": self.awb.r, "g": self.awb.g, "b": self.awb.b},
            "gtm": [float(v) for v in self.gtm.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, obj, path=None) -> "MetadataRecord":
        if not isinstance(obj, dict):
            raise SchemaError("metadata must be a JSON object", None, path)
        expected = {"schema_version", "camera_id", "awb", "gtm"}
        unknown = set(obj) - expected
        if unknown:
            raise SchemaError(f"unknown field(s) {sorted(unknown)}", sorted(unknown)[0], path)
        missing = expected - set(obj)
        if missing:
            raise SchemaError(f"missing field(s) {sorted(missing)}", sorted(missing)[0], path)
        if obj["schema_version"] != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {obj['schema_version']!r}", "schema_version", path)
        if not isinstance(obj["camera_id"], str) or not obj["camera_id"]:
            raise SchemaError("camera_id must be a non-empty string", "camera_id", path)
        awb = obj["awb"]
        if not isinstance(awb, dict) or set(awb) != {"r", "g", "b"}:
            raise SchemaError("awb must be an object with exactly r, g, b", "awb", path)
        if not all(_is_number(awb[k]) for k in "rgb"):
            raise SchemaError("awb gains must be numbers", "awb", path)
        gtm = obj["gtm"]
        if not isinstance(gtm, list):
            raise SchemaError("gtm must be a list", "gtm", path)
        if len(gtm) != LUT_SIZE:
            raise SchemaError(f"gtm must have {LUT_SIZE} entries, got {len(gtm)}", "gtm", path)
        if not all(_is_number(v) for v in gtm):
            raise SchemaError("gtm entries must be numbers", "gtm", path)
        rec = cls(obj["camera_id"], AwbGains(awb["r"], awb["g"], awb["b"]), GtmLut(gtm))
        with _located(path):
            validate_awb(rec.awb, f"{rec.camera_id}.awb")
            validate_lut(rec.gtm, f"{rec.camera_id}.gtm")
        return rec

    @classmethod
    def loads(cls, text: str, path=None) -> "MetadataRecord":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}", None, path) from None
        return cls.from_dict(obj, path)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def read_metadata(path) -> MetadataRecord:
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"missing metadata {path}")
    return MetadataRecord.loads(path.read_text(), path)


def write_metadata(path, record: MetadataRecord) -> None:
    _atomic_write(Path(path), record.dumps().encode())


# -- rig directories -----------------------------------------------------------


def _read_manifest(root: Path) -> dict:
    path = root / MANIFEST
    if not path.exists():
        raise MissingFile(f"missing manifest {path}")
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", None, path) from None
    allowed = {"schema_version", "cameras", "overlap_cols", "image_format"}
    if not isinstance(obj, dict):
        raise SchemaError("manifest must be a JSON object", None, path)
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown field(s) {sorted(unknown)}", sorted(unknown)[0], path)
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {obj.get('schema_version')!r}", "schema_version", path)
    cams = obj.get("cameras")
    if not isinstance(cams, list) or not all(isinstance(c, str) and c for c in cams):
        raise SchemaError("cameras must be a list of camera ids", "cameras", path)
    ov = obj.get("overlap_cols")
    if isinstance(ov, int) and not isinstance(ov, bool):
        ov = [ov] * len(cams)
    if not isinstance(ov, list) or len(ov) != len(cams) or not all(isinstance(v, int) for v in ov):
        raise SchemaError("overlap_cols must be an int or one int per camera", "overlap_cols", path)
    obj["overlap_cols"] = ov
    return obj


def is_rig_dir(path) -> bool:
    return (Path(path) / MANIFEST).is_file()


def read_rig(path) -> RigConfig:
    """Load and validate a rig directory."""
    root = Path(path)
    if not root.is_dir():
        raise MissingFile(f"not a directory: {root}")
    manifest = _read_manifest(root)
    fmt = manifest.get("image_format", "png")
    exts = (fmt,) + tuple(e for e in IMAGE_FORMATS if e != fmt)
    cams = []
    for cid in manifest["cameras"]:
        image_path = next((root / f"{cid}.{ext}" for ext in exts if (root / f"{cid}.{ext}").exists()), None)
        if image_path is None:
            raise MissingFile(f"no image for camera {cid!r} in {root}")
        meta_path = root / f"{cid}.json"
        if not meta_path.exists():
            raise MissingFile(f"no metadata for camera {cid!r} in {root}")
        rec = read_metadata(meta_path)
        if rec.camera_id != cid:
            raise MissingFile(f"metadata {meta_path.name} describes {rec.camera_id!r}; camera {cid!r} has no metadata")
        cams.append(CameraFrame(cid, ImageBuffer(read_image(image_path)), rec.awb, rec.gtm))
    rig = RigConfig(tuple(cams), tuple(manifest["overlap_cols"]))
    with _located(root):
        return validate_rig(rig)


def write_rig(rig, path, image_format: str = "png") -> Path:
    """Write a RigConfig or HarmonizedRig as a rig directory.

    Harmonized rigs keep the source metadata and add ``gain_report.json``.
    """
    if image_format not in IMAGE_FORMATS:
        raise ValueError(f"image_format must be one of {IMAGE_FORMATS}")
    root = Path(path)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {root}: {exc.strerror or exc}") from exc
    report = None
    if hasattr(rig, "frames"):
        report = rig.report
        rig = rig.as_rig()
    for cam in rig.cameras:
        write_image(root / f"{cam.id}.{image_format}", cam.image.data)
        write_metadata(root / f"{cam.id}.json", MetadataRecord(cam.id, cam.awb, cam.gtm))
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "cameras": rig.ids,
        "overlap_cols": list(rig.overlap_cols),
        "image_format": image_format,
    }
    _atomic_write(root / MANIFEST, json.dumps(manifest, indent=1).encode())
    if report is not None:
        _atomic_write(root / REPORT, json.dumps(report, indent=1).encode())
    return root


def read_report(path) -> dict:
    p = Path(path) / REPORT
    if not p.exists():
        raise MissingFile(f"missing gain report {p}")
    return json.loads(p.read_text())
