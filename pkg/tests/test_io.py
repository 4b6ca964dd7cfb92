import json
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from PIL import Image

from camharmony.core import AwbGains, GtmLut, NonMonotoneLut, NonPositiveAwbGain
from camharmony.pipeline import harmonize_rig
from camharmony.rigio import (
    IoError,
    MetadataRecord,
    MissingFile,
    SchemaError,
    decode_ppm,
    encode_ppm,
    read_image,
    read_report,
    read_rig,
    write_image,
    write_rig,
)
from camharmony.synth import SceneSpec, generate_rig


@pytest.fixture
def rig():
    return generate_rig(SceneSpec(seed=11, width=32, height=16))


@pytest.mark.parametrize("fmt", ["png", "ppm"])
def test_round_trip_is_bit_exact(rig, tmp_path, fmt):
    write_rig(rig, tmp_path / "r", fmt)
    back = read_rig(tmp_path / "r")
    assert back.ids == rig.ids == ["left", "front", "right", "rear"]
    assert back.overlap_cols == rig.overlap_cols
    for a, b in zip(rig.cameras, back.cameras):
        assert a.image == b.image and a.awb == b.awb and a.gtm == b.gtm


def test_harmonized_rig_writes_report(rig, tmp_path):
    out = harmonize_rig(rig)
    write_rig(out, tmp_path / "h")
    report = read_report(tmp_path / "h")
    assert [c["id"] for c in report["cameras"]] == rig.ids
    for cam, frame, src in zip(read_rig(tmp_path / "h").cameras, out.frames, rig.cameras):
        assert cam.image == frame and cam.awb == src.awb and cam.gtm == src.gtm
    with pytest.raises(MissingFile):
        read_report(tmp_path)


def test_unwritable_path(rig, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IoError):
        write_rig(rig, blocker / "sub")


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_read_only_directory(rig, tmp_path):
    ro = tmp_path / "ro"
    ro.mkdir()
    ro.chmod(0o500)
    try:
        with pytest.raises(IoError):
            write_rig(rig, ro)
    finally:
        ro.chmod(0o700)


def _meta(tmp_path, rig, edit):
    write_rig(rig, tmp_path)
    path = tmp_path / "front.json"
    obj = json.loads(path.read_text())
    edit(obj)
    path.write_text(json.dumps(obj))
    return path


def test_short_lut_names_length(rig, tmp_path):
    path = _meta(tmp_path, rig, lambda o: o["gtm"].pop())
    with pytest.raises(SchemaError) as exc:
        read_rig(tmp_path)
    assert "255" in str(exc.value) and exc.value.field == "gtm" and exc.value.path == path


def test_unknown_field_rejected(rig, tmp_path):
    _meta(tmp_path, rig, lambda o: o.update(exposure=3))
    with pytest.raises(SchemaError) as exc:
        read_rig(tmp_path)
    assert exc.value.field == "exposure"


def test_id_mismatch_is_missing_file(rig, tmp_path):
    _meta(tmp_path, rig, lambda o: o.update(camera_id="hood"))
    with pytest.raises(MissingFile, match="front"):
        read_rig(tmp_path)


def test_invalid_values_carry_file(rig, tmp_path):
    path = _meta(tmp_path, rig, lambda o: o["awb"].update(g=0))
    with pytest.raises(NonPositiveAwbGain) as exc:
        read_rig(tmp_path)
    assert exc.value.path == path

    def dent(o):
        o["gtm"][11] = o["gtm"][10] - 1

    _meta(tmp_path, rig, dent)
    with pytest.raises(NonMonotoneLut):
        read_rig(tmp_path)


def test_missing_pieces(rig, tmp_path):
    write_rig(rig, tmp_path)
    (tmp_path / "rear.png").unlink()
    with pytest.raises(MissingFile, match="rear"):
        read_rig(tmp_path)
    (tmp_path / "rig.json").unlink()
    with pytest.raises(MissingFile):
        read_rig(tmp_path)
    with pytest.raises(MissingFile):
        read_rig(tmp_path / "nope")


def test_manifest_schema(rig, tmp_path):
    write_rig(rig, tmp_path)
    manifest = json.loads((tmp_path / "rig.json").read_text())
    assert manifest == {"schema_version": 1, "cameras": rig.ids, "overlap_cols": [4] * 4, "image_format": "png"}
    manifest["overlap_cols"] = 4
    (tmp_path / "rig.json").write_text(json.dumps(manifest))
    assert read_rig(tmp_path).overlap_cols == (4, 4, 4, 4)
    manifest["schema_version"] = 2
    (tmp_path / "rig.json").write_text(json.dumps(manifest))
    with pytest.raises(SchemaError):
        read_rig(tmp_path)


finite = st.floats(0.01, 100, allow_nan=False)


@given(st.text(min_size=1, max_size=12), finite, finite, finite, st.lists(st.floats(0, 255), min_size=256, max_size=256))
def test_metadata_round_trip(cid, r, g, b, entries):
    rec = MetadataRecord(cid, AwbGains(r, g, b), GtmLut(np.sort(entries)))
    back = MetadataRecord.loads(rec.dumps())
    assert back == rec


def test_ppm_codec(tmp_path):
    data = np.random.default_rng(0).integers(0, 256, (5, 7, 3), dtype=np.uint8)
    assert np.array_equal(decode_ppm(encode_ppm(data)), data)
    commented = b"P6\n# made by hand\n7 5\n255\n" + data.tobytes()
    assert np.array_equal(decode_ppm(commented), data)
    with pytest.raises(SchemaError):
        decode_ppm(b"P3\n1 1\n255\n0 0 0")
    with pytest.raises(SchemaError):
        decode_ppm(b"P6\n2 2\n65535\n" + bytes(24))
    with pytest.raises(SchemaError):
        decode_ppm(b"P6\n2 2\n255\n" + bytes(5))
    write_image(tmp_path / "x.ppm", data)
    assert np.array_equal(read_image(tmp_path / "x.ppm"), data)


def test_png_must_be_rgb(tmp_path):
    Image.new("L", (4, 4)).save(tmp_path / "g.png")
    with pytest.raises(SchemaError):
        read_image(tmp_path / "g.png")
    (tmp_path / "bad.png").write_bytes(b"not a png")
    with pytest.raises(SchemaError):
        read_image(tmp_path / "bad.png")


def test_no_temp_files_left(rig, tmp_path):
    write_rig(harmonize_rig(rig), tmp_path)
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".")]
