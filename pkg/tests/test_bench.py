import pytest

from camharmony.bench import METHODS, STAGES, bench
from camharmony.core import InsufficientCameras, RigConfig
from camharmony.synth import SceneSpec, generate_rig


@pytest.fixture(scope="module")
def rig():
    return generate_rig(SceneSpec(seed=1, width=256, height=128))


@pytest.fixture(scope="module")
def result(rig):
    return bench(rig, repetitions=15)


def test_metadata_path_is_faster(result):
    assert result.totals["metadata"] < result.totals["gct"]
    assert result.ratio == result.totals["metadata"] / result.totals["gct"]


def test_stage_lines_cover_the_total(result):
    for method in METHODS:
        assert list(result.stages[method]) == list(STAGES[method])
        share = sum(result.stages[method].values()) / result.totals[method]
        assert 0.9 <= share <= 1.05, (method, share)


def test_rows_and_dict(result):
    rows = result.rows()
    assert rows[-1] == ("gct", "total", result.totals["gct"])
    d = result.to_dict()
    assert d["width"] == 256 and d["height"] == 128 and d["cameras"] == 4
    assert d["flagged"] == (d["ratio"] > 0.9)


def test_too_few_repetitions(rig):
    with pytest.raises(ValueError):
        bench(rig, repetitions=9)


def test_single_camera(rig):
    with pytest.raises(InsufficientCameras):
        bench(RigConfig(rig.cameras[:1], 4), repetitions=10)


def test_medians_are_stable(rig, result):
    longer = bench(rig, repetitions=100)
    for method in METHODS:
        assert longer.totals[method] == pytest.approx(result.totals[method], rel=0.2)
