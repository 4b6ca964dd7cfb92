import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from camharmony.blend import (
    DomainError,
    blend_weights,
    full_width_weights,
    logistic_mod,
    logistic_standard,
    spatial_gain,
)

mpmath.mp.dps = 40


def test_standard_endpoints():
    assert logistic_standard(-6) == pytest.approx(0.0025, abs=5e-5)
    assert logistic_standard(0) == 0.5
    assert logistic_standard(6) == pytest.approx(0.9975, abs=5e-5)


def test_modified_endpoints_against_high_precision():
    pre0 = float(mpmath.mpf("1.005") / (1 + mpmath.e ** 6) - mpmath.mpf("0.0025"))
    pre12 = float(mpmath.mpf("1.005") / (1 + mpmath.e ** -6) - mpmath.mpf("0.0025"))
    assert pre0 == pytest.approx(-1.5e-5, abs=1e-6)
    assert pre12 - 1 == pytest.approx(1.5e-5, abs=1e-6)
    assert logistic_mod(0, clamp=False) == pytest.approx(pre0, abs=1e-15)
    assert logistic_mod(12, clamp=False) == pytest.approx(pre12, abs=1e-15)
    assert logistic_mod(0) == 0.0
    assert logistic_mod(12) == 1.0
    assert logistic_mod(6) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("fn,x", [(logistic_standard, 6.01), (logistic_standard, -7), (logistic_mod, -0.1), (logistic_mod, 12.5)])
def test_domain(fn, x):
    with pytest.raises(DomainError):
        fn(x)


def test_curves_are_monotone():
    x = np.linspace(-6, 6, 2001)
    assert np.all(np.diff(logistic_standard(x)) > 0)
    x = np.linspace(0, 12, 2001)
    assert np.all(np.diff(logistic_mod(x)) >= 0)


def test_weights_512():
    r = blend_weights(512, "right")
    assert r.start == 256 and r.stop == 512
    assert r.weights[0] == 0.0 and r.weights[-1] == 1.0
    assert r.weights[384 - 256] == pytest.approx(0.5, abs=0.02)
    left = blend_weights(512, "left")
    assert left.weights[0] == 1.0
    assert left.weights[-1] < 1e-4


def test_weights_smallest_width():
    assert blend_weights(4, "right").weights.tolist() == [0.0, 1.0]
    assert blend_weights(4, "left").weights.tolist() == [1.0, 0.0]


@pytest.mark.parametrize("w", [3, 2, 0, 511])
def test_weights_reject_bad_width(w):
    with pytest.raises(DomainError):
        blend_weights(w, "right")


def test_weights_are_cached_and_frozen():
    a = blend_weights(64, "left")
    assert blend_weights(64, "left") is a
    with pytest.raises(ValueError):
        a.weights[0] = 0.3


@given(st.integers(2, 400).map(lambda k: 2 * k))
def test_weight_profiles(width):
    r = blend_weights(width, "right").weights
    left = blend_weights(width, "left").weights
    assert r[0] == 0.0 and r[-1] == 1.0
    assert left[0] == 1.0
    assert np.all(np.diff(r) >= 0) and np.all(np.diff(left) <= 0)
    assert np.all((r >= 0) & (r <= 1)) and np.all((left >= 0) & (left <= 1))
    full = full_width_weights(width)
    assert full.shape == (width,) and full[width // 2] == 0.0
    if width >= 64:
        bound = 12 / (width / 2 - 1) * 0.2513
        assert np.max(np.abs(np.diff(r))) <= bound
        assert np.max(np.abs(np.diff(left))) <= bound


def test_spatial_gain_examples():
    assert spatial_gain(0.75, 0) == 1.0
    assert spatial_gain(0.75, 1) == 0.75
    assert spatial_gain(1.5, 0.5) == 1.25


@given(st.floats(1e-3, 1e3), st.floats(0, 1))
def test_spatial_gain_exact_endpoints(g, w):
    assert spatial_gain(g, 0.0) == 1.0
    assert spatial_gain(g, 1.0) == g
    assert spatial_gain(1.0, w) == 1.0


def test_logistic_flatter_than_linear_at_center():
    # the logistic profile spends its steepest slope away from the boundary
    w = blend_weights(512, "right").weights
    linear = np.linspace(0, 1, w.size)
    assert np.max(np.diff(w)) > np.max(np.diff(linear))
    assert w[1] - w[0] < linear[1] - linear[0]
    assert math.isclose(w[-1], 1.0)
