import math

import numpy as np
import pytest

from deglab.generators import (
    gen_linear,
    gen_log_boundary,
    gen_multibump,
    gen_random,
    log_boundary_for_M,
    resolution,
)
from deglab.levels import decompose
from deglab.plfn import flat_level_segments


def test_linear_examples():
    g = gen_linear(8, 1 / 8)
    assert g.points == [(0.0, 0.0), (1.0, 1.0)]
    assert gen_linear(128, 0.005).ys[-1] == pytest.approx(0.64, abs=1e-15)
    assert len(gen_linear(3, 0.1).xs) == 2


def test_log_boundary_M_from_depth():
    d = decompose(gen_log_boundary(math.log(3), -50.0, 0.1), 0.1)
    assert d.M == 45
    for delta in (0.1, 0.01):
        assert decompose(gen_log_boundary(10.0, -50.0, delta), delta).M == 5


def test_log_boundary_bands_resolved():
    delta, K = 0.01, 2.0
    g = gen_log_boundary(K, -50.0, delta)
    counts = np.histogram(g.y, bins=np.arange(0, g.ys[-1] + delta, delta))[0]
    assert counts[:-1].min() >= 4


def test_log_boundary_right_is_reflection():
    delta = 0.01
    left = gen_log_boundary(3.0, -60.0, delta)
    right = gen_log_boundary(3.0, -60.0, delta, side="right")
    assert right.ys[-1] - right.ys[0] == left.ys[-1] - left.ys[0]
    dl, dr = decompose(left, delta), decompose(right, delta)
    M = dl.M
    for k in (2, 5, 10):
        # band k on the left matches band M-1-k on the right, mirrored
        a = dl.band(k)
        b = dr.band(M - 1 - k)
        assert a.measure == pytest.approx(b.measure, rel=1e-9, abs=1e-15)


def test_log_boundary_for_M_hits_top():
    g = log_boundary_for_M(128, 5.0, 0.005)
    assert g.ys[0] == 0.0 and g.ys[-1] == 128 * 0.005
    assert decompose(g, 0.005).M == 128


def test_log_boundary_rejects_bad_arguments():
    with pytest.raises(ValueError):
        gen_log_boundary(1.0, 5.0, 0.1)
    with pytest.raises(ValueError):
        gen_log_boundary(1.0, -5.0, 0.1, segments=10)
    with pytest.raises(ValueError):
        gen_log_boundary(1.0, -5.0, 0.1, side="middle")


def test_multibump_variation_and_bands():
    delta, M, bumps = 0.005, 128, 10
    g = gen_multibump(bumps, M, delta)
    tv = float(np.sum(np.abs(np.diff(g.y))))
    assert tv == pytest.approx((2 * bumps + 1) * M * delta, rel=1e-12)
    d = decompose(g, delta)
    assert all(d.band(k).measure > 0 for k in range(0, M))
    assert d.M == M


def test_multibump_zero_is_single_rise():
    g = gen_multibump(0, 20, 0.01)
    assert np.all(np.diff(g.y) > 0)
    assert g.ys[-1] == 20 * 0.01


def test_random_determinism_and_endpoints():
    a = gen_random(1, 64, 128, 0.005)
    b = gen_random(1, 64, 128, 0.005)
    assert a == b
    assert a.ys[0] == 0.0 and a.ys[-1] == 128 * 0.005


@pytest.mark.parametrize("delta", [0.009, 0.005, 0.001])
def test_random_corpus_preconditions(delta):
    for seed in range(0, 1000, 7):
        g = gen_random(seed, 64, 128, delta)
        assert flat_level_segments(g, delta) == []
        d = decompose(g, delta)
        assert d.M == 128 and d.M_exact


def test_resolution_is_positive():
    assert resolution(gen_linear(5, 0.1)) > 1e10
    assert resolution(log_boundary_for_M(128, 5.0, 0.005)) >= 1
