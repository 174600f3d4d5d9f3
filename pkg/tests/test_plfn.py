import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deglab.plfn import (
    PhaseFunction,
    PLFunction,
    degree,
    evaluate,
    flat_level_segments,
    jitter_levels,
    normalize,
)


def pl(*pts):
    return PLFunction.from_points(pts)


def test_evaluate_interpolates():
    assert evaluate(pl((0, 0), (1, 3)), 0.5) == 1.5


def test_phase_extension_above_and_below():
    phi = PhaseFunction(pl((0, 0), (1, 1)))
    assert evaluate(phi, 1.5) == 1.5
    assert evaluate(phi, -0.25) == -0.25


def test_degree_examples():
    assert degree(PhaseFunction(pl((0, 0), (1, 3)))) == 3
    assert degree(PhaseFunction(pl((0, 2), (1, 2)))) == 0
    bumpy = PhaseFunction(pl((0, 0), (0.3, 0.4), (0.6, 0.2), (1, 1)))
    assert degree(bumpy) == 1


def test_normalize_examples():
    assert normalize(pl((0, 5), (1, 6))) == pl((0, 0), (1, 1))
    assert normalize(pl((0, 2), (1, 2))) == pl((0, 0), (1, 0))
    assert normalize(pl((0, 1), (0.5, 3), (1, 2))) == pl((0, 0), (0.5, 2), (1, 1))


def test_invalid_functions_rejected():
    with pytest.raises(ValueError):
        PLFunction((0.0,), (0.0,))
    with pytest.raises(ValueError):
        PLFunction((0.0, 0.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        PLFunction((0.0, 1.0), (0.0, math.nan))
    with pytest.raises(ValueError):
        PhaseFunction(pl((0, 0), (2, 1)))


def test_jitter_constant_on_level():
    delta = 0.1
    f = pl((0, 2 * delta), (1, 2 * delta))
    out = jitter_levels(f, delta, delta / 1000)
    assert out.ys == (2 * delta + delta / 1000,) * 2
    assert flat_level_segments(out, delta) == []


def test_jitter_noop_without_flats():
    f = pl((0, 0), (0.5, 0.37), (1, 0.2))
    assert jitter_levels(f, 0.1, 1e-4) is f


def test_jitter_embedded_flat():
    delta, eps = 0.1, 1e-5
    f = pl((0, 0), (0.3, 0.2), (0.6, 0.2), (1, 0.5))
    out = jitter_levels(f, delta, eps)
    assert out.sup_distance(f) <= eps
    assert flat_level_segments(out, delta) == []
    # every level is crossed transversally: count sign changes per segment
    for k in range(-1, 7):
        lvl = k * delta
        for (x0, y0), (x1, y1) in zip(out.points, out.points[1:]):
            assert not (y0 == y1 == lvl)


finite = st.floats(-10, 10, allow_nan=False)


@st.composite
def pl_functions(draw, n_max=12):
    n = draw(st.integers(2, n_max))
    xs = sorted(set(draw(st.lists(st.floats(0.001, 0.999), min_size=n - 2, max_size=n - 2))))
    xs = [0.0] + xs + [1.0]
    ys = draw(st.lists(finite, min_size=len(xs), max_size=len(xs)))
    return PLFunction(tuple(xs), tuple(ys))


@settings(max_examples=200, deadline=None)
@given(pl_functions(), st.integers(-3 * 2**20, 3 * 2**20))
def test_phase_increment_rule(f, i):
    # dyadic x keeps x + 1 and the fractional part exact
    x = i / 2**20
    phi = PhaseFunction(f)
    r = x - math.floor(x)
    assert phi.value(r + 1) == f.value(r) + phi.increment
    scale = 1 + abs(phi.increment) * 4 + abs(f.value(r))
    assert phi.value(x + 1) - phi.value(x) == pytest.approx(phi.increment, abs=1e-14 * scale)


@settings(max_examples=200, deadline=None)
@given(pl_functions(), finite)
def test_degree_shift_invariant(f, c):
    assert degree(PhaseFunction(f.shift(c))) == pytest.approx(degree(PhaseFunction(f)), abs=1e-12 * (1 + abs(c)) * 20)


@settings(max_examples=200, deadline=None)
@given(pl_functions())
def test_exact_at_breakpoints(f):
    for x, y in f.points:
        assert f.value(x) == y
    assert np.array_equal(f.values(f.x), f.y)


@settings(max_examples=100, deadline=None)
@given(pl_functions(), st.sampled_from([0.1, 0.25, 0.5]))
def test_jitter_property(f, delta):
    ys = tuple(round(y / delta) * delta if i % 2 else y for i, y in enumerate(f.ys))
    g = PLFunction(f.xs, ys)
    eps = delta * 1e-4
    out = jitter_levels(g, delta, eps)
    assert out.sup_distance(g) <= eps
    assert flat_level_segments(out, delta) == []
