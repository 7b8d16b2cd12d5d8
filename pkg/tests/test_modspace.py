import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaborkit import gabor, modspace, tfcore, windows
from gaborkit.modspace import WeightSpec

from .conftest import random_signal

ALL_WEIGHTS = [
    WeightSpec("constant"),
    WeightSpec("polynomial_sum", 2.0),
    WeightSpec("polynomial_sum", 0.5),
    WeightSpec("polynomial_freq", 1.5),
    WeightSpec("subexp_time", b=0.5),
    WeightSpec("subexp_time", b=0.9),
]


@pytest.mark.parametrize("w", ALL_WEIGHTS, ids=lambda w: f"{w.kind}-{w.a}-{w.b}")
def test_weight_at_origin(w):
    assert w(0, 0) == 1


def test_weight_examples():
    assert WeightSpec("polynomial_sum", 2)(1, 1) == 9
    assert WeightSpec("subexp_time", b=0.5)(0, 4) == pytest.approx(math.e**2)
    assert WeightSpec("polynomial_freq", 2)(3, 100) == 16


@pytest.mark.parametrize(
    "kwargs",
    [dict(kind="polynomial_sum", a=0), dict(kind="polynomial_freq", a=-1), dict(kind="subexp_time", b=1.0),
     dict(kind="subexp_time", b=0.0), dict(kind="wavelet")],
)
def test_weight_rejects(kwargs):
    with pytest.raises(ValueError):
        WeightSpec(**kwargs)


@pytest.mark.parametrize("w", ALL_WEIGHTS, ids=lambda w: f"{w.kind}-{w.a}-{w.b}")
def test_submultiplicative_grid(w):
    assert modspace.is_submultiplicative(w, radius=20)


def test_submultiplicative_detects_violation():
    class Bad:
        kind = "polynomial_sum"
        a = -1.0
        b = 0.5

    assert not modspace.is_submultiplicative(Bad(), radius=3)


@settings(max_examples=50)
@given(st.sampled_from(ALL_WEIGHTS), st.floats(-50, 50), st.floats(-50, 50))
def test_weight_at_least_one(w, om, x):
    assert w(om, x) >= 1


def test_symmetric_index():
    np.testing.assert_array_equal(modspace.symmetric_index(6), [0, 1, 2, -3, -2, -1])
    np.testing.assert_array_equal(modspace.symmetric_index(5), [0, 1, 2, -2, -1])


def test_constant_weight_is_stft_l1(rng):
    f = random_signal(rng, 16)
    g = windows.gaussian(16)
    assert modspace.m1v_norm(f, WeightSpec("constant")) == pytest.approx(np.abs(tfcore.stft(f, g)).sum(), rel=1e-14)


def test_monotone_in_weight(rng):
    f = random_signal(rng, 24)
    small = modspace.m1v_norm(f, WeightSpec("polynomial_sum", 1.0))
    big = modspace.m1v_norm(f, WeightSpec("polynomial_sum", 2.0))
    assert modspace.m1v_norm(f, WeightSpec("constant")) <= small <= big


# frozen values: plain sums over the STFT grid
FROZEN_GAUSSIAN_32 = {None: 2830.7333872211766, 2.0: 6485.603460503821, 8.0: 3163.7353939782333}


def test_window_equivalence_gaussian_32():
    f = windows.gaussian(32)
    w = WeightSpec("polynomial_sum", 2.0)
    vals = {}
    for width in FROZEN_GAUSSIAN_32:
        g = None if width is None else windows.gaussian(32, width)
        vals[width] = modspace.m1v_norm(f, w, g)
        # independent evaluation with explicit double loop over the grid
        V = tfcore.stft(f, windows.gaussian(32) if g is None else g)
        s = [(i + 16) % 32 - 16 for i in range(32)]
        brute = sum(abs(V[m, n]) * (1 + abs(s[m]) + abs(s[n])) ** 2 for m in range(32) for n in range(32))
        assert vals[width] == pytest.approx(brute, rel=1e-12)
    assert vals == pytest.approx(FROZEN_GAUSSIAN_32, rel=1e-10)
    for width in (2.0, 8.0):
        assert 1 / 3 <= vals[width] / vals[None] <= 3


def test_zero_window_rejected():
    with pytest.raises(ValueError, match="nonzero"):
        modspace.m1v_norm(np.ones(8), WeightSpec(), np.zeros(8))


# dual window keeps a finite weighted norm; ratio recorded as a regression value
DUAL_PRIMAL_NORMS = (6067.773478862378, 4985.595319900456)


def test_dual_window_norm_regression():
    sys = gabor.build_system(windows.gaussian(48), 4, 6)
    w = WeightSpec("polynomial_sum", 2.0)
    primal = modspace.m1v_norm(sys.window, w)
    dual = modspace.m1v_norm(gabor.dual_window(sys), w)
    assert np.isfinite(dual)
    assert (primal, dual) == pytest.approx(DUAL_PRIMAL_NORMS, rel=1e-9)


def test_lattice_weight():
    w = WeightSpec("polynomial_sum", 1.0)
    vt = modspace.lattice_weight(w, 4, 6)
    assert vt(1, 1) == w(4, 6) == 11
    np.testing.assert_allclose(vt(np.array([0, 1]), np.array([0, 0])), [1, 5])


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ALL_WEIGHTS), st.integers(0, 2**32 - 1), st.floats(-3, 3))
def test_norm_axioms(w, seed, c):
    r = np.random.default_rng(seed)
    f, g = random_signal(r, 12), random_signal(r, 12)
    nf, ng = modspace.m1v_norm(f, w), modspace.m1v_norm(g, w)
    assert modspace.m1v_norm(c * f, w) == pytest.approx(abs(c) * nf, rel=1e-10, abs=1e-10)
    assert modspace.m1v_norm(f + g, w) <= nf + ng + 1e-10 * (nf + ng)
