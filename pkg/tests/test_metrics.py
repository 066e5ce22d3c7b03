import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import random_grid
from symnus.errors import DegenerateInput, InvalidParameter
from symnus.grid import ft2d
from symnus.metrics import (
    compare_amplitudes, cross_pair_mismatch, evaluate_spectrum, find_peaks, integrate_peaks,
    linear_fit, pearson, peak_amplitudes, rlne, window_sum,
)
from symnus.synth import PeakList, make_peaklist, normalize_max, synth_fid


def test_rlne_examples():
    assert rlne([1, 2], [1, 2]) == 0
    assert rlne([0, 0], [1, 2]) == 1
    assert rlne([3, 0], [3, 4]) == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(DegenerateInput):
        rlne([1], [0])
    with pytest.raises(InvalidParameter):
        rlne([1, 2], [1])


def test_fit_examples():
    x = np.arange(5.0)
    assert linear_fit(x, 2 * x + 1) == pytest.approx((2, 1), abs=1e-12)
    assert pearson(x, 2 * x + 1) == pytest.approx(1, abs=1e-15)
    assert pearson(x, -x) == pytest.approx(-1, abs=1e-15)
    with pytest.raises(DegenerateInput):
        linear_fit(np.ones(3), x[:3])


def test_against_scipy(rng):
    for _ in range(20):
        x = rng.standard_normal(50)
        y = 0.7 * x + rng.standard_normal(50)
        ref = stats.linregress(x, y)
        a, b = linear_fit(x, y)
        assert a == pytest.approx(ref.slope, abs=1e-12)
        assert b == pytest.approx(ref.intercept, abs=1e-12)
        assert pearson(x, y) == pytest.approx(stats.pearsonr(x, y)[0], abs=1e-12)


def test_compare_constant_gives_nan():
    rep = compare_amplitudes([1.0, 1.0], [1.0, 1.0])
    assert rep.rlne == 0 and np.isnan(rep.fit_a) and np.isnan(rep.pearson_r)


def test_peak_amplitudes():
    pl = PeakList(8, [2], [1.0], [(1, 5)], [1.0])
    s = np.zeros((8, 8), complex)
    s[2, 2] = 1j
    s[1, 5], s[5, 1] = 3, 4
    assert peak_amplitudes(s, pl, "diag").tolist() == [1.0]
    assert peak_amplitudes(s, pl, "cross").tolist() == [3.0, 4.0]
    sym = s + s.T
    c = peak_amplitudes(sym, pl, "cross")
    assert c[0] == c[1]


def test_self_evaluation_is_perfect():
    pl = make_peaklist(64, 5, 8, seed=1)
    ref = ft2d(normalize_max(synth_fid(pl)))
    for rep in evaluate_spectrum(ref, ref, pl):
        assert rep.rlne == 0 and rep.pearson_r == pytest.approx(1)
        assert rep.fit_a == pytest.approx(1) and rep.fit_b == pytest.approx(0, abs=1e-12)


def test_window_sum_brute_force(rng):
    mag = np.abs(random_grid(rng, 10))
    for i, j in [(0, 0), (4, 5), (9, 9), (0, 9)]:
        brute = sum(mag[(i + di) % 10, (j + dj) % 10] for di in (-1, 0, 1) for dj in (-1, 0, 1))
        assert window_sum(mag, i, j, 3) == pytest.approx(brute, rel=1e-14)


def test_integrate_delta_and_symmetry(rng):
    s = np.full((16, 16), 1e-3, complex)
    s[3, 3] = 5
    s[2, 9] = s[9, 2] = 2 + 1j
    peaks = dict(integrate_peaks(s, window_w=1))
    assert peaks[(3, 3)] == 5
    assert set(peaks) == {(3, 3), (2, 9), (9, 2)}
    assert cross_pair_mismatch(integrate_peaks(s, 3)) <= 1e-10
    s[9, 2] = 1.0
    assert cross_pair_mismatch(integrate_peaks(s, 1)) == pytest.approx(1 - 1 / abs(2 + 1j))


def test_find_peaks_canonical_order():
    s = np.full((8, 8), 0.01)
    s[5, 1] = s[1, 2] = s[0, 1] = 1
    assert find_peaks(s).tolist() == [[0, 1], [5, 1], [1, 2]]


def test_integrate_validation():
    with pytest.raises(InvalidParameter):
        integrate_peaks(np.ones((4, 4)), 2)
    with pytest.raises(InvalidParameter):
        integrate_peaks(np.ones((4, 4)), 5)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.1, 10), min_size=2, max_size=30), st.floats(0.1, 3))
def test_rlne_scale_invariant(x, c):
    x = np.array(x)
    xh = x[::-1]
    assert rlne(c * xh, c * x) == pytest.approx(rlne(xh, x), rel=1e-9)
