import numpy as np
import pytest

from symnus.errors import DegenerateInput, InvalidParameter
from symnus.grid import asymmetry_residual, ft2d
from symnus.synth import NoiseSpec, PeakList, add_noise, make_peaklist, normalize_max, synth_fid


def test_default_peaklist():
    pl = make_peaklist(seed=3)
    assert len(pl.diag_bins) == 25 and len(pl.cross_bins) == 50
    cells = {tuple(c) for c in pl.cells().tolist()}
    assert len(cells) == 125
    assert np.all((pl.diag_amp >= 9) & (pl.diag_amp <= 10))
    assert np.all((pl.cross_amp >= 3) & (pl.cross_amp <= 4))
    assert pl == make_peaklist(seed=3)
    assert pl != make_peaklist(seed=4)


def test_minimal_peaklist():
    pl = make_peaklist(16, 1, 0)
    assert len(pl.cells()) == 1


def test_peaklist_validation():
    with pytest.raises(InvalidParameter):
        PeakList(8, [1, 1], [1, 1], np.zeros((0, 2)), [])
    with pytest.raises(InvalidParameter):
        PeakList(8, [], [], [(2, 2)], [1])
    with pytest.raises(InvalidParameter):
        PeakList(8, [], [], [(2, 3), (3, 2)], [1, 1])
    with pytest.raises(InvalidParameter):
        PeakList(8, [8], [1], np.zeros((0, 2)), [])
    with pytest.raises(InvalidParameter):
        make_peaklist(4, 5, 0)


def test_fid_symmetric_to_rounding():
    for seed in range(5):
        w = synth_fid(make_peaklist(64, 5, 10, seed=seed))
        assert asymmetry_residual(w) <= 1e-12 * np.abs(w).max()


def test_single_unit_diag_peak():
    n, b = 32, 5
    w = synth_fid(PeakList(n, [b], [1.0], np.zeros((0, 2)), [], decay_alpha=0.0))
    t = np.arange(1, n + 1)
    expect = np.exp(2j * np.pi * b / n * (t[:, None] + t[None, :]))
    assert np.allclose(w, expect, atol=1e-12)
    assert np.allclose(np.abs(w), 1.0, atol=1e-12)


def test_cross_pair_decay_ratio():
    n, a = 64, 1e-3
    w = synth_fid(PeakList(n, [], [], [(3, 11)], [1.0], decay_alpha=a))
    assert abs(w[-1, -1]) / abs(w[0, 0]) == pytest.approx(np.exp(-2 * a * (n - 1)), rel=1e-12)


def test_spectrum_maxima_at_peak_cells():
    pl = make_peaklist(64, 4, 6, seed=2, decay_alpha=0.0)
    mag = np.abs(ft2d(synth_fid(pl)))
    cells = pl.cells()
    mask = np.zeros_like(mag, bool)
    mask[cells[:, 0], cells[:, 1]] = True
    # alpha = 0: on-grid deltas, nothing off the peak cells
    assert mag[~mask].max() <= 1e-9 * mag.max()
    # magnitude d * n at a diagonal bin
    b = pl.diag_bins[0]
    assert mag[b, b] == pytest.approx(pl.diag_amp[0] * 64, rel=1e-12)


def test_spectrum_maxima_with_decay():
    pl = make_peaklist(64, 3, 3, seed=5)
    mag = np.abs(ft2d(synth_fid(pl)))
    for i, j in pl.cells().tolist():
        nb = mag[np.ix_([(i - 1) % 64, i, (i + 1) % 64], [(j - 1) % 64, j, (j + 1) % 64])]
        assert mag[i, j] == nb.max()


def test_normalize():
    g = np.zeros((3, 3), complex)
    g[1, 2] = 4j
    g[0, 0] = 1
    out = normalize_max(g)
    assert np.abs(out).max() == 1.0
    assert np.allclose(normalize_max(out), out, rtol=0, atol=1e-16)
    s = g + g.T
    assert asymmetry_residual(normalize_max(s)) == 0.0
    with pytest.raises(DegenerateInput):
        normalize_max(np.zeros((3, 3)))


def test_noise():
    g = normalize_max(synth_fid(make_peaklist(256, 5, 5, seed=1)))
    assert np.array_equal(add_noise(g, NoiseSpec(0.0)), g)
    noisy = add_noise(g, NoiseSpec(1e-3, seed=9))
    d = noisy - g
    assert abs(d.real.std() / 1e-3 - 1) < 0.02
    assert abs(d.imag.std() / 1e-3 - 1) < 0.02
    assert np.array_equal(noisy, add_noise(g, NoiseSpec(1e-3, seed=9)))
    with pytest.raises(InvalidParameter):
        NoiseSpec(-1.0)
