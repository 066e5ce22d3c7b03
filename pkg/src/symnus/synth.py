"""Synthetic symmetrical 2D FIDs with diagonal and paired cross peaks."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, InvalidParameter
from .grid import as_grid
from .rng import make_rng


@dataclass(eq=False)
class PeakList:
    """Ground truth of a synthetic spectrum.

    Frequencies are stored as integer bins ``N`` (the frequency is ``N / n``
    cycles per sample). ``diag`` rows are ``(N, d)`` and ``cross`` rows are
    ``(N1, N2, c)``; each cross row stands for the two peaks ``(N1, N2)`` and
    ``(N2, N1)``.
    """

    n: int
    diag_bins: np.ndarray
    diag_amp: np.ndarray
    cross_bins: np.ndarray
    cross_amp: np.ndarray
    decay_alpha: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        self.diag_bins = np.asarray(self.diag_bins, dtype=np.int64).ravel()
        self.diag_amp = np.asarray(self.diag_amp, dtype=np.float64).ravel()
        self.cross_bins = np.asarray(self.cross_bins, dtype=np.int64).reshape(-1, 2)
        self.cross_amp = np.asarray(self.cross_amp, dtype=np.float64).ravel()
        if len(self.diag_bins) != len(self.diag_amp) or len(self.cross_bins) != len(self.cross_amp):
            raise InvalidParameter("peak bins and amplitudes differ in length")
        allbins = np.concatenate([self.diag_bins, self.cross_bins.ravel()])
        if allbins.size and (allbins.min() < 0 or allbins.max() >= self.n):
            raise InvalidParameter("peak bin outside the grid")
        if np.any(self.cross_bins[:, 0] == self.cross_bins[:, 1]):
            raise InvalidParameter("cross peak with equal frequencies")
        cells = self.cells()
        if len({tuple(c) for c in cells.tolist()}) != len(cells):
            raise InvalidParameter("peak cells are not distinct")

    @property
    def diag_freqs(self):
        return self.diag_bins / self.n

    @property
    def cross_freqs(self):
        return self.cross_bins / self.n

    def cells(self, kind: str | None = None) -> np.ndarray:
        """Spectrum cells of the peaks, ``(i, j)`` rows.

        ``kind='diag'`` gives one cell per diagonal peak; ``kind='cross'``
        gives ``(N1, N2), (N2, N1)`` for each pair in order; ``None`` both.
        """
        d = np.stack([self.diag_bins, self.diag_bins], axis=1)
        c = np.empty((2 * len(self.cross_bins), 2), dtype=np.int64)
        c[0::2] = self.cross_bins
        c[1::2] = self.cross_bins[:, ::-1]
        if kind == "diag":
            return d
        if kind == "cross":
            return c
        if kind is None:
            return np.concatenate([d, c])
        raise InvalidParameter(f"unknown peak class {kind!r}")

    def __eq__(self, other):
        if not isinstance(other, PeakList):
            return NotImplemented
        return (
            self.n == other.n
            and self.decay_alpha == other.decay_alpha
            and self.seed == other.seed
            and np.array_equal(self.diag_bins, other.diag_bins)
            and np.array_equal(self.diag_amp, other.diag_amp)
            and np.array_equal(self.cross_bins, other.cross_bins)
            and np.array_equal(self.cross_amp, other.cross_amp)
        )


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma >= 0):
            raise InvalidParameter("sigma must be >= 0")


FULL_SIGMAS = tuple(k * 2.5e-4 for k in range(10))


def make_peaklist(
    n: int = 256,
    n_diag: int = 25,
    n_cross: int = 50,
    diag_range=(9.0, 10.0),
    cross_range=(3.0, 4.0),
    decay_alpha: float = 1e-3,
    seed: int = 0,
) -> PeakList:
    """Random peak list with all peak cells distinct.

    Frequencies are drawn uniformly from the ``n`` grid bins; a draw that
    lands on an occupied cell is rejected and redrawn.
    """
    if n < 2 or n_diag < 0 or n_cross < 0:
        raise InvalidParameter("need n >= 2 and non-negative peak counts")
    if n_diag > n or n_cross > n * (n - 1) // 2:
        raise InvalidParameter(f"cannot place {n_diag} diagonal and {n_cross} cross peaks on n={n}")
    rng = make_rng(seed, "peaks")
    used = set()
    diag = []
    while len(diag) < n_diag:
        b = int(rng.integers(n))
        if (b, b) not in used:
            used.add((b, b))
            diag.append(b)
    cross = []
    while len(cross) < n_cross:
        b1, b2 = (int(v) for v in rng.integers(n, size=2))
        if b1 == b2 or (b1, b2) in used:
            continue
        used.update({(b1, b2), (b2, b1)})
        cross.append((b1, b2))
    d_amp = rng.uniform(*diag_range, size=n_diag)
    c_amp = rng.uniform(*cross_range, size=n_cross)
    return PeakList(n, diag, d_amp, np.array(cross).reshape(-1, 2), c_amp, decay_alpha, seed)


def synth_fid(pl: PeakList) -> np.ndarray:
    """Noiseless FID ``W = D + C + C.T`` on time indices ``t = 1..n``.

    Built as ``M + M.T`` with ``M = D/2 + C`` so the result is symmetric to
    the last bit.
    """
    t = np.arange(1, pl.n + 1)

    def rows(freqs):
        return np.exp(np.outer(2j * np.pi * np.asarray(freqs, dtype=float), t) - pl.decay_alpha * t)

    ed = rows(pl.diag_freqs)
    m = ed.T @ (0.5 * pl.diag_amp[:, None] * ed)
    if len(pl.cross_bins):
        e1 = rows(pl.cross_freqs[:, 0])
        e2 = rows(pl.cross_freqs[:, 1])
        m = m + e1.T @ (pl.cross_amp[:, None] * e2)
    return m + m.T


def normalize_max(g) -> np.ndarray:
    """Scale so the largest magnitude is 1."""
    g = as_grid(g)
    peak = float(np.abs(g).max())
    if peak == 0.0:
        raise DegenerateInput("cannot normalize an all-zero grid")
    return g / peak


def add_noise(g, ns: NoiseSpec) -> np.ndarray:
    """Add i.i.d. Gaussian noise of std ``sigma`` to real and imaginary parts."""
    g = as_grid(g)
    if ns.sigma == 0:
        return g.copy()
    rng = make_rng(ns.seed, "noise")
    noise = rng.normal(0.0, ns.sigma, size=(2,) + g.shape)
    return g + (noise[0] + 1j * noise[1])
