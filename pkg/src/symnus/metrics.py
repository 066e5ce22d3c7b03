"""Peak-level quality metrics for reconstructed spectra."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from .errors import DegenerateInput, InvalidParameter
from .grid import as_grid
from .synth import PeakList


@dataclass
class EvalReport:
    peak_class: str
    rlne: float
    fit_a: float
    fit_b: float
    pearson_r: float
    iterations: int = 0
    wall_time_s: float = 0.0


def _pair(x_hat, x):
    x_hat = np.asarray(x_hat, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    if x_hat.shape != x.shape:
        raise InvalidParameter(f"length mismatch: {x_hat.size} vs {x.size}")
    return x_hat, x


def rlne(x_hat, x) -> float:
    """Relative l2 error ``||x_hat - x|| / ||x||``."""
    x_hat, x = _pair(x_hat, x)
    if x.size == 0:
        raise InvalidParameter("empty amplitude vectors")
    ref = float(np.linalg.norm(x))
    if ref == 0.0:
        raise DegenerateInput("reference vector has zero norm")
    return float(np.linalg.norm(x_hat - x)) / ref


def peak_amplitudes(spectrum, pl: PeakList, peak_class: str) -> np.ndarray:
    """Magnitudes at the nominal peak bins, in peak-list order.

    Cross pairs contribute ``(N1, N2)`` then ``(N2, N1)``.
    """
    s = as_grid(spectrum)
    cells = pl.cells(peak_class)
    return np.abs(s[cells[:, 0], cells[:, 1]])


def linear_fit(x, y) -> tuple[float, float]:
    """Ordinary least squares ``y ~ a x + b``; returns ``(a, b)``."""
    y, x = _pair(y, x)
    if x.size < 2:
        raise InvalidParameter("need at least two points")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateInput("x has zero variance")
    a = float(dx @ (y - y.mean())) / sxx
    return a, float(y.mean() - a * x.mean())


def pearson(x, y) -> float:
    y, x = _pair(y, x)
    if x.size < 2:
        raise InvalidParameter("need at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    den = float(np.sqrt((dx @ dx) * (dy @ dy)))
    if den == 0.0:
        raise DegenerateInput("zero variance")
    return float(np.clip((dx @ dy) / den, -1.0, 1.0))


def compare_amplitudes(x_hat, x, peak_class="all") -> EvalReport:
    """RLNE plus fit of reconstructed on reference amplitudes.

    A fit or correlation that is undefined (constant vector) is reported as
    NaN rather than raised, so one bad cell does not sink a sweep.
    """
    e = rlne(x_hat, x)
    try:
        a, b = linear_fit(x, x_hat)
    except DegenerateInput:
        a = b = float("nan")
    try:
        r = pearson(x, x_hat)
    except DegenerateInput:
        r = float("nan")
    return EvalReport(peak_class, e, a, b, r)


def evaluate_spectrum(spectrum, reference, pl: PeakList) -> list[EvalReport]:
    """Diagonal and cross reports of ``spectrum`` against ``reference``."""
    out = []
    for cls in ("diag", "cross"):
        if len(pl.cells(cls)) == 0:
            continue
        out.append(compare_amplitudes(peak_amplitudes(spectrum, pl, cls), peak_amplitudes(reference, pl, cls), cls))
    return out


def find_peaks(spectrum, floor_factor: float = 5.0) -> np.ndarray:
    """Local maxima of ``|spectrum|`` above ``floor_factor * median``.

    Neighbourhoods are 3x3 with periodic wraparound. Returns ``(i, j)`` rows
    in canonical (column-major) order.
    """
    mag = np.abs(as_grid(spectrum))
    floor = floor_factor * float(np.median(mag))
    is_max = (mag == maximum_filter(mag, size=3, mode="wrap")) & (mag > floor)
    j, i = np.nonzero(is_max.T)
    return np.stack([i, j], axis=1)


def window_sum(mag, i, j, w):
    """Sum of ``mag`` over the ``w x w`` window centred at ``(i, j)``, periodic."""
    n = mag.shape[0]
    h = w // 2
    rows = np.arange(i - h, i + h + 1) % n
    cols = np.arange(j - h, j + h + 1) % n
    return float(mag[np.ix_(rows, cols)].sum())


def integrate_peaks(spectrum, window_w: int = 3, floor_factor: float = 5.0) -> list:
    """Detected peaks and their window-summed magnitudes.

    Returns ``[((i, j), integral), ...]`` in canonical order of the cells.
    """
    if window_w < 1 or window_w % 2 == 0:
        raise InvalidParameter(f"window must be odd and >= 1, got {window_w}")
    s = as_grid(spectrum)
    mag = np.abs(s)
    if window_w > mag.shape[0]:
        raise InvalidParameter("window larger than the grid")
    return [((int(i), int(j)), window_sum(mag, i, j, window_w)) for i, j in find_peaks(s, floor_factor)]


def cross_pair_mismatch(peaks) -> float:
    """Largest relative difference between integrals of mirrored peaks.

    Only off-diagonal peaks whose mirror was also detected are compared;
    returns 0.0 if there are none.
    """
    table = dict(peaks)
    worst = 0.0
    for (i, j), v in table.items():
        if i < j and (j, i) in table:
            u = table[(j, i)]
            scale = max(abs(u), abs(v))
            if scale > 0:
                worst = max(worst, abs(u - v) / scale)
    return worst
