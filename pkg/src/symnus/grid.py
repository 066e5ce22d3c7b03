"""Square complex grids, unitary 2D Fourier transforms and the diagonal mirror.

A grid is a plain ``numpy.ndarray`` of shape ``(n, n)`` and dtype complex128.
Rows index the first (t1 / f1) dimension, columns the second. Wherever a grid
is flattened, the order is column-major: ``linear = j * n + i``.
"""

from typing import NamedTuple

import numpy as np

from .errors import InvalidParameter


class GridNorms(NamedTuple):
    l1: float
    l2: float
    linf: float


def as_grid(g) -> np.ndarray:
    """Validate ``g`` as a square complex grid and return it as complex128.

    The input is not copied when it already has the right dtype.
    """
    a = np.asarray(g)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidParameter(f"grid must be square 2D, got shape {a.shape}")
    if a.shape[0] < 2:
        raise InvalidParameter("grid side must be at least 2")
    return a.astype(np.complex128, copy=False)


def _mirror_avg(fn, a):
    # fn(a) and fn(a.T).T agree up to rounding; their average commutes with
    # transposition bitwise because floating-point addition is commutative
    return 0.5 * (fn(a) + fn(np.ascontiguousarray(a.T)).T)


def ft2d(g, exact_mirror: bool = False) -> np.ndarray:
    """Unitary 2D DFT, ``F @ g @ F.T`` with ``F`` scaled by 1/sqrt(n).

    With ``exact_mirror=True`` the result satisfies
    ``ft2d(g.T) == ft2d(g).T`` bit for bit (at twice the cost), so a
    symmetric input gives an exactly symmetric output.
    """
    a = as_grid(g)
    if exact_mirror:
        return _mirror_avg(lambda v: np.fft.fft2(v, norm="ortho"), a)
    return np.fft.fft2(a, norm="ortho")


def ift2d(g, exact_mirror: bool = False) -> np.ndarray:
    """Inverse of :func:`ft2d`."""
    a = as_grid(g)
    if exact_mirror:
        return _mirror_avg(lambda v: np.fft.ifft2(v, norm="ortho"), a)
    return np.fft.ifft2(a, norm="ortho")


def sym_permute(g) -> np.ndarray:
    """Mirror about the main diagonal (transpose). An exact involution."""
    return np.ascontiguousarray(as_grid(g).T)


def asymmetry_residual(g) -> float:
    """``max |g - g.T|``; zero exactly when ``g`` is diagonal-symmetric."""
    a = as_grid(g)
    return float(np.max(np.abs(a - a.T)))


def grid_norms(g) -> GridNorms:
    mag = np.abs(as_grid(g))
    top = float(mag.max())
    # scale before squaring so tiny or huge entries neither underflow nor overflow
    l2 = top * float(np.sqrt(np.sum((mag / top) ** 2))) if top > 0 else 0.0
    return GridNorms(float(mag.sum()), l2, top)


def vec(g) -> np.ndarray:
    """Column-major vectorization."""
    return as_grid(g).ravel(order="F")


def unvec(v, n: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=np.complex128)
    if v.size != n * n:
        raise InvalidParameter(f"vector of length {v.size} cannot fill a {n}x{n} grid")
    return v.reshape((n, n), order="F")
