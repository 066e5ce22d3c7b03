"""Compressed-sensing reconstruction of 2D spectra from NUS data.

Both solvers work on the spectrum ``X`` with forward model
``y = P_omega ift2d(X)``. Because ``ift2d`` is unitary and ``P_omega`` is a
restriction, the model has operator norm at most one.
"""

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .grid import as_grid, ft2d, ift2d
from .sampling import NusData


@dataclass(frozen=True)
class IstdConfig:
    maxt: int = 200
    eps: float | None = None  # None -> 1e-6 * ||y||_2
    shrink_factor: float = 0.99

    def __post_init__(self):
        if self.maxt < 1:
            raise InvalidParameter("maxt must be >= 1")
        if self.eps is not None and not (self.eps >= 0):
            raise InvalidParameter("eps must be >= 0")
        if not (0.0 < self.shrink_factor < 1.0):
            raise InvalidParameter("shrink_factor must lie in (0, 1)")


@dataclass(frozen=True)
class L1SolverConfig:
    lam: float = 1e-3
    max_iters: int = 20000
    rel_obj_tol: float = 1e-14
    accelerated: bool = True

    def __post_init__(self):
        if not (self.lam > 0):
            raise InvalidParameter("lambda must be > 0")
        if self.max_iters < 1:
            raise InvalidParameter("max_iters must be >= 1")
        if not (self.rel_obj_tol > 0):
            raise InvalidParameter("rel_obj_tol must be > 0")


@dataclass
class ReconResult:
    spectrum: np.ndarray
    iterations: int
    final_residual: float
    wall_time: float
    trace: list = field(default_factory=list)  # (iter, beta_or_objective, residual)


def shr(g, beta: float) -> np.ndarray:
    """Complex soft threshold: shrink magnitudes by ``beta``, keep phases.

    ``sign(z) = z / |z|`` with ``sign(0) = 0``.
    """
    if not (beta >= 0):
        raise InvalidParameter(f"threshold must be >= 0, got {beta}")
    z = np.asarray(g, dtype=np.complex128)
    mag = np.abs(z)
    scale = np.zeros_like(mag)
    keep = mag > beta
    scale[keep] = (mag[keep] - beta) / mag[keep]
    return z * scale


def is_mirror_symmetric(nus: NusData) -> bool:
    """True when ``omega`` is transpose-closed and ``y`` agrees on mirrored cells."""
    buf = np.zeros((nus.n, nus.n), dtype=np.complex128)
    hit = np.zeros((nus.n, nus.n), dtype=bool)
    buf[nus.omega[:, 0], nus.omega[:, 1]] = nus.y
    hit[nus.omega[:, 0], nus.omega[:, 1]] = True
    return bool(np.array_equal(hit, hit.T) and np.array_equal(buf, buf.T))


class _Operator:
    """``A = P_omega ift2d`` and its adjoint.

    For mirror-symmetric data the transforms run in ``exact_mirror`` mode,
    which keeps every iterate symmetric to the last bit instead of drifting
    by rounding.
    """

    def __init__(self, nus: NusData):
        self.n = nus.n
        self.rows = nus.omega[:, 0]
        self.cols = nus.omega[:, 1]
        self.exact = is_mirror_symmetric(nus)

    def forward(self, x):
        return ift2d(x, self.exact)[self.rows, self.cols]

    def adjoint(self, v):
        buf = np.zeros((self.n, self.n), dtype=np.complex128)
        buf[self.rows, self.cols] = v
        return ft2d(buf, self.exact)


def _zero_result(n, t0):
    return ReconResult(np.zeros((n, n), dtype=np.complex128), 0, 0.0, time.perf_counter() - t0)


def istd_reconstruct(nus: NusData, cfg: IstdConfig = IstdConfig(), callback=None) -> ReconResult:
    """2D IST-D.

    Each pass thresholds the residual spectrum at
    ``shrink_factor * max|S| * (maxt - t) / maxt`` and accumulates the
    survivors into the output. Passes run while ``t <= maxt`` and the data
    residual exceeds ``eps``; the last possible pass (``t = maxt``) uses a
    zero threshold.

    ``callback(t, X, S)`` is called with each iterate ``X^t`` and the
    residual spectrum ``S^t`` that goes with it, starting at ``t = 0``.
    """
    t0 = time.perf_counter()
    op = _Operator(nus)
    y = nus.y
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        return _zero_result(nus.n, t0)
    eps = 1e-6 * ynorm if cfg.eps is None else cfg.eps
    maxt = cfg.maxt

    x = np.zeros((nus.n, nus.n), dtype=np.complex128)
    s = op.adjoint(y)
    res = ynorm
    trace = []
    t = 0
    if callback is not None:
        callback(0, x, s)
    while t <= maxt and res > eps:
        beta = cfg.shrink_factor * float(np.abs(s).max()) * (maxt - t) / maxt
        x = x + shr(s, beta)
        r = y - op.forward(x)
        s = op.adjoint(r)
        res = float(np.linalg.norm(r))
        t += 1
        trace.append((t, beta, res))
        if callback is not None:
            callback(t, x, s)
    return ReconResult(x, t, res, time.perf_counter() - t0, trace)


def l1_objective(nus: NusData, x, lam: float) -> float:
    """``0.5 ||P_omega ift2d(x) - y||^2 + lam ||x||_1``."""
    r = _Operator(nus).forward(as_grid(x)) - nus.y
    return 0.5 * float(np.vdot(r, r).real) + lam * float(np.abs(x).sum())


def l1_reconstruct(nus: NusData, cfg: L1SolverConfig = L1SolverConfig(), callback=None) -> ReconResult:
    """Proximal gradient on the l1-regularized least squares objective.

    Step size is 1, valid because the forward operator is non-expansive.
    With ``cfg.accelerated`` the Nesterov/FISTA momentum is used; otherwise
    plain ISTA. Stops when the relative objective change drops below
    ``cfg.rel_obj_tol`` or after ``cfg.max_iters`` iterations. The trace
    records ``(iter, objective, residual)``.
    """
    t0 = time.perf_counter()
    op = _Operator(nus)
    y = nus.y
    lam = cfg.lam
    if not np.any(y):
        return _zero_result(nus.n, t0)

    x = np.zeros((nus.n, nus.n), dtype=np.complex128)
    z = x
    tk = 1.0
    obj = 0.5 * float(np.vdot(y, y).real)
    res = float(np.linalg.norm(y))
    trace = []
    it = 0
    while it < cfg.max_iters:
        r = op.forward(z) - y
        x_new = shr(z - op.adjoint(r), lam)
        r_new = op.forward(x_new) - y
        res = float(np.linalg.norm(r_new))
        obj_new = 0.5 * res * res + lam * float(np.abs(x_new).sum())
        it += 1
        if cfg.accelerated and obj_new > obj:
            # function-value restart: drop the momentum when it overshoots
            tk = 1.0
            z = x_new
        elif cfg.accelerated:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
            z = x_new + ((tk - 1.0) / t_new) * (x_new - x)
            tk = t_new
        else:
            z = x_new
        x = x_new
        trace.append((it, obj_new, res))
        if callback is not None:
            callback(it, x)
        change = abs(obj - obj_new)
        obj = obj_new
        if change <= cfg.rel_obj_tol * max(abs(obj_new), np.finfo(float).tiny):
            break
    return ReconResult(x, it, res, time.perf_counter() - t0, trace)


def write_trace_csv(path, result: ReconResult, value_name="beta_or_objective"):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", value_name, "residual"])
        for it, v, res in result.trace:
            w.writerow([it, repr(float(v)), repr(float(res))])
