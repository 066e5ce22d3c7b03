"""Sampling schedules and the NUS operator.

Schedules are generated over a 1D *traversal* of candidate positions. A
Poisson-gap process walks the traversal, drawing the gap to the next sample
from ``Pois(gamma * w(pos))`` where ``w`` is a sinusoidal weight. The three
generators differ only in the traversal:

* ``pg_1d``        positions ``0 .. n_max-1`` of a single dimension;
* ``woven_pg_2d``  grid cells in serpentine anti-diagonal order, weighted by
                   ``sin(theta * (i + j) / (2 n))``;
* ``scpg_generate`` symmetrical pairs ``{(i, j), (j, i)}`` in pair-index order.
                   One point of each selected off-diagonal pair is acquired and
                   its mirror is filled with a copy.

``gamma`` is found by bisection so the number of samples is exact.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .grid import as_grid
from .rng import UniformStream, make_rng

KINDS = ("random", "woven_pg", "scpg")

_KNUTH_MAX = 30.0
_SPLIT_ABOVE = 600.0
_MAX_PROBES = 64


# --------------------------------------------------------------------------
# Poisson variates


def poisson_sample(alpha: float, rng) -> int:
    """One draw from ``Pois(alpha)``.

    ``rng`` is anything with a ``random()`` method returning U[0, 1) floats
    (a numpy ``Generator`` or a :class:`~symnus.rng.UniformStream`).

    Uses the exponential-product method for ``alpha <= 30`` and sequential
    inversion above. Very large ``alpha`` is split into independent pieces,
    relying on additivity of the Poisson law, so ``exp(-alpha)`` never
    underflows.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0.0:
        raise InvalidParameter(f"Poisson mean must be finite and >= 0, got {alpha}")
    if alpha == 0.0:
        return 0
    if alpha > _SPLIT_ABOVE:
        pieces = math.ceil(alpha / _SPLIT_ABOVE)
        part = alpha / pieces
        return sum(_poisson_inversion(part, rng) for _ in range(pieces))
    if alpha <= _KNUTH_MAX:
        limit = math.exp(-alpha)
        k = 0
        p = rng.random()
        while p > limit:
            k += 1
            p *= rng.random()
        return k
    return _poisson_inversion(alpha, rng)


def _poisson_inversion(alpha, rng):
    u = rng.random()
    k = 0
    p = math.exp(-alpha)
    cdf = p
    # cdf can stall just below 1.0 in floating point
    k_stop = alpha + 40.0 * math.sqrt(alpha) + 40.0
    while u > cdf and k < k_stop:
        k += 1
        p *= alpha / k
        cdf += p
    return k


# --------------------------------------------------------------------------
# Gap process and gamma calibration


def _gap_process(weights, gamma, stream):
    """Walk the traversal; ``weights[pos]`` is the sinusoid at ``pos``."""
    n_max = len(weights)
    out = []
    pos = 0
    while pos < n_max:
        idx = pos + poisson_sample(gamma * weights[pos], stream)
        if idx >= n_max:
            break
        out.append(idx)
        pos = idx + 1
    return out


def _trim_or_pad(points, target, n_max):
    """Force an exact count by editing at the extreme gaps.

    Surplus: drop the sample closest to its predecessor (the first sample is
    kept). Deficit: insert at the middle of the widest free run.
    """
    pts = sorted(points)
    while len(pts) > target:
        gaps = np.diff(pts)
        del pts[int(np.argmin(gaps)) + 1]
    while len(pts) < target:
        edges = [-1] + pts + [n_max]
        runs = np.diff(edges) - 1
        r = int(np.argmax(runs))
        pts.insert(r, edges[r] + 1 + runs[r] // 2)
    return pts


def _calibrated_gap_process(weights, target, seed, tag):
    """Return ``(positions, gamma)`` with exactly ``target`` positions."""
    n_max = len(weights)
    if target == n_max:
        return list(range(n_max)), 0.0
    lo, hi = 0.0, 4.0 * n_max / target
    best = None
    gamma = 0.0
    for attempt in range(_MAX_PROBES):
        gamma = 0.5 * (lo + hi)
        pts = _gap_process(weights, gamma, UniformStream(make_rng(seed, tag, attempt)))
        if len(pts) == target:
            return pts, gamma
        if best is None or abs(len(pts) - target) < abs(len(best) - target):
            best = pts
        if len(pts) > target:
            lo = gamma
        else:
            hi = gamma
    return _trim_or_pad(best, target, n_max), gamma


def _check_theta(theta):
    theta = float(theta)
    if not (math.isclose(theta, math.pi) or math.isclose(theta, math.pi / 2)):
        raise InvalidParameter(f"theta must be pi or pi/2, got {theta}")
    return theta


# --------------------------------------------------------------------------
# 1D Poisson gap


@dataclass(frozen=True)
class PgConfig:
    """Parameters of a 1D Poisson-gap schedule.

    ``gamma=None`` means calibrate it so exactly ``target`` points come out.
    A fixed ``gamma`` runs the gap process once and returns whatever count
    it produces.
    """

    n_max: int
    target: int
    theta: float = math.pi
    seed: int = 0
    gamma: float | None = None

    def __post_init__(self):
        if self.n_max < 1 or not (1 <= self.target <= self.n_max):
            raise InvalidParameter(
                f"need 1 <= target <= n_max, got target={self.target}, n_max={self.n_max}"
            )
        _check_theta(self.theta)
        if self.gamma is not None and not (self.gamma >= 0):
            raise InvalidParameter("gamma must be >= 0")


def pg_weights(n_max, theta):
    return np.sin(theta * np.arange(n_max) / n_max).tolist()


def pg_1d(cfg: PgConfig) -> np.ndarray:
    """Sorted sample positions in ``[0, cfg.n_max)``."""
    weights = pg_weights(cfg.n_max, cfg.theta)
    if cfg.gamma is None:
        pts, _ = _calibrated_gap_process(weights, cfg.target, cfg.seed, "pg")
    else:
        pts = _gap_process(weights, cfg.gamma, UniformStream(make_rng(cfg.seed, "pg", 0)))
    return np.asarray(pts, dtype=np.int64)


# --------------------------------------------------------------------------
# 2D schedules


@dataclass(eq=False)
class Schedule:
    """A 2D sampling plan.

    ``acquired`` holds ``(i, j)`` rows of physically sampled cells in
    canonical (column-major) order. ``copy_map`` holds ``(src_i, src_j,
    dst_i, dst_j)`` rows for SCPG mirror fills and is empty otherwise.
    """

    n: int
    kind: str
    acquired: np.ndarray
    copy_map: np.ndarray = field(default_factory=lambda: np.zeros((0, 4), dtype=np.int64))
    seed: int = 0
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"unknown schedule kind {self.kind!r}")
        self.acquired = np.asarray(self.acquired, dtype=np.int64).reshape(-1, 2)
        self.copy_map = np.asarray(self.copy_map, dtype=np.int64).reshape(-1, 4)
        self.acquired = self.acquired[np.argsort(canonical_index(self.acquired, self.n), kind="stable")]
        self.copy_map = self.copy_map[
            np.argsort(canonical_index(self.copy_map[:, :2], self.n), kind="stable")
        ]

    @property
    def nominal_rate(self) -> float:
        """Physically acquired fraction of the grid; copies are free."""
        return len(self.acquired) / (self.n * self.n)

    def carrying_cells(self) -> np.ndarray:
        """Acquired cells plus copy destinations, canonical order."""
        cells = np.concatenate([self.acquired, self.copy_map[:, 2:]])
        return cells[np.argsort(canonical_index(cells, self.n), kind="stable")]

    def mask(self) -> np.ndarray:
        """Boolean grid of data-carrying cells."""
        m = np.zeros((self.n, self.n), dtype=bool)
        c = self.carrying_cells()
        m[c[:, 0], c[:, 1]] = True
        return m

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return (
            self.n == other.n
            and self.kind == other.kind
            and self.seed == other.seed
            and self.theta == other.theta
            and np.array_equal(self.acquired, other.acquired)
            and np.array_equal(self.copy_map, other.copy_map)
        )


def canonical_index(cells, n) -> np.ndarray:
    """Column-major linear index ``j * n + i`` of ``(i, j)`` rows."""
    cells = np.asarray(cells, dtype=np.int64).reshape(-1, 2)
    return cells[:, 1] * n + cells[:, 0]


def cells_from_index(lin, n) -> np.ndarray:
    lin = np.asarray(lin, dtype=np.int64)
    return np.stack([lin % n, lin // n], axis=1)


def count_from_rate(rate: float, n: int) -> int:
    """``ceil(rate * n^2)``, tolerant of binary rounding in ``rate``."""
    if not (0.0 < rate <= 1.0):
        raise InvalidParameter(f"rate must be in (0, 1], got {rate}")
    return max(1, math.ceil(rate * n * n - 1e-9))


def _check_side(n):
    if int(n) != n or n < 2:
        raise InvalidParameter(f"grid side must be an integer >= 2, got {n}")
    return int(n)


def random_2d(n: int, target: int, seed: int = 0) -> Schedule:
    """Uniform sample of ``target`` cells without replacement."""
    n = _check_side(n)
    if not (1 <= target <= n * n):
        raise InvalidParameter(f"target must be in [1, {n * n}], got {target}")
    lin = make_rng(seed, "random").choice(n * n, size=target, replace=False)
    return Schedule(n, "random", cells_from_index(np.sort(lin), n), seed=seed)


def woven_traversal(n: int) -> np.ndarray:
    """Cells in serpentine anti-diagonal order, shape ``(n*n, 2)``.

    Anti-diagonal ``s = i + j`` is walked with ``i`` ascending when ``s`` is
    even and descending when odd, so consecutive positions stay adjacent.
    """
    out = []
    for s in range(2 * n - 1):
        i = np.arange(max(0, s - n + 1), min(s, n - 1) + 1)
        if s % 2:
            i = i[::-1]
        out.append(np.stack([i, s - i], axis=1))
    return np.concatenate(out).astype(np.int64)


def woven_pg_2d(n: int, target: int, theta: float = math.pi, seed: int = 0) -> Schedule:
    """2D Woven Poisson-gap schedule.

    The gap mean at a cell is ``gamma * sin(theta * (i + j) / (2 n))``. After
    generation the whole traversal sequence is shifted back so that position
    0, the cell ``(0, 0)``, is sampled.
    """
    n = _check_side(n)
    theta = _check_theta(theta)
    if not (1 <= target <= n * n):
        raise InvalidParameter(f"target must be in [1, {n * n}], got {target}")
    order = woven_traversal(n)
    weights = np.sin(theta * order.sum(axis=1) / (2 * n)).tolist()
    pos, _ = _calibrated_gap_process(weights, target, seed, "woven")
    pos = np.asarray(pos, dtype=np.int64)
    pos -= pos.min()
    return Schedule(n, "woven_pg", order[pos], seed=seed, theta=theta)


def pair_index(i, j) -> int:
    """1-based pair index ``k = j(j-1)/2 + i`` for 1-based ``i <= j``."""
    if not (1 <= i <= j):
        raise InvalidParameter(f"need 1 <= i <= j, got ({i}, {j})")
    return j * (j - 1) // 2 + i


def pair_cell(k: int) -> tuple[int, int]:
    """Inverse of :func:`pair_index`: 1-based ``(i, j)`` with ``i <= j``."""
    if k < 1:
        raise InvalidParameter(f"pair index must be >= 1, got {k}")
    j = (math.isqrt(8 * k + 1) - 1) // 2
    if j * (j + 1) // 2 < k:
        j += 1
    return k - j * (j - 1) // 2, j


def scpg_generate(n: int, target_pairs: int, theta: float = math.pi, seed: int = 0) -> Schedule:
    """Symmetrical Copy Poisson Gap schedule.

    Selects ``target_pairs`` of the ``n(n+1)/2`` symmetrical pairs with a
    Poisson-gap process over the pair index. For every selected off-diagonal
    pair a fair coin picks the upper ``(i, j)`` or lower ``(j, i)`` point to
    acquire; the other goes to ``copy_map``. Diagonal pairs are acquired
    directly.
    """
    n = _check_side(n)
    theta = _check_theta(theta)
    n_pairs = n * (n + 1) // 2
    if not (1 <= target_pairs <= n_pairs):
        raise InvalidParameter(f"target_pairs must be in [1, {n_pairs}], got {target_pairs}")
    pos, _ = _calibrated_gap_process(pg_weights(n_pairs, theta), target_pairs, seed, "scpg")
    coin = make_rng(seed, "scpg-coin")
    acquired, copies = [], []
    for p in pos:
        i, j = pair_cell(p + 1)
        i, j = i - 1, j - 1
        if i == j:
            acquired.append((i, i))
        elif coin.random() < 0.5:
            acquired.append((i, j))
            copies.append((i, j, j, i))
        else:
            acquired.append((j, i))
            copies.append((j, i, i, j))
    return Schedule(n, "scpg", np.array(acquired), np.array(copies).reshape(-1, 4), seed=seed, theta=theta)


def make_schedule(kind: str, n: int, count: int, theta: float = math.pi, seed: int = 0) -> Schedule:
    """Dispatch on ``kind``. ``count`` is acquired points (pairs for scpg)."""
    if kind == "random":
        return random_2d(n, count, seed)
    if kind == "woven_pg":
        return woven_pg_2d(n, count, theta, seed)
    if kind == "scpg":
        return scpg_generate(n, count, theta, seed)
    raise InvalidParameter(f"unknown schedule kind {kind!r}")


# --------------------------------------------------------------------------
# NUS operator and filled data


@dataclass(eq=False)
class NusData:
    """Measured cells ``omega`` (canonical order) and aligned samples ``y``."""

    n: int
    omega: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=np.int64).reshape(-1, 2)
        self.y = np.asarray(self.y, dtype=np.complex128).ravel()
        _check_cells(self.omega, self.n)
        if len(self.omega) != len(self.y):
            raise InvalidParameter(f"|omega|={len(self.omega)} but |y|={len(self.y)}")
        if np.any(np.diff(canonical_index(self.omega, self.n)) <= 0):
            raise InvalidParameter("omega must be strictly increasing in canonical order")

    @property
    def r(self) -> int:
        return len(self.omega)


@dataclass
class SpisPartition:
    omega_0: np.ndarray
    omega_0T: np.ndarray
    omega_d: np.ndarray


def _check_cells(cells, n):
    if cells.size and (cells.min() < 0 or cells.max() >= n):
        raise InvalidParameter(f"index out of range for n={n}")


def gather(g, omega) -> np.ndarray:
    """``P_omega``: values of ``g`` at ``omega``, in the given order."""
    g = as_grid(g)
    omega = np.asarray(omega, dtype=np.int64).reshape(-1, 2)
    _check_cells(omega, g.shape[0])
    return g[omega[:, 0], omega[:, 1]]


def scatter(omega, y, n: int) -> np.ndarray:
    """``P_omega^H``: ``n x n`` grid holding ``y`` at ``omega``, zero elsewhere."""
    omega = np.asarray(omega, dtype=np.int64).reshape(-1, 2)
    _check_cells(omega, n)
    out = np.zeros((n, n), dtype=np.complex128)
    out[omega[:, 0], omega[:, 1]] = y
    return out


def build_nusdata(full_fid, sched: Schedule) -> NusData:
    """Sample ``full_fid`` according to ``sched`` and apply SCPG copies.

    Copy destinations receive the *acquired* value of their mirror, so the
    resulting data are exactly symmetric even when ``full_fid`` is not.
    """
    fid = as_grid(full_fid)
    if fid.shape[0] != sched.n:
        raise InvalidParameter(f"schedule is for n={sched.n}, grid has n={fid.shape[0]}")
    acq = sched.acquired
    cm = sched.copy_map
    cells = np.concatenate([acq, cm[:, 2:]])
    vals = np.concatenate([fid[acq[:, 0], acq[:, 1]], fid[cm[:, 0], cm[:, 1]]])
    order = np.argsort(canonical_index(cells, sched.n), kind="stable")
    return NusData(sched.n, cells[order], vals[order])


def partition_spis(omega) -> SpisPartition:
    """Split a transpose-closed index set into upper, lower and diagonal parts."""
    omega = np.asarray(omega, dtype=np.int64).reshape(-1, 2)
    cells = {tuple(c) for c in omega.tolist()}
    if any((j, i) not in cells for i, j in cells):
        raise InvalidParameter("omega is not closed under transposition")
    i, j = omega[:, 0], omega[:, 1]
    return SpisPartition(omega[i < j], omega[i > j], omega[i == j])
