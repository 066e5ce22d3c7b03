"""Monte Carlo comparison of sampling schedules on synthetic symmetric spectra.

One *trial* draws a peak list, synthesizes and normalizes its FID, and then
for every (schedule kind, NUS rate) draws a schedule and for every noise
level reconstructs and scores the result against the noiseless, fully
sampled spectrum. Every random input is seeded from
``(base_seed, trial, purpose)`` so trials are independent work units and the
output table does not depend on how they are scheduled.
"""

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .errors import InvalidParameter
from .grid import ft2d
from .metrics import evaluate_spectrum
from .recon import IstdConfig, L1SolverConfig, istd_reconstruct, l1_reconstruct
from .rng import derive_seed
from .sampling import KINDS, build_nusdata, count_from_rate, make_schedule
from .synth import FULL_SIGMAS, NoiseSpec, add_noise, make_peaklist, normalize_max, synth_fid

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "trial", "schedule", "solver", "n", "rate", "sigma", "class",
    "rlne", "fit_a", "fit_b", "pearson_r", "iterations", "wall_time_s",
)

FULL_RATES = tuple(0.05 + 0.025 * k for k in range(10))


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 10
    nus_rates: tuple = (0.05,)
    noise_sigmas: tuple = (1e-3,)
    schedules: tuple = KINDS
    solver: str = "istd"
    base_seed: int = 0
    n: int = 256
    theta: float = math.pi / 2
    maxt: int = 200
    lam: float = 1e-3
    l1_max_iters: int = 300
    n_diag: int = 25
    n_cross: int = 50
    decay_alpha: float = 1e-3
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameter("trials must be >= 1")
        if not self.nus_rates or any(not (0 < r <= 1) for r in self.nus_rates):
            raise InvalidParameter("rates must lie in (0, 1]")
        if not self.noise_sigmas or any(not (s >= 0) for s in self.noise_sigmas):
            raise InvalidParameter("noise sigmas must be >= 0")
        if not self.schedules or any(k not in KINDS for k in self.schedules):
            raise InvalidParameter(f"schedules must be a non-empty subset of {KINDS}")
        if self.solver not in ("istd", "l1"):
            raise InvalidParameter("solver must be 'istd' or 'l1'")
        if self.workers < 1:
            raise InvalidParameter("workers must be >= 1")

    @classmethod
    def full(cls, **kw):
        """The full 100 x 10 x 10 x 3 sweep."""
        return cls(trials=100, nus_rates=FULL_RATES, noise_sigmas=FULL_SIGMAS, **kw)


def _nan_reports():
    return [dict(cls=c, rlne=math.nan, fit_a=math.nan, fit_b=math.nan, pearson_r=math.nan) for c in ("diag", "cross")]


def run_trial(cfg: MonteCarloConfig, trial: int, on_spectrum=None) -> list[dict]:
    """All rows for one trial, in (schedule, rate, sigma, class) order.

    ``on_spectrum(trial, kind, rate, sigma, spectrum, peaklist)`` is called
    with every reconstruction, if given.
    """
    pl = make_peaklist(
        cfg.n, cfg.n_diag, cfg.n_cross, decay_alpha=cfg.decay_alpha,
        seed=derive_seed(cfg.base_seed, trial, "peaks"),
    )
    clean = normalize_max(synth_fid(pl))
    reference = ft2d(clean)
    noisy = {
        s: add_noise(clean, NoiseSpec(s, derive_seed(cfg.base_seed, trial, "noise", float(s))))
        for s in cfg.noise_sigmas
    }
    rows = []
    for kind in cfg.schedules:
        for rate in cfg.nus_rates:
            sched = None
            try:
                sched = make_schedule(
                    kind, cfg.n, count_from_rate(rate, cfg.n), cfg.theta,
                    derive_seed(cfg.base_seed, trial, "schedule", kind, float(rate)),
                )
            except Exception:
                log.exception("trial %d: %s schedule at rate %g failed", trial, kind, rate)
            for sigma in cfg.noise_sigmas:
                base = dict(trial=trial, schedule=kind, solver=cfg.solver, n=cfg.n, rate=rate, sigma=sigma)
                try:
                    if sched is None:
                        raise RuntimeError("no schedule")
                    nus = build_nusdata(noisy[sigma], sched)
                    if cfg.solver == "istd":
                        res = istd_reconstruct(nus, IstdConfig(maxt=cfg.maxt))
                    else:
                        res = l1_reconstruct(nus, L1SolverConfig(lam=cfg.lam, max_iters=cfg.l1_max_iters))
                    reports = [
                        dict(cls=r.peak_class, rlne=r.rlne, fit_a=r.fit_a, fit_b=r.fit_b, pearson_r=r.pearson_r)
                        for r in evaluate_spectrum(res.spectrum, reference, pl)
                    ]
                    iters, wall = res.iterations, res.wall_time
                    if on_spectrum is not None:
                        on_spectrum(trial, kind, rate, sigma, res.spectrum, pl)
                except Exception:
                    log.exception("trial %d: %s/%g/%g failed", trial, kind, rate, sigma)
                    reports, iters, wall = _nan_reports(), -1, math.nan
                for r in reports:
                    rows.append({**base, "class": r["cls"], "rlne": r["rlne"], "fit_a": r["fit_a"],
                                 "fit_b": r["fit_b"], "pearson_r": r["pearson_r"],
                                 "iterations": iters, "wall_time_s": wall})
    return rows


def _run_trial_star(args):
    return run_trial(*args)


def run_monte_carlo(cfg: MonteCarloConfig, progress=None, on_spectrum=None) -> list[dict]:
    """Rows for every trial, trial-major. ``cfg.workers > 1`` uses processes.

    ``on_spectrum`` (see :func:`run_trial`) needs ``workers == 1``.
    """
    jobs = [(cfg, t) for t in range(cfg.trials)]
    out = []
    if on_spectrum is not None and cfg.workers != 1:
        raise InvalidParameter("on_spectrum requires workers == 1")
    if cfg.workers == 1:
        for job in jobs:
            out.extend(run_trial(*job, on_spectrum=on_spectrum))
            if progress:
                progress(job[1])
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for t, rows in enumerate(pool.map(_run_trial_star, jobs)):
                out.extend(rows)
                if progress:
                    progress(t)
    return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows, include_wall_time=True) -> str:
    cols = CSV_COLUMNS if include_wall_time else CSV_COLUMNS[:-1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def write_results_csv(rows, path):
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_results_csv(path) -> list[dict]:
    ints = {"trial", "n", "iterations"}
    strs = {"schedule", "solver", "class"}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append({k: (int(v) if k in ints else v if k in strs else float(v)) for k, v in row.items()})
    return out


def summarize(rows) -> dict:
    """``{(schedule, rate, sigma, class): (mean_rlne, std_rlne, count)}``, NaNs skipped."""
    groups = {}
    for r in rows:
        groups.setdefault((r["schedule"], r["rate"], r["sigma"], r["class"]), []).append(r["rlne"])
    out = {}
    for key, vals in groups.items():
        v = np.asarray(vals, dtype=float)
        v = v[np.isfinite(v)]
        out[key] = (float(v.mean()) if v.size else math.nan, float(v.std()) if v.size else math.nan, int(v.size))
    return out


# --------------------------------------------------------------------------
# key = value config files

_TUPLE_FIELDS = {"nus_rates": float, "noise_sigmas": float, "schedules": str}


def parse_config(text: str, **overrides) -> MonteCarloConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment; lists are comma-separated.

    ``preset = full`` starts from the full 100-trial sweep instead of the
    desk-scale defaults. ``theta`` accepts ``pi`` and ``pi/2``.
    """
    kinds = {f.name: f.type for f in fields(MonteCarloConfig)}
    values = {}
    preset = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "preset":
            preset = val
            continue
        if key == "lambda":
            key = "lam"
        if key not in kinds:
            raise InvalidParameter(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _parse_value(key, val)
        except ValueError as exc:
            raise InvalidParameter(f"line {lineno}: bad value for {key}: {val!r}") from exc
    values.update(overrides)
    if preset is None:
        return MonteCarloConfig(**values)
    if preset != "full":
        raise InvalidParameter(f"unknown preset {preset!r}")
    return replace(MonteCarloConfig.full(), **values)


def _parse_value(key, val):
    if key in _TUPLE_FIELDS:
        conv = _TUPLE_FIELDS[key]
        return tuple(conv(v.strip()) for v in val.split(",") if v.strip())
    if key == "theta":
        return {"pi": math.pi, "pi/2": math.pi / 2}.get(val.replace(" ", ""), None) or float(val)
    if key == "solver":
        return val
    if key in ("lam", "decay_alpha"):
        return float(val)
    return int(val)


def format_config(cfg: MonteCarloConfig) -> str:
    lines = []
    for k, v in asdict(cfg).items():
        if isinstance(v, (tuple, list)):
            v = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{'lambda' if k == 'lam' else k} = {v}")
    return "\n".join(lines) + "\n"
