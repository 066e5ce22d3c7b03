"""Command-line interface.

Every subcommand writes into the directory given by ``--out`` (default
``.``) and leaves a ``manifest.json`` there describing the run. ``symnus
replay DIR/manifest.json`` re-executes it.

Exit codes: 0 success, 1 a requested check failed, 2 invalid parameters,
3 I/O failure, 4 file format violation.
"""

import argparse
import datetime
import json
import logging
import math
import os
import sys
from importlib import metadata

import numpy as np

from . import fileio
from .errors import DegenerateInput, FormatError, InvalidParameter
from .grid import asymmetry_residual, ft2d
from .metrics import compare_amplitudes, find_peaks, integrate_peaks, peak_amplitudes
from .montecarlo import parse_config, run_monte_carlo, summarize, write_results_csv
from .recon import IstdConfig, L1SolverConfig, istd_reconstruct, l1_reconstruct, write_trace_csv
from .sampling import KINDS, build_nusdata, count_from_rate, make_schedule
from .synth import NoiseSpec, add_noise, make_peaklist, normalize_max, synth_fid

EXIT_CHECK, EXIT_PARAM, EXIT_IO, EXIT_FORMAT = 1, 2, 3, 4
MANIFEST = "manifest.json"

log = logging.getLogger("symnus")


def _version():
    try:
        return metadata.version("symnus")
    except metadata.PackageNotFoundError:
        return "unknown"


def _theta(text):
    t = text.replace(" ", "").lower()
    if t == "pi":
        return math.pi
    if t == "pi/2":
        return math.pi / 2
    return float(text)


class _Run:
    """Collects what a command did so it can be written to the manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.out = args.out
        self.params = {}
        self.inputs = []
        self.outputs = []
        self.quiet = args.quiet

    def path(self, name):
        p = os.path.join(self.out, name)
        self.outputs.append(p)
        return p

    def say(self, msg):
        if not self.quiet:
            print(msg)

    def note(self, msg):
        if not self.quiet:
            print(msg, file=sys.stderr)

    def write_manifest(self):
        doc = {
            "command": self.args.command,
            "argv": self.argv,
            "cwd": os.getcwd(),
            "params": self.params,
            "seed": self.args.seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "version": _version(),
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        with open(os.path.join(self.out, MANIFEST), "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")


def cmd_schedule(run):
    a = run.args
    if (a.rate is None) == (a.count is None):
        raise InvalidParameter("give exactly one of --rate or --count")
    count = a.count if a.count is not None else count_from_rate(a.rate, a.n)
    sched = make_schedule(a.kind, a.n, count, a.theta, a.seed)
    run.params.update(kind=a.kind, n=a.n, rate=a.rate, count=count, theta=a.theta)
    fileio.write_schedule(run.path("schedule.txt"), sched)
    run.say(f"acquired={len(sched.acquired)} copies={len(sched.copy_map)}")


def cmd_synth(run):
    a = run.args
    pl = make_peaklist(a.n, a.n_diag, a.n_cross, decay_alpha=a.alpha, seed=a.seed)
    fid = normalize_max(synth_fid(pl))
    fid = add_noise(fid, NoiseSpec(a.sigma, a.seed))
    run.params.update(n=a.n, n_diag=a.n_diag, n_cross=a.n_cross, alpha=a.alpha, sigma=a.sigma)
    fileio.write_grid(run.path("fid.nusg"), fid)
    fileio.write_peaklist(run.path("peaks.txt"), pl)
    run.say(f"n={a.n} diag={a.n_diag} cross={a.n_cross} sigma={a.sigma!r}")


def cmd_sample(run):
    a = run.args
    fid = fileio.read_grid(a.fid)
    sched = fileio.read_schedule(a.schedule)
    run.inputs += [a.fid, a.schedule]
    nus = build_nusdata(fid, sched)
    fileio.write_nusdata(run.path("nus.nusd"), nus)
    run.say(f"r={nus.r} acquired={len(sched.acquired)}")


def cmd_reconstruct(run):
    a = run.args
    nus = fileio.read_nusdata(a.nus)
    run.inputs.append(a.nus)
    if a.solver == "istd":
        cfg = IstdConfig(maxt=a.maxt, eps=a.eps)
        res = istd_reconstruct(nus, cfg)
        value_name = "beta"
    else:
        cfg = L1SolverConfig(lam=a.lam, max_iters=a.max_iters, rel_obj_tol=a.rel_obj_tol)
        res = l1_reconstruct(nus, cfg)
        value_name = "objective"
    run.params.update(solver=a.solver, config=cfg.__dict__)
    fileio.write_grid(run.path("spectrum.nusg"), res.spectrum)
    if a.trace:
        write_trace_csv(run.path("trace.csv"), res, value_name)
    run.say(f"iterations={res.iterations} residual={res.final_residual!r}")
    run.note(f"wall_time={res.wall_time:.3f}s")


def _reference_cells(reference, floor_factor):
    cells = find_peaks(reference, floor_factor)
    diag = cells[cells[:, 0] == cells[:, 1]]
    cross = cells[cells[:, 0] != cells[:, 1]]
    return {"diag": diag, "cross": cross}


def cmd_eval(run):
    a = run.args
    spec = fileio.read_grid(a.spectrum)
    run.inputs.append(a.spectrum)
    status = 0
    if a.check_symmetry:
        peak = float(np.abs(spec).max())
        rel = asymmetry_residual(spec) / peak if peak > 0 else 0.0
        ok = rel <= a.tol
        run.say(f"asymmetry_residual_rel={rel!r} tol={a.tol!r} {'PASS' if ok else 'FAIL'}")
        status = 0 if ok else EXIT_CHECK
    if a.peaks is None and a.reference is None:
        if not a.check_symmetry:
            raise InvalidParameter("eval needs --peaks, --reference or --check-symmetry")
        return status

    if a.reference is not None:
        reference = fileio.read_grid(a.reference)
        run.inputs.append(a.reference)
    if a.peaks is not None:
        pl = fileio.read_peaklist(a.peaks)
        run.inputs.append(a.peaks)
        if a.reference is None:
            reference = ft2d(normalize_max(synth_fid(pl)))
        groups = {c: pl.cells(c) for c in ("diag", "cross")}
    else:
        groups = _reference_cells(reference, a.floor)
    if reference.shape != spec.shape:
        raise InvalidParameter(f"spectrum {spec.shape} and reference {reference.shape} differ in size")

    lines = ["class,n_peaks,rlne,fit_a,fit_b,pearson_r"]
    for cls, cells in groups.items():
        if len(cells) == 0:
            continue
        x = np.abs(reference[cells[:, 0], cells[:, 1]])
        x_hat = np.abs(spec[cells[:, 0], cells[:, 1]])
        try:
            rep = compare_amplitudes(x_hat, x, cls)
        except DegenerateInput as exc:
            run.note(f"{cls}: {exc}")
            continue
        lines.append(f"{cls},{len(cells)},{rep.rlne!r},{rep.fit_a!r},{rep.fit_b!r},{rep.pearson_r!r}")
    if a.window:
        run.params["window"] = a.window
        with open(run.path("peaks_integrated.csv"), "w") as fh:
            fh.write("i,j,integral\n")
            for (i, j), v in integrate_peaks(spec, a.window, a.floor):
                fh.write(f"{i},{j},{v!r}\n")
    with open(run.path("metrics.csv"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for line in lines:
        run.say(line)
    return status


def cmd_montecarlo(run):
    a = run.args
    with open(a.config) as fh:
        text = fh.read()
    run.inputs.append(a.config)
    overrides = {"workers": a.workers} if a.workers else {}
    if a.seed is not None:
        overrides["base_seed"] = a.seed
    cfg = parse_config(text, **overrides)
    run.params.update(config=cfg.__dict__)
    rows = run_monte_carlo(cfg, progress=lambda t: run.note(f"trial {t + 1}/{cfg.trials} done"))
    write_results_csv(rows, run.path("results.csv"))
    for (kind, rate, sigma, cls), (mean, std, cnt) in sorted(summarize(rows).items()):
        run.note(f"{kind:9s} rate={rate:.4f} sigma={sigma:.2e} {cls:5s} rlne={mean:.4f}+-{std:.4f} (n={cnt})")
    run.say(f"rows={len(rows)}")


def cmd_replay(args):
    with open(args.manifest) as fh:
        doc = json.load(fh)
    argv = list(doc["argv"])
    if args.out_override:
        out = os.path.abspath(args.out_override)
        argv = _set_flag(argv, "--out", out)
    here = os.getcwd()
    os.chdir(doc.get("cwd", here))
    try:
        return main(argv)
    finally:
        os.chdir(here)


def _set_flag(argv, flag, value):
    out, skip = [], False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == flag:
            skip = True
            continue
        if tok.startswith(flag + "="):
            continue
        out.append(tok)
    return out + [flag, value]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="PRNG seed (default 0)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    p = argparse.ArgumentParser(prog="symnus", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("schedule", parents=[common], help="generate a sampling schedule")
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--rate", type=float, help="acquired fraction of the grid (ceil to a count)")
    s.add_argument("--count", type=int, help="acquired points (symmetrical pairs for scpg)")
    s.add_argument("--theta", type=_theta, default=math.pi, help="pi or pi/2")
    s.set_defaults(func=cmd_schedule)

    s = sub.add_parser("synth", parents=[common], help="synthesize a symmetric FID")
    s.add_argument("--n", type=int, default=256)
    s.add_argument("--n-diag", type=int, default=25)
    s.add_argument("--n-cross", type=int, default=50)
    s.add_argument("--alpha", type=float, default=1e-3, help="decay per sample")
    s.add_argument("--sigma", type=float, default=0.0, help="noise std per component")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("sample", parents=[common], help="apply a schedule to a full FID")
    s.add_argument("--fid", required=True)
    s.add_argument("--schedule", required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("reconstruct", parents=[common], help="reconstruct a spectrum")
    s.add_argument("--nus", required=True)
    s.add_argument("--solver", choices=("istd", "l1"), default="istd")
    s.add_argument("--maxt", type=int, default=200)
    s.add_argument("--eps", type=float, default=None, help="residual tolerance (default 1e-6*|y|)")
    s.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    s.add_argument("--max-iters", type=int, default=20000)
    s.add_argument("--rel-obj-tol", type=float, default=1e-14)
    s.add_argument("--trace", action="store_true", help="also write trace.csv")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("eval", parents=[common], help="score a spectrum")
    s.add_argument("--spectrum", required=True)
    s.add_argument("--reference", help="reference spectrum (NUSG)")
    s.add_argument("--peaks", help="peak list manifest from synth")
    s.add_argument("--check-symmetry", action="store_true")
    s.add_argument("--tol", type=float, default=1e-10, help="relative symmetry tolerance")
    s.add_argument("--window", type=int, default=0, help="also integrate detected peaks over w x w")
    s.add_argument("--floor", type=float, default=5.0, help="peak floor in multiples of the median")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("montecarlo", parents=[common], help="run the schedule comparison sweep")
    s.add_argument("config", help="key = value config file")
    s.add_argument("--workers", type=int, default=0)
    s.set_defaults(func=cmd_montecarlo)

    s = sub.add_parser("replay", help="re-run a command from its manifest")
    s.add_argument("manifest")
    s.add_argument("--out", dest="out_override", default=None)
    s.set_defaults(func=None)
    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replay":
            return cmd_replay(args)
        seed_given = args.seed is not None
        if not seed_given and args.command != "montecarlo":
            args.seed = 0
        os.makedirs(args.out, exist_ok=True)
        run = _Run(args, argv)
        status = args.func(run) or 0
        run.write_manifest()
        return status
    except FormatError as exc:
        print(f"symnus: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (InvalidParameter, DegenerateInput) as exc:
        print(f"symnus: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"symnus: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
