"""On-disk formats.

``NUSG`` grid file::

    b"NUSG" | u32 n_rows | u32 n_cols | n_rows*n_cols x (f64 re, f64 im)

little-endian, elements in column-major order.

``NUSD`` NUS data file (same header idea plus an index block)::

    b"NUSD" | u32 n_rows | u32 n_cols | u32 r | r x u32 linear index | r x (f64 re, f64 im)

with linear index ``j * n_rows + i`` in strictly increasing order.

Text formats (schedule, peak list, grid debug dump) are documented on their
writers.
"""

import math
import struct

import numpy as np

from .errors import FormatError
from .sampling import NusData, Schedule, canonical_index, cells_from_index
from .synth import PeakList

GRID_MAGIC = b"NUSG"
NUS_MAGIC = b"NUSD"
_C16 = np.dtype("<c16")
_U32 = np.dtype("<u4")


def write_grid(path, g):
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim != 2:
        raise FormatError("only 2D grids can be written")
    with open(path, "wb") as fh:
        fh.write(GRID_MAGIC + struct.pack("<II", *g.shape))
        fh.write(g.ravel(order="F").astype(_C16).tobytes())


def read_grid(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != GRID_MAGIC:
        raise FormatError(f"{path}: not a NUSG grid file")
    if len(blob) < 12:
        raise FormatError(f"{path}: truncated header")
    rows, cols = struct.unpack_from("<II", blob, 4)
    body = blob[12:]
    if len(body) != rows * cols * 16:
        raise FormatError(f"{path}: expected {rows * cols} elements, found {len(body) / 16:g}")
    data = np.frombuffer(body, dtype=_C16).astype(np.complex128)
    return data.reshape((rows, cols), order="F")


def write_grid_text(path, g):
    """One ``row col re im`` line per element, column-major."""
    g = np.asarray(g, dtype=np.complex128)
    rows, cols = g.shape
    with open(path, "w") as fh:
        for j in range(cols):
            for i in range(rows):
                z = g[i, j]
                fh.write(f"{i} {j} {float(z.real)!r} {float(z.imag)!r}\n")


def read_grid_text(path) -> np.ndarray:
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 4:
                raise FormatError(f"{path}:{lineno}: expected 'row col re im'")
            try:
                entries.append((int(parts[0]), int(parts[1]), complex(float(parts[2]), float(parts[3]))))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
    if not entries:
        raise FormatError(f"{path}: empty grid")
    rows = max(e[0] for e in entries) + 1
    cols = max(e[1] for e in entries) + 1
    if len(entries) != rows * cols:
        raise FormatError(f"{path}: {len(entries)} entries do not fill a {rows}x{cols} grid")
    g = np.zeros((rows, cols), dtype=np.complex128)
    for i, j, z in entries:
        g[i, j] = z
    return g


def write_nusdata(path, nus: NusData):
    lin = canonical_index(nus.omega, nus.n)
    with open(path, "wb") as fh:
        fh.write(NUS_MAGIC + struct.pack("<III", nus.n, nus.n, nus.r))
        fh.write(lin.astype(_U32).tobytes())
        fh.write(nus.y.astype(_C16).tobytes())


def read_nusdata(path) -> NusData:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != NUS_MAGIC or len(blob) < 16:
        raise FormatError(f"{path}: not a NUSD file")
    rows, cols, r = struct.unpack_from("<III", blob, 4)
    if rows != cols:
        raise FormatError(f"{path}: NUS data must be square, got {rows}x{cols}")
    if len(blob) != 16 + 20 * r:
        raise FormatError(f"{path}: size does not match r={r}")
    lin = np.frombuffer(blob, dtype=_U32, count=r, offset=16).astype(np.int64)
    y = np.frombuffer(blob, dtype=_C16, count=r, offset=16 + 4 * r).astype(np.complex128)
    if r and (np.any(np.diff(lin) <= 0) or lin[-1] >= rows * cols):
        raise FormatError(f"{path}: index block not strictly increasing or out of range")
    return NusData(rows, cells_from_index(lin, rows), y)


def _fmt_theta(theta):
    return "none" if theta is None else repr(float(theta))


def write_schedule(path, sched: Schedule):
    """Text schedule.

    ``# kind=... n=... theta=... seed=... rate=...`` header, one ``i j``
    line per acquired point (0-based, canonical order) and, for SCPG, a
    ``# copies`` section of ``src_i src_j dst_i dst_j`` lines.
    """
    with open(path, "w") as fh:
        fh.write(
            f"# kind={sched.kind} n={sched.n} theta={_fmt_theta(sched.theta)} "
            f"seed={sched.seed} rate={sched.nominal_rate!r}\n"
        )
        for i, j in sched.acquired.tolist():
            fh.write(f"{i} {j}\n")
        if sched.kind == "scpg":
            fh.write("# copies\n")
            for row in sched.copy_map.tolist():
                fh.write("{} {} {} {}\n".format(*row))


def read_schedule(path) -> Schedule:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise FormatError(f"{path}: missing schedule header")
    try:
        meta = dict(tok.split("=", 1) for tok in lines[0][2:].split())
        kind, n, seed = meta["kind"], int(meta["n"]), int(meta["seed"])
        theta = None if meta.get("theta", "none") == "none" else float(meta["theta"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: bad header {lines[0]!r}") from exc
    acquired, copies = [], []
    section = acquired
    for lineno, line in enumerate(lines[1:], 2):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if s[1:].strip() == "copies":
                section = copies
            continue
        try:
            vals = [int(v) for v in s.split()]
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
        if len(vals) != (2 if section is acquired else 4):
            raise FormatError(f"{path}:{lineno}: wrong number of fields")
        section.append(vals)
    try:
        return Schedule(n, kind, np.array(acquired).reshape(-1, 2), np.array(copies).reshape(-1, 4), seed, theta)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_peaklist(path, pl: PeakList):
    """Text manifest: ``# seed=... alpha=... n=...`` then ``diag f d`` / ``cross f1 f2 c`` lines."""
    with open(path, "w") as fh:
        fh.write(f"# seed={pl.seed} alpha={pl.decay_alpha!r} n={pl.n}\n")
        for b, d in zip(pl.diag_bins.tolist(), pl.diag_amp.tolist()):
            fh.write(f"diag {b / pl.n!r} {d!r}\n")
        for (b1, b2), c in zip(pl.cross_bins.tolist(), pl.cross_amp.tolist()):
            fh.write(f"cross {b1 / pl.n!r} {b2 / pl.n!r} {c!r}\n")


def read_peaklist(path) -> PeakList:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError(f"{path}: missing peak list header")
    try:
        meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        n, seed, alpha = int(meta["n"]), int(meta["seed"]), float(meta["alpha"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: bad header") from exc
    db, da, cb, ca = [], [], [], []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "diag" and len(parts) == 3:
                db.append(_bin(float(parts[1]), n))
                da.append(float(parts[2]))
            elif parts[0] == "cross" and len(parts) == 4:
                cb.append((_bin(float(parts[1]), n), _bin(float(parts[2]), n)))
                ca.append(float(parts[3]))
            else:
                raise ValueError(f"unrecognized line {line!r}")
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
    return PeakList(n, db, da, np.array(cb).reshape(-1, 2), ca, alpha, seed)


def _bin(f, n):
    b = f * n
    if not math.isclose(b, round(b), abs_tol=1e-6):
        raise ValueError(f"frequency {f} is not on the 1/{n} grid")
    return int(round(b))
