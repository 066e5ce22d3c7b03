"""Seeded random streams.

Every random quantity in the package comes from a numpy ``Generator`` whose
seed is derived by hashing a tuple of parts, e.g. ``(base_seed, trial, "noise")``.
Two streams with different parts are statistically independent, and the
derivation does not depend on process, platform or execution order.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(*parts) -> int:
    """Hash ``parts`` into a 64-bit unsigned seed.

    Parts are rendered with ``repr`` so ``1`` and ``"1"`` give different seeds.
    """
    h = hashlib.blake2b(digest_size=8, person=b"symnus-rng")
    for p in parts:
        if isinstance(p, float):
            p = float(p).hex()
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little") & _MASK64


def make_rng(seed: int, *tags) -> np.random.Generator:
    """Generator for ``seed`` optionally split by ``tags``."""
    if tags:
        seed = derive_seed(int(seed), *tags)
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


class UniformStream:
    """Buffered source of U[0, 1) draws with a ``random()`` method.

    Python-level loops that need one uniform at a time (the Poisson gap
    process) are dominated by per-call overhead on a raw ``Generator``;
    pulling blocks keeps them fast while staying a pure function of the seed.
    """

    def __init__(self, rng: np.random.Generator, block: int = 4096):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block).tolist()
        self._pos = 0

    def random(self) -> float:
        if self._pos == self._block:
            self._buf = self._rng.random(self._block).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u
