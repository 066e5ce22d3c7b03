"""Slow, independent reference computations used by several test modules."""

import numpy as np


def dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def dense_forward(nus):
    """Explicit matrix of X -> P_omega ift2d(X) acting on column-major vec(X)."""
    n = nus.n
    Fh = dft_matrix(n).conj()
    # ift2d(X) = Fh X Fh^T, so vec(ift2d X) = (Fh kron Fh) vec(X) in column-major
    big = np.kron(Fh, Fh)
    lin = nus.omega[:, 1] * n + nus.omega[:, 0]
    return big[lin]


def soft(z, t):
    mag = np.abs(z)
    return np.where(mag > t, z * (1 - t / np.maximum(mag, 1e-300)), 0)


def plain_prox_gradient(A, y, lam, iters=100_000):
    x = np.zeros(A.shape[1], complex)
    Ah = A.conj().T
    for _ in range(iters):
        x = soft(x - Ah @ (A @ x - y), lam)
    return x


def objective(A, y, x, lam):
    r = A @ x - y
    return 0.5 * np.vdot(r, r).real + lam * np.abs(x).sum()
