"""Pure-Python (numpy) versions of the hot kernels in ``_core.pyx``.

Both modules expose the same functions with the same semantics; the
compiled one is selected at import time in :mod:`distorder._backend`.
"""

from __future__ import annotations

import numpy as np


def causal_conv(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """y[i] = sum_{m <= i} a[m] x[i - m] for i < len(x)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    y = np.zeros(n)
    for i in range(n):
        m = min(i + 1, a.shape[0])
        y[i] = np.dot(a[:m], x[i::-1][:m])
    return y


def volterra_march(w: np.ndarray, lam_h: float, u0: float) -> np.ndarray:
    """Implicit product-integration march for sum_j w[i-j-1] (u[j+1] - u[j]) = lam_h u[i].

    Returns u[0..n] with n = len(w); u[0] = u0.
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    n = w.shape[0]
    u = np.empty(n + 1)
    du = np.empty(n)
    u[0] = u0
    pivot = w[0] - lam_h
    for i in range(1, n + 1):
        # history: sum_{j=0}^{i-2} w[i-j-1] du[j]
        hist = np.dot(w[i - 1 : 0 : -1], du[: i - 1]) if i > 1 else 0.0
        u[i] = (w[0] * u[i - 1] - hist) / pivot
        du[i - 1] = u[i] - u[i - 1]
    return u


def tril_toeplitz_inv(cols: np.ndarray) -> np.ndarray:
    """First columns of the inverses of lower-triangular Toeplitz matrices.

    ``cols`` has shape (batch, n); row b is the first column of matrix b.
    """
    c = np.ascontiguousarray(cols, dtype=np.float64)
    batch, n = c.shape
    b = np.zeros_like(c)
    inv0 = 1.0 / c[:, 0]
    b[:, 0] = inv0
    for k in range(1, n):
        s = np.zeros(batch)
        for j in range(1, k + 1):
            s += c[:, j] * b[:, k - j]
        b[:, k] = -s * inv0
    return b
