# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_fallback.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def causal_conv(a, x):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], na = av.shape[0], i, m, top
    cdef double acc
    y = np.zeros(n)
    cdef double[::1] yv = y
    for i in range(n):
        top = i + 1 if i + 1 < na else na
        acc = 0.0
        for m in range(top):
            acc += av[m] * xv[i - m]
        yv[i] = acc
    return y


def volterra_march(w, double lam_h, double u0):
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = wv.shape[0], i, j
    cdef double hist, pivot = wv[0] - lam_h
    u = np.empty(n + 1)
    du = np.empty(n)
    cdef double[::1] uv = u
    cdef double[::1] dv = du
    uv[0] = u0
    for i in range(1, n + 1):
        hist = 0.0
        for j in range(i - 1):
            hist += wv[i - j - 1] * dv[j]
        uv[i] = (wv[0] * uv[i - 1] - hist) / pivot
        dv[i - 1] = uv[i] - uv[i - 1]
    return u


def tril_toeplitz_inv(cols):
    cdef const double[:, ::1] c = np.ascontiguousarray(cols, dtype=np.float64)
    cdef Py_ssize_t batch = c.shape[0], n = c.shape[1], p, k, j
    cdef double s, inv0
    b = np.zeros((batch, n))
    cdef double[:, ::1] bv = b
    for p in range(batch):
        inv0 = 1.0 / c[p, 0]
        bv[p, 0] = inv0
        for k in range(1, n):
            s = 0.0
            for j in range(1, k + 1):
                s += c[p, j] * bv[p, k - j]
            bv[p, k] = -s * inv0
    return b
