# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled contraction kernels.

Same semantics as ``_contractions_py``; the loops are fused so the lag
sweeps make a single pass over the operands without temporaries.
"""

from libc.math cimport sqrt

import numpy as np


cdef double _shifted_sum(const double[:, ::1] a, const double[:, ::1] b,
                         Py_ssize_t dr, Py_ssize_t dc) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i0 = -dr if dr < 0 else 0
    cdef Py_ssize_t i1 = n - (dr if dr > 0 else 0)
    cdef Py_ssize_t j0 = -dc if dc < 0 else 0
    cdef Py_ssize_t j1 = n - (dc if dc > 0 else 0)
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    if i0 >= i1 or j0 >= j1:
        return 0.0
    for i in range(i0, i1):
        for j in range(j0, j1):
            acc += a[i, j] * b[i + dr, j + dc]
    return acc


def shifted_product_sum(a, b, dr, dc):
    """``sum_{i,j} a[i, j] * b[i + dr, j + dc]`` over in-range indices."""
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    return _shifted_sum(av, bv, dr, dc)


def xi_lag_sums(a, b, hmax):
    """Diagonal-shift sums ``sum a[i, j] b[i+h, j+h]`` for h = -hmax..hmax."""
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t hm = hmax
    out = np.zeros(2 * hm + 1)
    cdef double[::1] ov = out
    cdef Py_ssize_t h
    with nogil:
        for h in range(-hm, hm + 1):
            if h >= 0:
                ov[h + hm] = _shifted_sum(av, bv, h, h)
            else:
                ov[h + hm] = _shifted_sum(bv, av, -h, -h)
    return out


def diag_band_sums(a, lmax):
    """Superdiagonal sums ``sum_i a[i, i + l]`` for l = 0..lmax."""
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t lm = lmax
    out = np.zeros(lm + 1)
    cdef double[::1] ov = out
    cdef Py_ssize_t l, i
    cdef double acc
    with nogil:
        for l in range(lm + 1):
            if l >= n:
                break
            acc = 0.0
            for i in range(n - l):
                acc += av[i, i + l]
            ov[l] = acc
    return out


cdef double _tau_pos(const double[:, ::1] gx, const double[:, ::1] gy,
                     const double[::1] u, Py_ssize_t h) noexcept nogil:
    cdef Py_ssize_t s = gx.shape[0]
    cdef Py_ssize_t b = s - h
    cdef Py_ssize_t p, q
    cdef double acc = 0.0, row
    if b <= 0:
        return 0.0
    for p in range(b):
        row = 0.0
        for q in range(b):
            row += u[q] * gx[p, q] * gy[p + h, q + h]
        acc += u[p] * row
    return acc


def tau_raw_sums(gx, gy, n, hs):
    """Triangular-weighted contraction of two lag-overlap matrices; see the
    pure backend for the definition."""
    cdef double[:, ::1] gxv = np.ascontiguousarray(gx, dtype=np.float64)
    cdef double[:, ::1] gyv = np.ascontiguousarray(gy, dtype=np.float64)
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t s = 2 * nn - 1
    lags = np.arange(-(nn - 1), nn)
    c = 1.0 - np.abs(lags) / float(nn)
    hs_arr = np.asarray(list(hs), dtype=np.int64)
    out = np.empty(len(hs_arr))
    cdef double[::1] ov = out
    cdef long long[::1] hv = hs_arr
    cdef Py_ssize_t k, habs, b
    cdef double[::1] uv
    for k in range(hs_arr.shape[0]):
        habs = hv[k] if hv[k] >= 0 else -hv[k]
        if habs >= s:
            ov[k] = 0.0
            continue
        b = s - habs
        u = np.sqrt(c[:b] * c[habs : b + habs])
        uv = u
        if hv[k] >= 0:
            ov[k] = _tau_pos(gxv, gyv, uv, habs)
        else:
            ov[k] = _tau_pos(gyv, gxv, uv, habs)
    return out
