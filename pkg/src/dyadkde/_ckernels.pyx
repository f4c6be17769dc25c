# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the numerical hot paths.

Mirrors ``_pykernels`` exactly; see that module for the contracts.
"""

import math

import numpy as np

from libc.math cimport fabs, log1p

BACKEND_NAME = "compiled"


cdef inline double _kval(double u, int kernel_id, double support_radius) noexcept nogil:
    cdef double a = fabs(u) / support_radius
    cdef double out
    if a > 1.0:
        return 0.0
    if kernel_id == 0:
        out = 0.75 * (1.0 - a * a)
    elif kernel_id == 1:
        out = 1.0 - a
    else:
        out = 0.5
    return out / support_radius


def kernel_sums_core(edge_i, edge_j, values, int n, double x, double h,
                     int kernel_id, double support_radius):
    """Per-edge kernel weights h^-1 K((x-v)/h), per-vertex row sums, total."""
    cdef const int[::1] ei = edge_i
    cdef const int[::1] ej = edge_j
    cdef const double[::1] vals = values
    cdef Py_ssize_t m = vals.shape[0]
    k_arr = np.empty(m, dtype=np.float64)
    row_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] k = k_arr
    cdef double[::1] row = row_arr
    cdef double inv_h = 1.0 / h
    cdef double total = 0.0
    cdef double kv
    cdef Py_ssize_t e
    with nogil:
        for e in range(m):
            kv = _kval((x - vals[e]) * inv_h, kernel_id, support_radius) * inv_h
            k[e] = kv
            row[ei[e]] += kv
            row[ej[e]] += kv
            total += kv
    return k_arr, row_arr, total


def density_grid(values, xs, double h, int kernel_id, double support_radius):
    """Sum of h^-1 K((x-v)/h) over all values, for each grid point x."""
    cdef const double[::1] vals = values
    cdef const double[::1] grid = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t m = vals.shape[0]
    cdef Py_ssize_t g = grid.shape[0]
    out_arr = np.zeros(g, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double inv_h = 1.0 / h
    cdef double acc, x
    cdef Py_ssize_t a, e
    with nogil:
        for a in range(g):
            x = grid[a]
            acc = 0.0
            for e in range(m):
                acc += _kval((x - vals[e]) * inv_h, kernel_id, support_radius)
            out[a] = acc * inv_h
    return out_arr


def el_solve(v):
    """Safeguarded-Newton solve of the EL dual; see _pykernels.el_solve."""
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t n = vv.shape[0]
    cdef Py_ssize_t i
    cdef double vmax = vv[0]
    cdef double vmin = vv[0]
    cdef double asum = 0.0
    cdef double g = 0.0
    for i in range(n):
        if vv[i] > vmax:
            vmax = vv[i]
        if vv[i] < vmin:
            vmin = vv[i]
        asum += fabs(vv[i])
        g += vv[i]
    if vmax == 0.0 and vmin == 0.0:
        return 0.0, 0.0
    if vmin >= 0.0 or vmax <= 0.0:
        return math.inf, math.nan
    if g == 0.0:
        return 0.0, 0.0
    cdef double gtol = 1e-10 * (1.0 + asum)
    cdef double shrink = 1.0 - 1e-12
    cdef double lo = (-1.0 / vmax) * shrink
    cdef double hi = (-1.0 / vmin) * shrink
    cdef double lam = 0.0
    if g > 0.0:
        lo = 0.0
    else:
        hi = 0.0
    cdef double w, gp, cand, t
    cdef int it
    with nogil:
        for it in range(500):
            g = 0.0
            gp = 0.0
            for i in range(n):
                w = 1.0 + lam * vv[i]
                t = vv[i] / w
                g += t
                gp -= t * t
            if fabs(g) <= gtol:
                break
            if g > 0.0:
                lo = lam
            else:
                hi = lam
            if hi - lo <= 1e-14:
                break
            cand = lam - g / gp
            if not (lo < cand < hi):
                cand = 0.5 * (lo + hi)
            lam = cand
    cdef double ell = 0.0
    for i in range(n):
        ell += log1p(lam * vv[i])
    return 2.0 * ell, lam
