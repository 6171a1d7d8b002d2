# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: cosine-series evaluation, uniform-grid cubic
interpolation and the fused oscillatory quadrature loop.

Semantics mirror ``_kernels_py`` (the NumPy fallback); the payoff here is
streaming the quadrature samples instead of materializing them.
"""

from libc.math cimport ceil, cos, fabs, floor, fmod

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF TWO_PI = 6.283185307179586476925286766559


cdef double _cos_series_point(const double[::1] c, double t) nogil:
    cdef Py_ssize_t d = c.shape[0]
    cdef double u = fmod(t, 1.0)
    cdef double acc = c[0]
    cdef double c1, prev, cur, nxt
    cdef Py_ssize_t k
    if d == 1:
        return acc
    c1 = cos(TWO_PI * u)
    prev = 1.0
    cur = c1
    acc += 2.0 * c[1] * cur
    for k in range(2, d):
        nxt = 2.0 * c1 * cur - prev
        prev = cur
        cur = nxt
        acc += 2.0 * c[k] * cur
    return acc


cdef double _cubic_point(const double[::1] tab, double x0, double dx, double x) nogil:
    cdef Py_ssize_t n = tab.shape[0]
    cdef double pos = (x - x0) / dx
    cdef Py_ssize_t i = <Py_ssize_t> floor(pos)
    if i < 1:
        i = 1
    elif i > n - 3:
        i = n - 3
    cdef double lam = pos - i
    cdef double p0 = tab[i - 1], p1 = tab[i], p2 = tab[i + 1], p3 = tab[i + 2]
    return 0.5 * (2.0 * p1 + lam * ((p2 - p0)
                  + lam * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3)
                           + lam * (3.0 * (p1 - p2) + p3 - p0))))


def cos_series_eval(cnp.ndarray half_coeffs, cnp.ndarray ts):
    cdef const double[::1] c = np.ascontiguousarray(half_coeffs, dtype=np.float64)
    arr = np.ascontiguousarray(ts, dtype=np.float64)
    cdef const double[::1] flat = arr.reshape(-1)
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(flat.shape[0]):
            o[i] = _cos_series_point(c, flat[i])
    return out.reshape(arr.shape)


def cubic_interp(cnp.ndarray table, double x0, double dx, cnp.ndarray xs):
    cdef const double[::1] tab = np.ascontiguousarray(table, dtype=np.float64)
    arr = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] flat = arr.reshape(-1)
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(flat.shape[0]):
            o[i] = _cubic_point(tab, x0, dx, flat[i])
    return out.reshape(arr.shape)


def fused_sq_mass(cnp.ndarray half_coeffs, double freq, double inv_l,
                  cnp.ndarray table, double x0, double dx,
                  cnp.ndarray piece_los, cnp.ndarray piece_his, double max_step):
    """Composite Simpson of (P(freq*t)*env(|t|*inv_l)*inv_l)^2 over pieces.

    Returns (mass, n_points, n_points_beyond_table).
    """
    cdef const double[::1] c = np.ascontiguousarray(half_coeffs, dtype=np.float64)
    cdef const double[::1] tab = np.ascontiguousarray(table, dtype=np.float64)
    cdef const double[::1] los = np.ascontiguousarray(piece_los, dtype=np.float64)
    cdef const double[::1] his = np.ascontiguousarray(piece_his, dtype=np.float64)
    cdef double s_hi = x0 + (tab.shape[0] - 2) * dx
    cdef double total = 0.0
    cdef long long n_pts = 0, n_clamped = 0
    cdef Py_ssize_t p, i
    cdef long long m
    cdef double lo, ln, h, acc, t, s, val, w
    with nogil:
        for p in range(los.shape[0]):
            lo = los[p]
            ln = his[p] - lo
            m = 2 * <long long> ceil(ln / (2.0 * max_step)) + 1
            if m < 5:
                m = 5
            h = ln / (m - 1)
            acc = 0.0
            for i in range(m):
                t = lo + i * h
                s = fabs(t * inv_l)
                if s > s_hi:
                    n_clamped += 1
                val = _cos_series_point(c, freq * t) * _cubic_point(tab, x0, dx, s) * inv_l
                if i == 0 or i == m - 1:
                    w = 1.0
                elif i % 2 == 1:
                    w = 4.0
                else:
                    w = 2.0
                acc += w * val * val
            total += acc * h / 3.0
            n_pts += m
    return total, n_pts, n_clamped
