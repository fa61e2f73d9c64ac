# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise Gaussian kernels.

Same call contract as ``modehunt._numpy_core``; see that module for the
semantics of each function.  The mean-shift loop keeps an active set and
skips kernel terms more than e^-60 below the dominant one, which cannot
change a double-precision sum.
"""

from libc.math cimport exp, sqrt

import numpy as np

BACKEND_NAME = "c"

# 0.5 * smin beyond this value means every kernel weight underflows a double
cdef double _UNDERFLOW_HALF_EXP = 745.0
# relative log-weight cutoff: terms below exp(-60) of the max are dropped
cdef double _REL_CUTOFF = 120.0


def density(const double[:, ::1] data, const double[:, ::1] queries, double h):
    cdef Py_ssize_t n = data.shape[0], d = data.shape[1]
    cdef Py_ssize_t m = queries.shape[0]
    out = np.empty(m)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef double s, u, acc, inv_h = 1.0 / h
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(n):
                s = 0.0
                for k in range(d):
                    u = (queries[i, k] - data[j, k]) * inv_h
                    s += u * u
                acc += exp(-0.5 * s)
            ov[i] = acc
    return out * ((2.0 * np.pi) ** (-0.5 * d) / (n * h ** d))


def gradient(const double[:, ::1] data, const double[:, ::1] queries, double h):
    cdef Py_ssize_t n = data.shape[0], d = data.shape[1]
    cdef Py_ssize_t m = queries.shape[0]
    out = np.zeros((m, d))
    cdef double[:, ::1] ov = out
    cdef double[::1] u = np.empty(d)
    cdef Py_ssize_t i, j, k
    cdef double s, e, inv_h = 1.0 / h
    with nogil:
        for i in range(m):
            for j in range(n):
                s = 0.0
                for k in range(d):
                    u[k] = (queries[i, k] - data[j, k]) * inv_h
                    s += u[k] * u[k]
                e = exp(-0.5 * s)
                for k in range(d):
                    ov[i, k] += e * u[k]
    return out * (-((2.0 * np.pi) ** (-0.5 * d)) / (n * h ** (d + 1)))


def hessian(const double[:, ::1] data, const double[:, ::1] queries, double h):
    cdef Py_ssize_t n = data.shape[0], d = data.shape[1]
    cdef Py_ssize_t m = queries.shape[0]
    out = np.zeros((m, d, d))
    cdef double[:, :, ::1] ov = out
    cdef double[::1] u = np.empty(d)
    cdef Py_ssize_t i, j, k, l
    cdef double s, e, inv_h = 1.0 / h
    with nogil:
        for i in range(m):
            for j in range(n):
                s = 0.0
                for k in range(d):
                    u[k] = (queries[i, k] - data[j, k]) * inv_h
                    s += u[k] * u[k]
                e = exp(-0.5 * s)
                for k in range(d):
                    for l in range(k, d):
                        ov[i, k, l] += e * u[k] * u[l]
                    ov[i, k, k] -= e
            for k in range(d):
                for l in range(k):
                    ov[i, k, l] = ov[i, l, k]
    return out * ((2.0 * np.pi) ** (-0.5 * d) / (n * h ** (d + 2)))


def mean_shift(const double[:, ::1] data, const double[:, ::1] starts, double h,
               double step_tol, long max_iter):
    cdef Py_ssize_t n = data.shape[0], d = data.shape[1]
    cdef Py_ssize_t m = starts.shape[0]
    endpoints = np.array(starts, dtype=float, copy=True)
    n_iter = np.zeros(m, dtype=np.int64)
    status = np.ones(m, dtype=np.int8)
    cdef double[:, ::1] x = endpoints
    cdef long[::1] itv = n_iter
    cdef signed char[::1] stv = status
    cdef double[::1] s = np.empty(n)
    cdef double[::1] num = np.empty(d)
    cdef Py_ssize_t i, j, k
    cdef long t
    cdef double u, smin, e, wsum, step, diff, inv_h = 1.0 / h
    with nogil:
        for i in range(m):
            for t in range(max_iter):
                smin = 0.0
                for j in range(n):
                    s[j] = 0.0
                    for k in range(d):
                        u = (x[i, k] - data[j, k]) * inv_h
                        s[j] += u * u
                    if j == 0 or s[j] < smin:
                        smin = s[j]
                if 0.5 * smin > _UNDERFLOW_HALF_EXP:
                    stv[i] = 2
                    break
                wsum = 0.0
                for k in range(d):
                    num[k] = 0.0
                for j in range(n):
                    if s[j] - smin <= _REL_CUTOFF:
                        e = exp(-0.5 * (s[j] - smin))
                        wsum += e
                        for k in range(d):
                            num[k] += e * data[j, k]
                step = 0.0
                for k in range(d):
                    diff = num[k] / wsum - x[i, k]
                    step += diff * diff
                    x[i, k] = num[k] / wsum
                itv[i] += 1
                if sqrt(step) < step_tol:
                    stv[i] = 0
                    break
    return endpoints, n_iter, status


def gaussian_cross_sum(const double[:, ::1] a, const double[:, ::1] b, double scale):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], k = a.shape[1]
    cdef Py_ssize_t i, j, l
    cdef double s, u, acc = 0.0, inv_s = 1.0 / scale
    with nogil:
        for i in range(na):
            for j in range(nb):
                s = 0.0
                for l in range(k):
                    u = (a[i, l] - b[j, l]) * inv_s
                    s += u * u
                acc += exp(-0.5 * s)
    return acc * (2.0 * np.pi) ** (-0.5 * k) * scale ** (-k)


def gaussian_cross_matrix(const double[:, ::1] a, const double[:, ::1] b, double scale):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], k = a.shape[1]
    out = np.empty((na, nb))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, l
    cdef double s, u, inv_s = 1.0 / scale
    with nogil:
        for i in range(na):
            for j in range(nb):
                s = 0.0
                for l in range(k):
                    u = (a[i, l] - b[j, l]) * inv_s
                    s += u * u
                ov[i, j] = exp(-0.5 * s)
    out *= (2.0 * np.pi) ** (-0.5 * k) * scale ** (-k)
    return out
