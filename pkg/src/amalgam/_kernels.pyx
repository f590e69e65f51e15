# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil kernels.

Every routine here has a pure-numpy twin in :mod:`amalgam._fallback` with the
same signature and the same per-center accumulation order.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, INFINITY

cnp.import_array()


def stencil_cumsum(const double[:, ::1] src,
                   const Py_ssize_t[:, ::1] offsets,
                   const double[::1] coeffs,
                   const Py_ssize_t[::1] stops,
                   const Py_ssize_t[:, ::1] centers):
    cdef Py_ssize_t n0 = src.shape[0], n1 = src.shape[1]
    cdef Py_ssize_t K = offsets.shape[0], S = stops.shape[0], M = centers.shape[0]
    out_arr = np.zeros((S, M), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t m, k, s, i, j, c0, c1
    cdef double acc
    for m in range(M):
        c0 = centers[m, 0]
        c1 = centers[m, 1]
        acc = 0.0
        s = 0
        for k in range(K):
            while s < S and stops[s] == k:
                out[s, m] = acc
                s += 1
            i = c0 + offsets[k, 0]
            j = c1 + offsets[k, 1]
            if 0 <= i < n0 and 0 <= j < n1:
                acc = acc + coeffs[k] * src[i, j]
        while s < S:
            out[s, m] = acc
            s += 1
    return out_arr


def stencil_max(const double[:, ::1] src,
                const Py_ssize_t[:, ::1] offsets,
                const Py_ssize_t[:, ::1] centers):
    cdef Py_ssize_t n0 = src.shape[0], n1 = src.shape[1]
    cdef Py_ssize_t K = offsets.shape[0], M = centers.shape[0]
    out_arr = np.empty(M, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t m, k, i, j
    cdef double best, val
    for m in range(M):
        best = -INFINITY
        for k in range(K):
            i = centers[m, 0] + offsets[k, 0]
            j = centers[m, 1] + offsets[k, 1]
            if 0 <= i < n0 and 0 <= j < n1:
                val = src[i, j]
                if val > best:
                    best = val
        out[m] = best
    return out_arr


def level_sweep(const double[:, ::1] weight,
                const double[:, ::1] den,
                const double[:, ::1] outer,
                const Py_ssize_t[:, ::1] order,
                const Py_ssize_t[::1] counts,
                const Py_ssize_t[:, ::1] offsets,
                double p,
                double q):
    cdef Py_ssize_t n0 = weight.shape[0], n1 = weight.shape[1]
    cdef Py_ssize_t K = offsets.shape[0], S = counts.shape[0]
    cdef bint sup_norm = q == INFINITY
    cdef double expo = 1.0 / p if sup_norm else q / p
    num_arr = np.zeros((n0, n1), dtype=np.float64)
    term_arr = np.zeros((n0, n1), dtype=np.float64)
    cdef double[:, ::1] num = num_arr
    cdef double[:, ::1] term = term_arr
    out_arr = np.empty(S, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t s, k, i, j, y0, y1, ptr = 0
    cdef double wy, new, total = 0.0, best = 0.0
    for s in range(S):
        while ptr < counts[s]:
            y0 = order[ptr, 0]
            y1 = order[ptr, 1]
            wy = weight[y0, y1]
            for k in range(K):
                i = y0 + offsets[k, 0]
                j = y1 + offsets[k, 1]
                if 0 <= i < n0 and 0 <= j < n1:
                    num[i, j] = num[i, j] + wy
                    new = pow(num[i, j] / den[i, j], expo)
                    if sup_norm:
                        if new > best:
                            best = new
                    else:
                        new = new * outer[i, j]
                        total = total + (new - term[i, j])
                        term[i, j] = new
            ptr += 1
        if sup_norm:
            out[s] = best
        else:
            out[s] = pow(total, 1.0 / q)
    return out_arr
