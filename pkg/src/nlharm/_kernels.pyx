# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot stencil and constraint loops.

The floating-point accumulation order matches _kernels_py exactly so the two
backends produce bit-identical results.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "cython"


def coboundary_apply(double[:, ::1] vals, double[:, ::1] out,
                     cnp.int64_t[::1] term_t, cnp.int64_t[::1] term_s,
                     cnp.int64_t[::1] term_axis, double[::1] term_sign,
                     cnp.int64_t[:, ::1] idx_plus):
    cdef Py_ssize_t r, p
    cdef Py_ssize_t R = term_t.shape[0]
    cdef Py_ssize_t M = vals.shape[1]
    cdef Py_ssize_t t, s, a
    cdef double g
    for r in range(R):
        t = term_t[r]
        s = term_s[r]
        a = term_axis[r]
        g = term_sign[r]
        for p in range(M):
            out[t, p] += g * (vals[s, idx_plus[a, p]] - vals[s, p])
    return np.asarray(out)


def coboundary_transpose_apply(double[:, ::1] vals, double[:, ::1] out,
                               cnp.int64_t[::1] term_t, cnp.int64_t[::1] term_s,
                               cnp.int64_t[::1] term_axis, double[::1] term_sign,
                               cnp.int64_t[:, ::1] idx_minus):
    cdef Py_ssize_t r, p
    cdef Py_ssize_t R = term_t.shape[0]
    cdef Py_ssize_t M = vals.shape[1]
    cdef Py_ssize_t t, s, a
    cdef double g
    for r in range(R):
        t = term_t[r]
        s = term_s[r]
        a = term_axis[r]
        g = term_sign[r]
        for p in range(M):
            out[s, p] += g * (vals[t, idx_minus[a, p]] - vals[t, p])
    return np.asarray(out)


def pf4(double[:, ::1] Z, double[::1] out):
    cdef Py_ssize_t p
    cdef Py_ssize_t M = Z.shape[0]
    cdef double acc
    for p in range(M):
        acc = Z[p, 3] * Z[p, 12]
        acc = acc - Z[p, 5] * Z[p, 10]
        acc = acc + Z[p, 9] * Z[p, 6]
        out[p] = acc
    return np.asarray(out)


def pf_polar4(double[:, ::1] Z, double[:, ::1] V, double[::1] out):
    cdef Py_ssize_t p
    cdef Py_ssize_t M = Z.shape[0]
    cdef double acc
    for p in range(M):
        acc = Z[p, 3] * V[p, 12]
        acc = acc + V[p, 3] * Z[p, 12]
        acc = acc - Z[p, 5] * V[p, 10]
        acc = acc - V[p, 5] * Z[p, 10]
        acc = acc + Z[p, 9] * V[p, 6]
        acc = acc + V[p, 9] * Z[p, 6]
        out[p] = acc
    return np.asarray(out)
