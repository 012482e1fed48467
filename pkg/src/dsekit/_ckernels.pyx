# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Must stay numerically interchangeable with _pykernels."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def sq_distances(const double[:, ::1] X, const double[:, ::1] C):
    cdef Py_ssize_t m = X.shape[0], k = C.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double acc, diff
    out = np.empty((m, k), dtype=np.float64)
    cdef double[:, ::1] D = out
    with nogil:
        for i in range(m):
            for j in range(k):
                acc = 0.0
                for t in range(d):
                    diff = X[i, t] - C[j, t]
                    acc = acc + diff * diff
                D[i, j] = acc
    return out


def kendall_counts(const double[::1] x, const double[::1] y):
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef long long conc = 0, disc = 0, tied = 0
    cdef double dx, dy
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                dx = x[i] - x[j]
                dy = y[i] - y[j]
                if dx == 0.0 or dy == 0.0:
                    tied += 1
                elif (dx > 0.0) == (dy > 0.0):
                    conc += 1
                else:
                    disc += 1
    return int(conc), int(disc), int(tied)
