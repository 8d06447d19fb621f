# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: subset enumeration, marginal entropies, pair sweeps.

Every function here has a drop-in twin in ``_pykernels.py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log

cnp.import_array()

SUBMODULAR = 0
POSIMODULAR = 1


def subset_sums(weights):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    out_arr = np.zeros(1 << n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, a, half
    for i in range(n):
        half = 1 << i
        for a in range(half):
            out[half + a] = out[a] + w[i]
    return out_arr


cdef inline long _compress_one(long o, long varmask, int n) nogil:
    cdef long idx = 0
    cdef int v, j = 0
    for v in range(n):
        if (varmask >> v) & 1:
            idx |= ((o >> v) & 1) << j
            j += 1
    return idx


def marginal_table(table, int n, long varmask):
    cdef const double[::1] p = np.ascontiguousarray(table, dtype=np.float64)
    cdef int k = 0, v
    for v in range(n):
        if (varmask >> v) & 1:
            k += 1
    out_arr = np.zeros(1 << k)
    cdef double[::1] out = out_arr
    cdef long o
    for o in range(1 << n):
        out[_compress_one(o, varmask, n)] += p[o]
    return out_arr


def marginal_entropy(table, int n, long varmask):
    if varmask == 0:
        return 0.0
    cdef double[::1] m = marginal_table(table, n, varmask)
    cdef double h = 0.0, q
    cdef Py_ssize_t i
    for i in range(m.shape[0]):
        q = m[i]
        if q > 0.0:
            h -= q * log(q)
    return h


def pair_violations(values, int n, int kind, double tol):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef long size = 1 << n
    cdef long a, b
    cdef double lhs, rhs
    out = []
    for a in range(size):
        for b in range(a, size):
            lhs = v[a] + v[b]
            if kind == SUBMODULAR:
                rhs = v[a | b] + v[a & b]
            else:
                rhs = v[a & ~b] + v[b & ~a]
            if lhs < rhs - tol:
                out.append((a, b, lhs, rhs))
    return out


def diminishing_returns_violations(values, int n, double tol):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef long b, a, bit
    cdef int x
    cdef double ra, rb
    out = []
    for b in range(1 << n):
        if b == (1 << n) - 1:
            continue
        a = b
        while True:
            for x in range(n):
                bit = 1 << x
                if b & bit:
                    continue
                ra = v[a | bit] - v[a]
                rb = v[b | bit] - v[b]
                if ra < rb - tol:
                    out.append((a, b, x, ra, rb))
            if a == 0:
                break
            a = (a - 1) & b
    return out


def symmetry_violations(values, int n, double tol):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef long full = (1 << n) - 1
    cdef long a, c
    cdef double d
    out = []
    for a in range(1 << n):
        c = full ^ a
        if a > c:
            continue
        d = v[a] - v[c]
        if d > tol or -d > tol:
            out.append((a, c, v[a], v[c]))
    return out
