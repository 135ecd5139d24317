# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled assignment kernels.

Same contract as almqr._kernels_py; the solver is an identical
shortest-augmenting-path implementation, written with C buffers so the
Monte Carlo verifiers can call it millions of times.
"""

from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef double INF = float("inf")


cdef double _solve(const double* cost, Py_ssize_t d, long* col_of_row) nogil:
    # Shortest augmenting path with potentials; column 0 is the virtual root.
    cdef double* u
    cdef double* v
    cdef double* minv
    cdef long* p
    cdef long* way
    cdef char* used
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur, total

    u = <double*> malloc((d + 1) * sizeof(double))
    v = <double*> malloc((d + 1) * sizeof(double))
    minv = <double*> malloc((d + 1) * sizeof(double))
    p = <long*> malloc((d + 1) * sizeof(long))
    way = <long*> malloc((d + 1) * sizeof(long))
    used = <char*> malloc((d + 1) * sizeof(char))

    for j in range(d + 1):
        u[j] = 0.0
        v[j] = 0.0
        p[j] = 0
        way[j] = 0

    for i in range(1, d + 1):
        p[0] = i
        j0 = 0
        for j in range(d + 1):
            minv[j] = INF
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            delta = INF
            j1 = -1
            for j in range(1, d + 1):
                if used[j]:
                    continue
                cur = cost[(i0 - 1) * d + (j - 1)] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(d + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break

    for j in range(1, d + 1):
        col_of_row[p[j] - 1] = j - 1
    total = 0.0
    for i in range(d):
        total += cost[i * d + col_of_row[i]]

    free(u)
    free(v)
    free(minv)
    free(p)
    free(way)
    free(used)
    return total


cdef inline double _sqdiff(const double* a, const double* b, Py_ssize_t n) nogil:
    cdef Py_ssize_t k
    cdef double s = 0.0, t
    for k in range(n):
        t = a[k] - b[k]
        s += t * t
    return s


cdef double _dist_sq(const double* P, const double* Q, Py_ssize_t d, Py_ssize_t n,
                     double* scratch, long* perm) nogil:
    cdef Py_ssize_t i, j
    cdef double s, t
    if d == 1:
        return _sqdiff(P, Q, n)
    if d == 2:
        s = _sqdiff(P, Q, n) + _sqdiff(P + n, Q + n, n)
        t = _sqdiff(P, Q + n, n) + _sqdiff(P + n, Q, n)
        return s if s < t else t
    for i in range(d):
        for j in range(d):
            scratch[i * d + j] = _sqdiff(P + i * n, Q + j * n, n)
    return _solve(scratch, d, perm)


def solve_assignment(cost):
    """Minimum-cost perfect matching; returns (value, col_of_row)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] C = \
        np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t d = C.shape[0]
    if C.shape[1] != d:
        raise ValueError("cost matrix must be square")
    cdef cnp.ndarray[long, ndim=1] perm = np.empty(d, dtype=np.int_)
    if d == 0:
        return 0.0, perm.astype(np.int64)
    cdef double value
    with nogil:
        value = _solve(&C[0, 0], d, <long*> perm.data)
    return float(value), perm.astype(np.int64)


def assignment_value(cost):
    """Minimum assignment cost without the matching."""
    return solve_assignment(cost)[0]


def dist_sq(P, Q):
    """Squared assignment distance between two expanded tuples of shape (d, n)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Pa = \
        np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Qa = \
        np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t d = Pa.shape[0]
    cdef Py_ssize_t n = Pa.shape[1]
    cdef double* scratch = NULL
    cdef long* perm = NULL
    cdef double out
    if d > 2:
        scratch = <double*> malloc(d * d * sizeof(double))
        perm = <long*> malloc(d * sizeof(long))
    with nogil:
        out = _dist_sq(&Pa[0, 0], &Qa[0, 0], d, n, scratch, perm)
    if d > 2:
        free(scratch)
        free(perm)
    return float(out)


def dist_sq_one_to_many(P, Qs):
    """Squared assignment distances from one (d, n) tuple to a batch (m, d, n)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Pa = \
        np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] Qa = \
        np.ascontiguousarray(Qs, dtype=np.float64)
    cdef Py_ssize_t m = Qa.shape[0]
    cdef Py_ssize_t d = Pa.shape[0]
    cdef Py_ssize_t n = Pa.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef double* scratch = NULL
    cdef long* perm = NULL
    cdef Py_ssize_t i
    if d > 2:
        scratch = <double*> malloc(d * d * sizeof(double))
        perm = <long*> malloc(d * sizeof(long))
    with nogil:
        for i in range(m):
            out[i] = _dist_sq(&Pa[0, 0], &Qa[i, 0, 0], d, n, scratch, perm)
    if d > 2:
        free(scratch)
        free(perm)
    return out


def dist_sq_pairs(Ps, Qs):
    """Squared assignment distances between paired batches (m, d, n)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] Pa = \
        np.ascontiguousarray(Ps, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] Qa = \
        np.ascontiguousarray(Qs, dtype=np.float64)
    cdef Py_ssize_t m = Pa.shape[0]
    cdef Py_ssize_t d = Pa.shape[1]
    cdef Py_ssize_t n = Pa.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef double* scratch = NULL
    cdef long* perm = NULL
    cdef Py_ssize_t i
    if d > 2:
        scratch = <double*> malloc(d * d * sizeof(double))
        perm = <long*> malloc(d * sizeof(long))
    with nogil:
        for i in range(m):
            out[i] = _dist_sq(&Pa[i, 0, 0], &Qa[i, 0, 0], d, n, scratch, perm)
    if d > 2:
        free(scratch)
        free(perm)
    return out
