# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: popcount edge counting, GF(2) rank, Jacobi rotations."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt, copysign

cdef extern from *:
    """
    static inline unsigned long long _rp_popcountll(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    """
    unsigned long long _rp_popcountll(unsigned long long x) nogil

BACKEND = "cython"


def popcount_rows(const cnp.uint64_t[:, ::1] rows not None):
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t w = rows.shape[1]
    out_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef unsigned long long acc
    with nogil:
        for i in range(n):
            acc = 0
            for j in range(w):
                acc += _rp_popcountll(rows[i, j])
            out[i] = <cnp.int64_t> acc
    return out_arr


def mask_popcount(const cnp.uint64_t[::1] mask not None):
    cdef Py_ssize_t w = mask.shape[0]
    cdef Py_ssize_t j
    cdef unsigned long long acc = 0
    with nogil:
        for j in range(w):
            acc += _rp_popcountll(mask[j])
    return int(acc)


def count_edges(const cnp.uint64_t[:, ::1] bits not None,
                const cnp.int64_t[::1] row_idx not None,
                const cnp.uint64_t[::1] mask not None):
    cdef Py_ssize_t k = row_idx.shape[0]
    cdef Py_ssize_t w = bits.shape[1]
    cdef Py_ssize_t i, j
    cdef Py_ssize_t r
    cdef unsigned long long acc = 0
    with nogil:
        for i in range(k):
            r = <Py_ssize_t> row_idx[i]
            for j in range(w):
                acc += _rp_popcountll(bits[r, j] & mask[j])
    return int(acc)


def block_degree_matrix(const cnp.uint64_t[:, ::1] bits not None,
                        const cnp.uint64_t[:, ::1] masks not None):
    cdef Py_ssize_t n = bits.shape[0]
    cdef Py_ssize_t w = bits.shape[1]
    cdef Py_ssize_t k = masks.shape[0]
    out_arr = np.empty((n, k), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, b
    cdef unsigned long long acc
    with nogil:
        for i in range(n):
            for b in range(k):
                acc = 0
                for j in range(w):
                    acc += _rp_popcountll(bits[i, j] & masks[b, j])
                out[i, b] = <cnp.int64_t> acc
    return out_arr


def gf2_rank(const cnp.uint64_t[:, ::1] rows not None):
    cdef Py_ssize_t r = rows.shape[0]
    cdef Py_ssize_t w = rows.shape[1]
    work_arr = np.array(rows, dtype=np.uint64, copy=True)
    cdef cnp.uint64_t[:, ::1] work = work_arr
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t i, j, col, word, pivot
    cdef unsigned long long bit
    cdef Py_ssize_t ncols = w * 64
    with nogil:
        for col in range(ncols):
            word = col >> 6
            bit = (<unsigned long long> 1) << (col & 63)
            pivot = -1
            for i in range(rank, r):
                if work[i, word] & bit:
                    pivot = i
                    break
            if pivot < 0:
                continue
            for j in range(w):
                work[pivot, j], work[rank, j] = work[rank, j], work[pivot, j]
            for i in range(r):
                if i != rank and (work[i, word] & bit):
                    for j in range(w):
                        work[i, j] ^= work[rank, j]
            rank += 1
            if rank == r:
                break
    return int(rank)


def jacobi_eigh(a_in, double tol, int max_sweeps):
    a_arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a_arr.shape[0]
    v_arr = np.eye(n, dtype=np.float64)
    if n < 2:
        return np.diag(a_arr).copy(), v_arr, 0.0, 0
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, i, sweeps
    cdef double off, apq, app, aqq, theta, t, c, s, xp, xq, thresh

    def _off():
        o = a_arr - np.diag(np.diag(a_arr))
        return float(np.sqrt((o * o).sum()))

    sweeps = 0
    off = _off()
    while off > tol:
        if sweeps >= max_sweeps:
            raise RuntimeError(
                f"jacobi did not converge: off-diagonal norm {off:.3e} > {tol:.3e} "
                f"after {sweeps} sweeps"
            )
        thresh = tol / (1 if n < 1 else n)
        with nogil:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if fabs(apq) <= thresh:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    theta = (aqq - app) / (2.0 * apq)
                    t = copysign(1.0, theta) / (fabs(theta) + sqrt(1.0 + theta * theta))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for i in range(n):
                        xp = a[p, i]
                        xq = a[q, i]
                        a[p, i] = c * xp - s * xq
                        a[q, i] = s * xp + c * xq
                    for i in range(n):
                        xp = a[i, p]
                        xq = a[i, q]
                        a[i, p] = c * xp - s * xq
                        a[i, q] = s * xp + c * xq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for i in range(n):
                        xp = v[i, p]
                        xq = v[i, q]
                        v[i, p] = c * xp - s * xq
                        v[i, q] = s * xp + c * xq
        sweeps += 1
        off = _off()
    return np.diag(a_arr).copy(), v_arr, off, sweeps
