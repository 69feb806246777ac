# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: discordance counting and lagged score products."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef long long _merge_count(long long *b, long long *buf, Py_ssize_t n) noexcept nogil:
    cdef long long inv = 0
    cdef Py_ssize_t width = 1, lo, mid, hi, i, j, k
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if b[j] < b[i]:
                    buf[k] = b[j]
                    inv += mid - i
                    j += 1
                else:
                    buf[k] = b[i]
                    i += 1
                k += 1
            while i < mid:
                buf[k] = b[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = b[j]
                j += 1
                k += 1
            for k in range(lo, hi):
                b[k] = buf[k]
            lo += 2 * width
        width *= 2
    return inv


def count_discordances(a, b):
    """Pairs ``i < j`` with ``(a_i - a_j)(b_i - b_j) < 0``; entries distinct."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bs = np.ascontiguousarray(
        np.asarray(b, dtype=np.int64)[np.argsort(np.asarray(a), kind="stable")]
    )
    cdef Py_ssize_t n = bs.shape[0]
    if n < 2:
        return 0
    cdef long long *buf = <long long *> malloc(n * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    cdef long long inv
    try:
        with nogil:
            inv = _merge_count(<long long *> bs.data, buf, n)
    finally:
        free(buf)
    return int(inv)


def batch_discordances(A, B):
    """Row-wise :func:`count_discordances` for positive-integer rank rows.

    Rows are ordered by ``A`` with a counting-sort scatter, so entries of
    ``A`` must be distinct positive integers within each row.
    """
    cdef cnp.int64_t[:, ::1] a = np.ascontiguousarray(A, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] b = np.ascontiguousarray(B, dtype=np.int64)
    cdef Py_ssize_t rows = a.shape[0], m = a.shape[1], r, i, j
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(rows, dtype=np.int64)
    if m < 2:
        return out
    cdef long long top = int(np.max(A)) if rows else 0
    if rows and int(np.min(A)) < 1:
        raise ValueError("A must hold positive integers")
    cdef long long *slot = <long long *> malloc((top + 1) * sizeof(long long))
    cdef long long *seq = <long long *> malloc(m * sizeof(long long))
    cdef long long *buf = <long long *> malloc(m * sizeof(long long))
    if slot == NULL or seq == NULL or buf == NULL:
        free(slot)
        free(seq)
        free(buf)
        raise MemoryError()
    cdef long long NONE = -(1LL << 62)
    try:
        with nogil:
            for i in range(top + 1):
                slot[i] = NONE
            for r in range(rows):
                for i in range(m):
                    slot[a[r, i]] = b[r, i]
                j = 0
                for i in range(top + 1):
                    if slot[i] != NONE:
                        seq[j] = slot[i]
                        slot[i] = NONE
                        j += 1
                out[r] = _merge_count(seq, buf, j)
    finally:
        free(slot)
        free(seq)
        free(buf)
    return out


def batch_lagged_products(s1, s2, perms, Py_ssize_t k):
    """``sum_t s1[P_t] * s2[P_{t-k}]`` for each row ``P`` of 0-based ``perms``."""
    cdef double[::1] a = np.ascontiguousarray(s1, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(s2, dtype=np.float64)
    cdef cnp.int64_t[:, ::1] P = np.ascontiguousarray(perms, dtype=np.int64)
    cdef Py_ssize_t rows = P.shape[0], n = P.shape[1], r, t
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(rows, dtype=np.float64)
    cdef double acc
    with nogil:
        for r in range(rows):
            acc = 0.0
            for t in range(k, n):
                acc = acc + a[P[r, t]] * c[P[r, t - k]]
            out[r] = acc
    return out
