"""Pure-Python/numpy versions of the hot kernels in ``_core.pyx``."""

from __future__ import annotations

import numpy as np


def _merge_count(b: list) -> int:
    """Sort ``b`` in place (bottom-up merge sort) and return its inversions."""
    n = len(b)
    buf = [0] * n
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if b[j] < b[i]:
                    buf[k] = b[j]
                    inv += mid - i
                    j += 1
                else:
                    buf[k] = b[i]
                    i += 1
                k += 1
            buf[k:k + mid - i] = b[i:mid]
            k += mid - i
            buf[k:k + hi - j] = b[j:hi]
            b[lo:hi] = buf[lo:hi]
        width *= 2
    return inv


def count_discordances(a, b) -> int:
    """Pairs ``i < j`` with ``(a_i - a_j)(b_i - b_j) < 0``; entries distinct."""
    a = np.asarray(a)
    b = np.asarray(b)
    order = np.argsort(a, kind="stable")
    return _merge_count(b[order].tolist())


def batch_discordances(A, B) -> np.ndarray:
    """Row-wise :func:`count_discordances` for integer-rank matrices.

    Entries of each row of ``B`` must be integers in ``1..n_max``.  A
    Fenwick tree per row, advanced in lockstep across rows.
    """
    A = np.asarray(A)
    B = np.asarray(B, dtype=np.int64)
    rows, m = B.shape
    order = np.argsort(A, axis=1, kind="stable")
    b = np.take_along_axis(B, order, axis=1)
    size = int(b.max()) + 1 if b.size else 1
    tree = np.zeros((rows, size + 1), dtype=np.int64)
    idx = np.arange(rows)
    out = np.zeros(rows, dtype=np.int64)
    for j in range(m):
        v = b[:, j].copy()
        # seen so far with value <= v
        seen = np.zeros(rows, dtype=np.int64)
        pos = v.copy()
        while True:
            live = pos > 0
            if not live.any():
                break
            seen[live] += tree[idx[live], pos[live]]
            pos = np.where(live, pos - (pos & -pos), 0)
        out += j - seen
        pos = v.copy()
        while True:
            live = pos <= size
            if not live.any():
                break
            tree[idx[live], pos[live]] += 1
            pos = np.where(live, pos + (pos & -pos), size + 1)
    return out


def batch_lagged_products(s1, s2, perms, k: int) -> np.ndarray:
    """``sum_t s1[P_t] * s2[P_{t-k}]`` for each row ``P`` of 0-based ``perms``."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    P = np.asarray(perms)
    return np.sum(s1[P[:, k:]] * s2[P[:, :-k]], axis=1)
