"""Compiled distance kernels.

All arrays here are 0-based permutations stored as contiguous ``int64``.
"""

import os

import numba
import numpy as np


if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old for numba; skip straight to OpenMP
    numba.config.THREADING_LAYER = "omp"


def _apply_thread_cap():
    cap = os.environ.get("ULAM_THREADS")
    if not cap:
        return
    try:
        n = int(cap)
    except ValueError:
        return
    n = max(1, min(n, numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


_apply_thread_cap()


@numba.njit(cache=True, nogil=True)
def lis_length(seq):
    """Length of the longest strictly increasing subsequence (patience sorting)."""
    tails = np.empty(seq.shape[0], dtype=np.int64)
    size = 0
    for v in seq:
        lo, hi = 0, size
        while lo < hi:
            mid = (lo + hi) >> 1
            if tails[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        tails[lo] = v
        if lo == size:
            size += 1
    return size


@numba.njit(cache=True, nogil=True)
def _lcs_with_pos(pos, y, buf, tails):
    d = y.shape[0]
    for j in range(d):
        buf[j] = pos[y[j]]
    size = 0
    for j in range(d):
        v = buf[j]
        lo, hi = 0, size
        while lo < hi:
            mid = (lo + hi) >> 1
            if tails[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        tails[lo] = v
        if lo == size:
            size += 1
    return size


@numba.njit(cache=True, nogil=True)
def lcs_length0(x, y):
    d = x.shape[0]
    pos = np.empty(d, dtype=np.int64)
    for i in range(d):
        pos[x[i]] = i
    buf = np.empty(d, dtype=np.int64)
    tails = np.empty(d, dtype=np.int64)
    return _lcs_with_pos(pos, y, buf, tails)


@numba.njit(cache=True, parallel=True)
def cdist0(A, B):
    """Ulam distance matrix between the rows of ``A`` and the rows of ``B``."""
    na, nb = A.shape[0], B.shape[0]
    d = A.shape[1]
    out = np.empty((na, nb), dtype=np.int64)
    for i in numba.prange(na):
        pos = np.empty(d, dtype=np.int64)
        for t in range(d):
            pos[A[i, t]] = t
        buf = np.empty(d, dtype=np.int64)
        tails = np.empty(d, dtype=np.int64)
        for j in range(nb):
            out[i, j] = d - _lcs_with_pos(pos, B[j], buf, tails)
    return out


@numba.njit(cache=True, nogil=True)
def dists_to0(x, B, m):
    """Distances from ``x`` to the first ``m`` rows of ``B``."""
    d = x.shape[0]
    pos = np.empty(d, dtype=np.int64)
    for t in range(d):
        pos[x[t]] = t
    buf = np.empty(d, dtype=np.int64)
    tails = np.empty(d, dtype=np.int64)
    out = np.empty(m, dtype=np.int64)
    for j in range(m):
        out[j] = d - _lcs_with_pos(pos, B[j], buf, tails)
    return out


@numba.njit(cache=True, nogil=True)
def all_at_least0(x, B, m, threshold):
    """True iff every one of the first ``m`` rows of ``B`` is >= threshold from ``x``."""
    d = x.shape[0]
    pos = np.empty(d, dtype=np.int64)
    for t in range(d):
        pos[x[t]] = t
    buf = np.empty(d, dtype=np.int64)
    tails = np.empty(d, dtype=np.int64)
    for j in range(m):
        if d - _lcs_with_pos(pos, B[j], buf, tails) < threshold:
            return False
    return True
