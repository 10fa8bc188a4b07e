# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Must stay bit-identical with joininfer.kernels.pure - the test suite
cross-checks both backends on random inputs.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

cnp.import_array()

BACKEND = "native"

cdef uint64_t FNV_OFFSET = <uint64_t>0xCBF29CE484222325
cdef uint64_t FNV_PRIME = <uint64_t>0x100000001B3


cdef inline uint64_t _sm64(uint64_t x) nogil:
    x += <uint64_t>0x9E3779B97F4B7C15
    x = (x ^ (x >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * <uint64_t>0x94D049BB133111EB
    return x ^ (x >> 31)


def splitmix64(x):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] arr = np.ascontiguousarray(x, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(arr.shape[0], dtype=np.uint64)
    cdef Py_ssize_t i, n = arr.shape[0]
    for i in range(n):
        out[i] = _sm64(arr[i])
    return out


def fnv1a64(bytes data):
    cdef uint64_t h = FNV_OFFSET
    cdef const unsigned char* buf = data
    cdef Py_ssize_t i, n = len(data)
    for i in range(n):
        h ^= buf[i]
        h *= FNV_PRIME
    return h


def fnv1a64_many(list items):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(len(items), dtype=np.uint64)
    cdef Py_ssize_t i
    for i in range(len(items)):
        out[i] = fnv1a64(items[i])
    return out


cdef inline int _clz64(uint64_t w) nogil:
    cdef int n = 0
    if w == 0:
        return 64
    while not (w & (<uint64_t>1 << 63)):
        w <<= 1
        n += 1
    return n


def hll_update(cnp.ndarray[cnp.uint8_t, ndim=1] registers,
               hashes, int p):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] h = np.ascontiguousarray(hashes, dtype=np.uint64)
    cdef Py_ssize_t i, n = h.shape[0]
    cdef uint64_t hv, w
    cdef uint64_t idx
    cdef uint8_t rho
    for i in range(n):
        hv = h[i]
        idx = hv >> (64 - p)
        w = hv << p
        if w == 0:
            rho = <uint8_t>(64 - p + 1)
        else:
            rho = <uint8_t>(_clz64(w) + 1)
        if registers[idx] < rho:
            registers[idx] = rho


def sample_indices(Py_ssize_t n, Py_ssize_t k, seed):
    """Positions of the k smallest per-position random keys, sorted."""
    if k >= n:
        return np.arange(n, dtype=np.int64)
    cdef uint64_t base = _sm64(<uint64_t><int64_t>seed)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] hk = np.empty(k, dtype=np.uint64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hi = np.empty(k, dtype=np.int64)
    cdef Py_ssize_t i, pos, child, size = 0
    cdef uint64_t key, tk
    cdef int64_t ti
    for i in range(n):
        key = _sm64((<uint64_t>i) ^ base)
        if size < k:
            # sift up into the max-heap
            pos = size
            hk[pos] = key
            hi[pos] = i
            size += 1
            while pos > 0 and hk[(pos - 1) // 2] < hk[pos]:
                tk = hk[pos]; hk[pos] = hk[(pos - 1) // 2]; hk[(pos - 1) // 2] = tk
                ti = hi[pos]; hi[pos] = hi[(pos - 1) // 2]; hi[(pos - 1) // 2] = ti
                pos = (pos - 1) // 2
        elif key < hk[0]:
            # replace the current maximum and sift down
            hk[0] = key
            hi[0] = i
            pos = 0
            while True:
                child = 2 * pos + 1
                if child >= k:
                    break
                if child + 1 < k and hk[child + 1] > hk[child]:
                    child += 1
                if hk[child] <= hk[pos]:
                    break
                tk = hk[pos]; hk[pos] = hk[child]; hk[child] = tk
                ti = hi[pos]; hi[pos] = hi[child]; hi[child] = ti
                pos = child
    hi.sort()
    return hi
