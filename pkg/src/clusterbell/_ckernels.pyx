# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``. Same signatures."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef inline int _parity(long long v) nogil:
    cdef int p = 0
    while v:
        v &= v - 1
        p ^= 1
    return p


cdef inline int _popcount(long long v) nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


def apply_pauli(amps, long long xmask, long long zmask, double complex coef):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef Py_ssize_t dim = a.shape[0]
    out = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t j
    with nogil:
        for j in range(dim):
            if _parity(j & zmask):
                o[j ^ xmask] = -coef * a[j]
            else:
                o[j ^ xmask] = coef * a[j]
    return out


def expectation_pure(amps, long long xmask, long long zmask, double complex coef):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef Py_ssize_t dim = a.shape[0]
    cdef Py_ssize_t j
    cdef double complex acc = 0
    cdef double complex t
    with nogil:
        for j in range(dim):
            t = a[j ^ xmask].conjugate() * a[j]
            if _parity(j & zmask):
                acc -= t
            else:
                acc += t
    return complex(coef * acc)


def expectation_mixed(rho, long long xmask, long long zmask, double complex coef):
    cdef const double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef Py_ssize_t dim = r.shape[0]
    cdef Py_ssize_t j
    cdef double complex acc = 0
    with nogil:
        for j in range(dim):
            if _parity(j & zmask):
                acc -= r[j, j ^ xmask]
            else:
                acc += r[j, j ^ xmask]
    return complex(coef * acc)


def stabilizer_scan(amps, int n, double tol):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef long long dim = 1 << n
    cdef long long x, z, j
    cdef double complex acc, coef
    cdef double val
    cdef double complex[4] ipow
    ipow[0] = 1
    ipow[1] = 1j
    ipow[2] = -1
    ipow[3] = -1j
    shifted = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] sh = shifted
    found = []
    for x in range(dim):
        for j in range(dim):
            sh[j] = a[j ^ x].conjugate() * a[j]
        for z in range(dim):
            if x == 0 and z == 0:
                continue
            acc = 0
            for j in range(dim):
                if _parity(j & z):
                    acc -= sh[j]
                else:
                    acc += sh[j]
            coef = ipow[_popcount(x & z) & 3]
            val = (coef * acc).real
            if abs(val) > 1.0 - tol:
                found.append((x, z, val))
    return found


def lhv_scan(term_bits, term_sign, term_block, int nblocks, int nbits):
    cdef const long long[:, ::1] bits = np.ascontiguousarray(term_bits, dtype=np.int64)
    cdef const long long[::1] sign = np.ascontiguousarray(term_sign, dtype=np.int64)
    cdef const long long[::1] block = np.ascontiguousarray(term_block, dtype=np.int64)
    cdef Py_ssize_t nterms = bits.shape[0]
    cdef Py_ssize_t width = bits.shape[1]
    cdef Py_ssize_t t, k
    masks_arr = np.zeros(nterms, dtype=np.int64)
    cdef long long[::1] masks = masks_arr
    for t in range(nterms):
        for k in range(width):
            if bits[t, k] >= 0:
                masks[t] ^= (<long long>1) << bits[t, k]
    sums_arr = np.zeros(nblocks, dtype=np.int64)
    cdef long long[::1] sums = sums_arr
    cdef long long s, total, best = -1, best_idx = -1
    cdef long long limit = (<long long>1) << nbits
    with nogil:
        for s in range(limit):
            for k in range(nblocks):
                sums[k] = 0
            for t in range(nterms):
                if _parity(s & masks[t]):
                    sums[block[t]] -= sign[t]
                else:
                    sums[block[t]] += sign[t]
            total = 0
            for k in range(nblocks):
                total += sums[k] if sums[k] >= 0 else -sums[k]
            if total > best:
                best = total
                best_idx = s
    return int(best), int(best_idx)
