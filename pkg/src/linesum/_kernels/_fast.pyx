# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython kernels: brute-force bitmask enumeration and the MC integrand sum."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def bruteforce_count_range(long long lo, long long hi, int m, int n, s, t):
    """Count x in [lo, hi) whose mn-bit row-major matrix has line sums (s, t)."""
    cdef long long[::1] sv = np.ascontiguousarray(s, dtype=np.int64)
    cdef long long[::1] tv = np.ascontiguousarray(t, dtype=np.int64)
    cdef unsigned long long rowmask = (<unsigned long long>1 << n) - 1
    cdef unsigned long long cmask[32]
    cdef long long x, count = 0
    cdef int j, k, ok
    for k in range(n):
        cmask[k] = 0
        for j in range(m):
            cmask[k] |= <unsigned long long>1 << (j * n + k)
    with nogil:
        for x in range(lo, hi):
            ok = 1
            for j in range(m):
                if __builtin_popcountll((<unsigned long long>x >> (j * n)) & rowmask) != sv[j]:
                    ok = 0
                    break
            if ok:
                for k in range(n):
                    if __builtin_popcountll(<unsigned long long>x & cmask[k]) != tv[k]:
                        ok = 0
                        break
            if ok:
                count += 1
    return count


def mc_f_sum(lam, s, t, theta, phi):
    """Sum the oscillatory integrand over a batch of angle samples.

    Same contract as the numpy fallback: returns
    (sum Re F, sum Im F, sum (Re F)^2) over the batch.
    """
    cdef double[:, ::1] lamv = np.ascontiguousarray(lam, dtype=np.float64)
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[:, ::1] thv = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[:, ::1] phv = np.ascontiguousarray(phi, dtype=np.float64)
    cdef Py_ssize_t c = thv.shape[0]
    cdef int m = lamv.shape[0]
    cdef int n = lamv.shape[1]
    cdef double[::1] eth_re = np.empty(m), eth_im = np.empty(m)
    cdef double[::1] eph_re = np.empty(n), eph_im = np.empty(n)
    cdef double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0
    cdef double pre, pim, fre, fim, phase, ljk, wre, wim, tre
    cdef Py_ssize_t i
    cdef int j, k
    with nogil:
        for i in range(c):
            phase = 0.0
            for j in range(m):
                eth_re[j] = cos(thv[i, j])
                eth_im[j] = sin(thv[i, j])
                phase += sv[j] * thv[i, j]
            for k in range(n):
                eph_re[k] = cos(phv[i, k])
                eph_im[k] = sin(phv[i, k])
                phase += tv[k] * phv[i, k]
            pre = cos(phase)
            pim = -sin(phase)
            for j in range(m):
                for k in range(n):
                    ljk = lamv[j, k]
                    # factor = 1 + lam*(e^{i(theta_j+phi_k)} - 1)
                    wre = 1.0 + ljk * (eth_re[j] * eph_re[k] - eth_im[j] * eph_im[k] - 1.0)
                    wim = ljk * (eth_re[j] * eph_im[k] + eth_im[j] * eph_re[k])
                    tre = pre * wre - pim * wim
                    pim = pre * wim + pim * wre
                    pre = tre
            sum_re += pre
            sum_im += pim
            sum_re2 += pre * pre
    return sum_re, sum_im, sum_re2
