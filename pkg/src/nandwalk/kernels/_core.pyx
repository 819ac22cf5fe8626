# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled walk-step kernels.

Same basis layout contract as the numpy backend: blocks of directed pairs
grouped by first vertex (ptr), an involutive swap permutation, real coin
amplitudes, and a +-1 oracle sign per basis position.
"""

import numpy as np

BACKEND = "compiled"


def coined_step(const double complex[::1] src,
                double complex[::1] dst,
                const long[::1] swap,
                const long[::1] ptr,
                const double[::1] amp,
                const double[::1] sign):
    cdef Py_ssize_t nb = ptr.shape[0] - 1
    cdef Py_ssize_t b, j, lo, hi
    cdef double complex over
    for b in range(nb):
        lo = ptr[b]
        hi = ptr[b + 1]
        over = 0
        for j in range(lo, hi):
            dst[j] = src[swap[j]]
            over = over + amp[j] * dst[j]
        over = 2.0 * over
        for j in range(lo, hi):
            dst[j] = sign[j] * (over * amp[j] - dst[j])
    return np.asarray(dst)


def coined_step_batch(const double complex[:, ::1] src,
                      double complex[:, ::1] dst,
                      const long[::1] swap,
                      const long[::1] ptr,
                      const double[::1] amp,
                      const double[:, ::1] sign,
                      double complex[::1] scratch=None):
    cdef Py_ssize_t nb = ptr.shape[0] - 1
    cdef Py_ssize_t k = src.shape[1]
    cdef Py_ssize_t b, j, c, lo, hi
    cdef double a
    if scratch is None:
        scratch = np.empty(k, dtype=np.complex128)
    for b in range(nb):
        lo = ptr[b]
        hi = ptr[b + 1]
        for c in range(k):
            scratch[c] = 0
        for j in range(lo, hi):
            a = amp[j]
            for c in range(k):
                dst[j, c] = src[swap[j], c]
                scratch[c] = scratch[c] + a * dst[j, c]
        for j in range(lo, hi):
            a = amp[j]
            for c in range(k):
                dst[j, c] = sign[j, c] * (2.0 * a * scratch[c] - dst[j, c])
    return np.asarray(dst)
