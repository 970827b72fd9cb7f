# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector and polynomial-evaluation kernels.

Same interface as _fallback; qubit i is bit i of the flat amplitude index.
"""
import numpy as np


def apply_1q(amps, int n, int q, double complex m00, double complex m01,
             double complex m10, double complex m11):
    cdef double complex[::1] a = amps
    cdef Py_ssize_t g, i0, i1
    cdef Py_ssize_t half = 1 << (n - 1)
    cdef Py_ssize_t mask = (1 << q) - 1
    cdef Py_ssize_t step = 1 << q
    cdef double complex lo, hi
    for g in range(half):
        i0 = ((g >> q) << (q + 1)) | (g & mask)
        i1 = i0 | step
        lo = a[i0]
        hi = a[i1]
        a[i0] = m00 * lo + m01 * hi
        a[i1] = m10 * lo + m11 * hi


def apply_cx(amps, int n, int c, int t):
    cdef double complex[::1] a = amps
    cdef Py_ssize_t g, i0, i1
    cdef Py_ssize_t quarter = 1 << (n - 2) if n >= 2 else 0
    cdef int p = c if c < t else t
    cdef int q = t if c < t else c
    cdef Py_ssize_t pm = (1 << p) - 1
    cdef Py_ssize_t qm = (1 << q) - 1
    cdef Py_ssize_t cbit = 1 << c
    cdef Py_ssize_t tbit = 1 << t
    cdef double complex tmp
    for g in range(quarter):
        i0 = ((g >> p) << (p + 1)) | (g & pm)
        i0 = ((i0 >> q) << (q + 1)) | (i0 & qm)
        i0 |= cbit
        i1 = i0 | tbit
        tmp = a[i0]
        a[i0] = a[i1]
        a[i1] = tmp


def apply_cz(amps, int n, int c, int t):
    cdef double complex[::1] a = amps
    cdef Py_ssize_t i
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t both = (1 << c) | (1 << t)
    for i in range(dim):
        if (i & both) == both:
            a[i] = -a[i]


def eval_poly_batch(nums, idx, ptr, points, long long modulus):
    cdef long long[::1] cnums = nums
    cdef int[::1] cidx = idx
    cdef int[::1] cptr = ptr
    cdef unsigned char[:, ::1] cpts = points
    cdef Py_ssize_t samples = cpts.shape[0]
    cdef Py_ssize_t nmon = cnums.shape[0]
    out = np.zeros(samples, dtype=np.int64)
    cdef long long[::1] cout = out
    cdef Py_ssize_t s, t, k
    cdef long long acc
    cdef bint on
    for s in range(samples):
        acc = 0
        for t in range(nmon):
            on = True
            for k in range(cptr[t], cptr[t + 1]):
                if cpts[s, cidx[k]] == 0:
                    on = False
                    break
            if on:
                acc = (acc + cnums[t]) % modulus
        cout[s] = acc
    return out
