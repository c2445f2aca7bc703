# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Signatures mirror ``_kernels_py``."""

from libc.math cimport sqrt
from libc.stdint cimport int64_t


def fwht_inplace(double[::1] a):
    """Unnormalized Walsh-Hadamard butterfly, in place. len(a) must be 2**n."""
    cdef Py_ssize_t size = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double u, v
    if size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    while h < size:
        i = 0
        while i < size:
            for j in range(i, i + h):
                u = a[j]
                v = a[j + h]
                a[j] = u + v
                a[j + h] = u - v
            i += 2 * h
        h *= 2


def xor_bin_pairs(const int64_t[::1] masks, const double[:, ::1] gram_re,
                  const double[:, ::1] gram_im,
                  double[::1] out_re, double[::1] out_im):
    """Add gram[k, h] into bin masks[k] ^ masks[h]; return sum of |gram[k, h]|."""
    cdef Py_ssize_t d = masks.shape[0]
    cdef Py_ssize_t k, h
    cdef int64_t b, mk
    cdef double re, im, total = 0.0
    for k in range(d):
        mk = masks[k]
        for h in range(d):
            re = gram_re[k, h]
            im = gram_im[k, h]
            b = mk ^ masks[h]
            out_re[b] += re
            out_im[b] += im
            total += sqrt(re * re + im * im)
    return total
