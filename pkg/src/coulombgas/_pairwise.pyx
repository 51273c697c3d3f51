# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise kernels for the particle-energy minimiser.

The O(N^2) logarithmic interaction sums dominate the runtime of the
Fekete-point optimisation; everything else in the package is closed form
or low-dimensional quadrature.
"""

import numpy as np

from libc.math cimport log


def interaction_energy(const double complex[::1] z):
    """sum_{j<k} log |z_j - z_k|^2"""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t j, k
    cdef double total = 0.0
    cdef double dr, di
    for j in range(n):
        for k in range(j + 1, n):
            dr = z[j].real - z[k].real
            di = z[j].imag - z[k].imag
            total += log(dr * dr + di * di)
    return total


def interaction_grad(const double complex[::1] z):
    """out_j = sum_{k != j} 1 / (conj(z_j) - conj(z_k))"""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t j, k
    out_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double dr, di, inv
    cdef double complex term
    for j in range(n):
        for k in range(j + 1, n):
            dr = z[j].real - z[k].real
            di = z[j].imag - z[k].imag
            inv = 1.0 / (dr * dr + di * di)
            # 1/conj(d) = d / |d|^2
            term = (dr + 1j * di) * inv
            out[j] += term
            out[k] -= term
    return out_arr


def mirror_energy(const double complex[::1] z):
    """sum_{j<=k} log |z_j - conj(z_k)|^2 (self terms included)"""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t j, k
    cdef double total = 0.0
    cdef double dr, di
    for j in range(n):
        for k in range(j, n):
            dr = z[j].real - z[k].real
            di = z[j].imag + z[k].imag
            total += log(dr * dr + di * di)
    return total


def mirror_grad(const double complex[::1] z):
    """out_j = sum_{k != j} 1/(conj(z_j) - z_k) + 2/(conj(z_j) - z_j)"""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t j, k
    out_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex d
    for j in range(n):
        for k in range(n):
            if k == j:
                continue
            d = (z[j].real - z[k].real) - 1j * (z[j].imag + z[k].imag)
            out[j] += 1.0 / d
        out[j] += 2.0 / (-2j * z[j].imag)
    return out_arr
