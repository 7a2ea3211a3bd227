# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled direct-sum convolution against symbolic signals.

For each output point and signal term the phase exp(i nu (t - tau_j)) is
advanced by a fixed rotation and resynchronised with an exact exponential
every RESYNC steps, which keeps the accumulated rounding at a few ulps.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos

cnp.import_array()

cdef int RESYNC = 256


cdef void _sum_range(double tau0, double dt, const double[:] hr, const double[:] hi,
                     const double[:] t_out, const double[:] cr, const double[:] ci,
                     const long[:] powers, const double[:] freqs,
                     double[:] yr, double[:] yi, Py_ssize_t i0, Py_ssize_t i1) noexcept nogil:
    cdef Py_ssize_t n = hr.shape[0]
    cdef Py_ssize_t nterms = cr.shape[0]
    cdef Py_ssize_t i, j, m
    cdef long k, e
    cdef double t, s, nu, pr, pi_, sr, si, tmp, ar, ai, pw, vr, vi, arg
    for i in range(i0, i1):
        t = t_out[i]
        yr[i] = 0.0
        yi[i] = 0.0
        for m in range(nterms):
            if cr[m] == 0.0 and ci[m] == 0.0:
                continue
            k = powers[m]
            nu = freqs[m]
            sr = cos(nu * dt)
            si = -sin(nu * dt)
            ar = 0.0
            ai = 0.0
            for j in range(n):
                s = t - (tau0 + j * dt)
                if j % RESYNC == 0:
                    arg = nu * s
                    pr = cos(arg)
                    pi_ = sin(arg)
                pw = 1.0
                for e in range(k):
                    pw = pw * s
                vr = hr[j] * pr - hi[j] * pi_
                vi = hr[j] * pi_ + hi[j] * pr
                ar = ar + pw * vr
                ai = ai + pw * vi
                tmp = pr * sr - pi_ * si
                pi_ = pr * si + pi_ * sr
                pr = tmp
            yr[i] = yr[i] + cr[m] * ar - ci[m] * ai
            yi[i] = yi[i] + cr[m] * ai + ci[m] * ar


def convolve_symbolic(double tau0, double dt, hw, t_out, coeffs, powers, freqs):
    """sum_j hw_j x(t_i - tau0 - j dt) for symbolic x; see the fallback module."""
    hw = np.ascontiguousarray(hw, dtype=np.complex128)
    cdef double[:] hr = np.ascontiguousarray(hw.real)
    cdef double[:] hi = np.ascontiguousarray(hw.imag)
    cdef double[:] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef double[:] cr = np.ascontiguousarray(c.real)
    cdef double[:] ci = np.ascontiguousarray(c.imag)
    cdef long[:] pw = np.ascontiguousarray(powers, dtype=np.int_)
    cdef double[:] fq = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef Py_ssize_t nout = tv.shape[0]
    yr_a = np.zeros(nout)
    yi_a = np.zeros(nout)
    cdef double[:] yr = yr_a
    cdef double[:] yi = yi_a
    with nogil:
        _sum_range(tau0, dt, hr, hi, tv, cr, ci, pw, fq, yr, yi, 0, nout)
    return yr_a + 1j * yi_a
