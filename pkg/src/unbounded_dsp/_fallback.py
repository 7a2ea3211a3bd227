"""Pure-numpy convolution sums, used when the compiled core is unavailable.

Both backends evaluate the same discrete sum::

    y(t_i) = sum_j hw_j * x(t_i - tau_j),    tau_j = tau0 + j * dt

where ``hw`` already carries the quadrature weights and the factor dt.
"""
from __future__ import annotations

import numpy as np

# output points per block; bounds the temporary (block x n) arrays
_BLOCK_ELEMS = 1 << 20


def convolve_symbolic(tau0, dt, hw, t_out, coeffs, powers, freqs):
    hw = np.asarray(hw, dtype=np.complex128)
    t_out = np.asarray(t_out, dtype=np.float64)
    tau = tau0 + dt * np.arange(hw.size)
    out = np.zeros(t_out.size, dtype=np.complex128)
    if hw.size == 0 or t_out.size == 0:
        return out
    block = max(1, _BLOCK_ELEMS // hw.size)
    for lo in range(0, t_out.size, block):
        s = t_out[lo:lo + block, None] - tau[None, :]
        acc = np.zeros(s.shape, dtype=np.complex128)
        for c, k, nu in zip(coeffs, powers, freqs):
            if c == 0:
                continue
            term = np.exp(1j * nu * s)
            if k:
                term *= s ** int(k)
            acc += c * term
        out[lo:lo + block] = acc @ hw
    return out


def convolve_sampled(tau0, dt, hw, t_out, s0, ds, xv):
    """Same sum with x linearly interpolated from samples, zero outside them."""
    hw = np.asarray(hw, dtype=np.complex128)
    t_out = np.asarray(t_out, dtype=np.float64)
    xv = np.asarray(xv, dtype=np.complex128)
    tau = tau0 + dt * np.arange(hw.size)
    xs = s0 + ds * np.arange(xv.size)
    out = np.zeros(t_out.size, dtype=np.complex128)
    if hw.size == 0 or t_out.size == 0:
        return out
    block = max(1, _BLOCK_ELEMS // hw.size)
    for lo in range(0, t_out.size, block):
        s = (t_out[lo:lo + block, None] - tau[None, :]).ravel()
        re = np.interp(s, xs, xv.real, left=0.0, right=0.0)
        im = np.interp(s, xs, xv.imag, left=0.0, right=0.0)
        vals = (re + 1j * im).reshape(-1, hw.size)
        out[lo:lo + block] = vals @ hw
    return out
