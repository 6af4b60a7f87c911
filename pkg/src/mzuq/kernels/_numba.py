"""Numba-jitted kernel implementations (default path).

Convolutions run on split real/imaginary planes in outer-product order
(scalar a_j against the contiguous b row), which keeps the inner loop a
straight fused multiply-add over adjacent memory.
"""

import numpy as np
from numba import njit


@njit(cache=True, fastmath=True)
def _full_conv_split(ar, ai, br, bi, cr, ci):
    n = ar.shape[0]
    cr[:] = 0.0
    ci[:] = 0.0
    for j in range(n):
        x = ar[j]
        y = ai[j]
        for i in range(n):
            u = br[i]
            v = bi[i]
            cr[j + i] += x * u - y * v
            ci[j + i] += x * v + y * u


@njit(cache=True, fastmath=True)
def convolve_band(a, b):
    n = a.shape[0]
    half = n // 2
    ar = np.ascontiguousarray(a.real)
    ai = np.ascontiguousarray(a.imag)
    br = np.ascontiguousarray(b.real)
    bi = np.ascontiguousarray(b.imag)
    cr = np.empty(2 * n - 1)
    ci = np.empty(2 * n - 1)
    _full_conv_split(ar, ai, br, bi, cr, ci)
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        out[i] = complex(cr[half + i], ci[half + i])
    return out


@njit(cache=True, fastmath=True)
def contract_pairs(A, B, pair_a, pair_b, weights):
    n = A.shape[0]
    n_pairs = pair_a.shape[0]
    n_out = weights.shape[0]
    half = n // 2
    a_re = np.ascontiguousarray(A.real.T)
    a_im = np.ascontiguousarray(A.imag.T)
    b_re = np.ascontiguousarray(B.real.T)
    b_im = np.ascontiguousarray(B.imag.T)
    cr = np.empty(2 * n - 1)
    ci = np.empty(2 * n - 1)
    convs = np.empty((n_pairs, n), dtype=np.complex128)
    for p in range(n_pairs):
        ia = pair_a[p]
        ib = pair_b[p]
        _full_conv_split(a_re[ia], a_im[ia], b_re[ib], b_im[ib], cr, ci)
        for i in range(n):
            convs[p, i] = complex(cr[half + i], ci[half + i])
    out = np.zeros((n, n_out), dtype=np.complex128)
    for r in range(n_out):
        for p in range(n_pairs):
            w = weights[r, p]
            if w != 0.0:
                for i in range(n):
                    out[i, r] += w * convs[p, i]
    return out
