"""Pure numpy kernel implementations (fallback path)."""

import numpy as np


def convolve_band(a, b):
    n = a.shape[0]
    half = n // 2
    # full linear convolution index s maps to k = s - n; band needs
    # s in [n/2, 3n/2)
    return np.convolve(a, b)[half:half + n]


def contract_pairs(A, B, pair_a, pair_b, weights):
    n = A.shape[0]
    half = n // 2
    n_pairs = pair_a.shape[0]
    convs = np.empty((n_pairs, n), dtype=np.complex128)
    for p in range(n_pairs):
        convs[p] = np.convolve(A[:, pair_a[p]], B[:, pair_b[p]])[half:half + n]
    return (weights @ convs).T
