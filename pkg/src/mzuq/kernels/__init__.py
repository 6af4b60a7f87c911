"""Backend dispatch for the hot convolution kernels.

Two interchangeable implementations exist: a numba-jitted one and a pure
numpy one.  The active backend is chosen at import time from the
``MZUQ_BACKEND`` environment variable (``numba`` or ``numpy``) and can be
switched at runtime with :func:`set_backend`.  When numba is not installed
the numpy path is used silently.
"""

import os

from . import _numpy

_BACKENDS = {"numpy": _numpy}

try:
    from . import _numba

    _BACKENDS["numba"] = _numba
except ImportError:  # pragma: no cover - depends on environment
    _numba = None

_DEFAULT = "numba" if "numba" in _BACKENDS else "numpy"


def _resolve(name):
    if name not in _BACKENDS:
        known = ", ".join(sorted(_BACKENDS))
        raise ValueError(f"unknown backend {name!r} (available: {known})")
    return _BACKENDS[name]


_active_name = os.environ.get("MZUQ_BACKEND", _DEFAULT).strip().lower()
_active = _resolve(_active_name)


def set_backend(name):
    """Select the kernel backend by name; returns the previous name."""
    global _active, _active_name
    previous = _active_name
    _active = _resolve(name)
    _active_name = name
    return previous


def get_backend():
    """Name of the currently active backend."""
    return _active_name


def available_backends():
    return sorted(_BACKENDS)


def convolve_band(a, b):
    """Galerkin-truncated convolution of two coefficient vectors.

    Both inputs live on the wavenumber band ``[-N/2, N/2-1]`` stored in
    ascending order; entry ``k`` of the result is the sum of ``a_p b_q``
    over all in-band pairs with ``p + q = k``.
    """
    return _active.convolve_band(a, b)


def contract_pairs(A, B, pair_a, pair_b, weights):
    """Weighted sum of banded convolutions between columns of A and B.

    For every output column ``r`` the result is
    ``sum_p weights[r, p] * convolve_band(A[:, pair_a[p]], B[:, pair_b[p]])``.
    The convolution for each column pair is computed once and reused.
    """
    n = A.shape[0]
    n_out = weights.shape[0]
    import numpy as np

    if pair_a.shape[0] == 0:
        return np.zeros((n, n_out), dtype=np.complex128)
    return _active.contract_pairs(A, B, pair_a, pair_b, weights)
