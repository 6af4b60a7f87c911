"""Mean and variance of the energy and of the squared l2 norm of the
solution gradient, read off the chaos coefficients."""

from dataclasses import dataclass

import numpy as np

from .chaos import QuadTensor
from .spectral import PCField, wavenumbers

__all__ = ["StatSample", "mean_energy", "var_energy", "mean_gradient",
           "var_gradient", "stat_sample"]

_VAR_FLOOR = -1e-10


@dataclass(frozen=True)
class StatSample:
    t: float
    mean_energy: float
    var_energy: float
    mean_gradient: float
    var_gradient: float


def _coeffs(u):
    return u.coeffs if isinstance(u, PCField) else np.asarray(u)


def _quadratic(u, lam_stat, k_weight):
    c = _coeffs(u)[:, :lam_stat]
    inv = 1.0 / (2.0 * np.arange(lam_stat) + 1.0)
    return float(np.sum(k_weight[:, None] * np.abs(c) ** 2 * inv[None, :]))


def _quartic(u, d: QuadTensor, lam_stat, k_weight):
    # factorized quadruple sum: A_{r1 r2} = sum_k w_k u_{k r1} conj(u_{k r2}),
    # then contract A (x) A with d
    c = _coeffs(u)[:, :lam_stat]
    A = (k_weight[:, None] * c).T @ np.conj(c)
    total = np.einsum("ab,cd,abcd->", A, A, d.values[:lam_stat, :lam_stat,
                                                     :lam_stat, :lam_stat])
    if abs(total.imag) > 1e-10 * max(1.0, abs(total.real)):
        raise FloatingPointError("quadruple sum has a non-negligible imaginary part")
    return float(total.real)


def _clamp_var(v):
    if v < _VAR_FLOOR:
        return v  # genuinely negative, let callers see it
    return max(v, 0.0)


def mean_energy(u, lam_stat):
    """(1/2) sum_k sum_{r<lam_stat} 2 pi |u_{kr}|^2 / (2r+1)."""
    N = _coeffs(u).shape[0]
    w = np.full(N, 2.0 * np.pi)
    return 0.5 * _quadratic(u, lam_stat, w)


def var_energy(u, d: QuadTensor, lam_stat):
    """Variance of the energy from the chaos quadruple-product tensor."""
    N = _coeffs(u).shape[0]
    w = np.full(N, 2.0 * np.pi)
    mu = mean_energy(u, lam_stat)
    return _clamp_var(0.25 * _quartic(u, d, lam_stat, w) - mu * mu)


def mean_gradient(u, lam_stat):
    """sum_k sum_{r<lam_stat} 2 pi k^2 |u_{kr}|^2 / (2r+1)."""
    N = _coeffs(u).shape[0]
    w = 2.0 * np.pi * wavenumbers(N).astype(float) ** 2
    return _quadratic(u, lam_stat, w)


def var_gradient(u, d: QuadTensor, lam_stat):
    """Variance of the squared l2 norm of the gradient."""
    N = _coeffs(u).shape[0]
    w = 2.0 * np.pi * wavenumbers(N).astype(float) ** 2
    mu = mean_gradient(u, lam_stat)
    return _clamp_var(_quartic(u, d, lam_stat, w) - mu * mu)


def stat_sample(t, u, d: QuadTensor, lam_stat):
    return StatSample(
        t=t,
        mean_energy=mean_energy(u, lam_stat),
        var_energy=var_energy(u, d, lam_stat),
        mean_gradient=mean_gradient(u, lam_stat),
        var_gradient=var_gradient(u, d, lam_stat),
    )
