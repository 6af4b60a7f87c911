"""Mori-Zwanzig reduced model for the chaos-coupled Burgers system.

Resolved variables are the chaos orders r < lam for every Fourier mode.
The memory convolution is replaced by auxiliary ODEs w^{(i)} over n0
subintervals of the memory window t0 (trapezoidal reformulation), closed
at first order (the next memory level is dropped).
"""

from dataclasses import dataclass

import numpy as np

from .chaos import TripleTensor
from .spectral import (BurgersParams, PCField, _cached_plan, _plan_from_triplets,
                       markovian_plan, nonlinear_galerkin, wavenumbers)

__all__ = [
    "ReductionSpec",
    "MemoryState",
    "project",
    "markovian_rhs",
    "plql_kernel",
    "petql_term",
    "memory_ode_rhs",
    "reduced_rhs",
    "pack_reduced",
    "unpack_reduced",
]


@dataclass(frozen=True)
class ReductionSpec:
    """Parameters of the reduced model.

    ``dt_sub = t0 / n_sub`` is the subinterval length of the Markovian
    memory reformulation.
    """

    n_resolved: int      # lam
    n_chaos: int         # M of the underlying full system
    t0: float = 0.0
    n_sub: int = 1
    memory_enabled: bool = True

    def __post_init__(self):
        if not 1 <= self.n_resolved <= self.n_chaos:
            raise ValueError("need 1 <= lam <= M")
        if self.memory_enabled:
            if self.n_resolved >= self.n_chaos:
                raise ValueError("memory requires lam < M (nontrivial Q)")
            if self.t0 <= 0:
                raise ValueError("memory requires t0 > 0")
        if self.n_sub < 1:
            raise ValueError("n_sub must be >= 1")

    @property
    def dt_sub(self):
        return self.t0 / self.n_sub


@dataclass
class MemoryState:
    """Auxiliary memory variables w^{(i)}_{kr}, shape (n_sub, N, lam);
    the physical memory term is the sum over the first axis."""

    w: np.ndarray

    @property
    def total(self):
        return self.w.sum(axis=0)


def project(u: PCField, lam) -> PCField:
    """Zero the unresolved chaos orders r >= lam."""
    if lam > u.n_chaos:
        raise ValueError("lam exceeds the chaos order count")
    coeffs = u.coeffs.copy()
    coeffs[:, lam:] = 0.0
    return PCField(u.n_modes, u.n_chaos, coeffs)


def _lift_plan(c: TripleTensor, lam):
    # (PLu)_{pl} for unresolved l: resolved-only chaos pairs contracted
    # through c_{l'm'l}; output column l - lam
    triplets = []
    for (lp, mp, l), v in c.entries.items():
        if lp <= mp < lam and l >= lam:
            mult = 1.0 if lp == mp else 2.0
            triplets.append((lp, mp, l - lam, mult * v))
    return _plan_from_triplets(triplets, c.n_order - lam)


def _memory_plan(c: TripleTensor, lam):
    # outer contraction of PLQL: ordered (l >= lam, m < lam), A columns
    # hold the lifted (PLu)_l, B columns the resolved field
    triplets = []
    for (l, m, r), v in c.entries.items():
        if l >= lam and m < lam and r < lam:
            triplets.append((l - lam, m, r, v))
    return _plan_from_triplets(triplets, lam)


def _noise_plan(c: TripleTensor, lam):
    # Pe^{tL}QL on the full state: 2x the (l >= lam, m < lam) cross term
    # plus the (l, m >= lam) term folded over l <= m
    triplets = []
    for (l, m, r), v in c.entries.items():
        if r >= lam:
            continue
        if l >= lam and m < lam:
            triplets.append((l, m, r, 2.0 * v))
        elif lam <= l <= m:
            mult = 1.0 if l == m else 2.0
            triplets.append((l, m, r, mult * v))
    return _plan_from_triplets(triplets, lam)


def markovian_rhs(u_hat, params: BurgersParams, c: TripleTensor, lam):
    """PLu: the full right-hand side with both chaos sums truncated to the
    resolved orders.  ``u_hat`` is an (N, lam) resolved coefficient array."""
    N = u_hat.shape[0]
    kvec = wavenumbers(N)
    plan = _cached_plan(c, ("markov", lam), lambda: markovian_plan(c, lam))
    d = nonlinear_galerkin(u_hat, plan, kvec)
    d -= params.nu * (kvec ** 2)[:, None] * u_hat
    d[0, :] = 0.0
    return d


def plql_kernel(u_hat, c: TripleTensor, lam, params: BurgersParams = None):
    """The leading memory integrand PLQL, evaluated on resolved
    coefficients u_hat of shape (N, lam).

    Equals 2 * [-(ik/2) sum_{l>=lam, m<lam} sum_{p+q=k} (PLu)_{pl} u_{qm}
    c_{lmr}] where the lifted (PLu)_{pl} has no viscous part (the projected
    unresolved coefficients vanish).
    """
    N = u_hat.shape[0]
    M = c.n_order
    if lam >= M:
        return np.zeros((N, lam), dtype=np.complex128)
    kvec = wavenumbers(N)
    lift = _cached_plan(c, ("lift", lam), lambda: _lift_plan(c, lam))
    outer = _cached_plan(c, ("memory", lam), lambda: _memory_plan(c, lam))
    plu_unres = nonlinear_galerkin(u_hat, lift, kvec)      # (N, M - lam)
    out = outer.apply(plu_unres, u_hat)
    out *= (-0.5j * kvec)[:, None]
    out *= 2.0
    out[0, :] = 0.0
    return out


def petql_term(u: PCField, c: TripleTensor, lam):
    """Pe^{tL}QL evaluated on a full-system state: the part of the full
    right-hand side that involves unresolved chaos orders, restricted to
    resolved outputs."""
    M = c.n_order
    N = u.n_modes
    if lam >= M:
        return np.zeros((N, lam), dtype=np.complex128)
    kvec = u.k
    plan = _cached_plan(c, ("noise", lam), lambda: _noise_plan(c, lam))
    out = nonlinear_galerkin(u.coeffs, plan, kvec)
    return out


def memory_ode_rhs(w, kernel_term, dt_sub):
    """Right-hand side of the subinterval memory ODEs.

    With 1-based subinterval index i:
        dw^(i)/dt = -(2/dt_sub) w^(i) + (-1)^{i+1} 2 K
                    + sum_{j<i} (4/dt_sub) (-1)^{i+j+1} w^(j)
    where K is the memory integrand (PLQL along the trajectory).
    """
    n_sub = w.shape[0]
    dw = np.empty_like(w)
    lam0 = 2.0 / dt_sub
    for i in range(n_sub):
        acc = -lam0 * w[i] + (2.0 if i % 2 == 0 else -2.0) * kernel_term
        for j in range(i):
            sign = -1.0 if (i + j) % 2 == 0 else 1.0
            acc = acc + (2.0 * lam0) * sign * w[j]
        dw[i] = acc
    return dw


def reduced_rhs(u_hat, w, spec: ReductionSpec, params: BurgersParams,
                c: TripleTensor):
    """Time derivative of the reduced model state.

    Returns (du_hat, dw); with memory disabled the model is Markovian-only
    and dw is zero.
    """
    du = markovian_rhs(u_hat, params, c, spec.n_resolved)
    if not spec.memory_enabled:
        return du, np.zeros_like(w)
    du = du + w.sum(axis=0)
    du[0, :] = 0.0
    kern = plql_kernel(u_hat, c, spec.n_resolved, params)
    dw = memory_ode_rhs(w, kern, spec.dt_sub)
    dw[:, 0, :] = 0.0
    return du, dw


def pack_reduced(u_hat, w):
    return np.concatenate([u_hat.ravel(), w.ravel()])


def unpack_reduced(state, N, lam, n_sub):
    n_u = N * lam
    u_hat = state[:n_u].reshape(N, lam)
    w = state[n_u:].reshape(n_sub, N, lam)
    return u_hat, w
