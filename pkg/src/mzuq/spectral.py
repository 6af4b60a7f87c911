"""Fourier-Galerkin representation of viscous Burgers under a Legendre
chaos expansion.

Coefficients u_{kr} are stored as a dense complex array of shape (N, M)
with wavenumbers in ascending order, k = index - N/2.  The unpaired mode
k = -N/2 (index 0) carries no conjugate partner and is pinned to zero.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .chaos import TripleTensor

__all__ = [
    "PCField",
    "BurgersParams",
    "ConvolutionPlan",
    "wavenumbers",
    "build_initial_field",
    "truncated_convolution",
    "full_rhs",
    "nonlinear_galerkin",
    "full_plan",
]


def wavenumbers(N):
    return np.arange(-(N // 2), N // 2)


@dataclass
class PCField:
    """State of the chaos-expanded spectral system: u_{kr} for k in the
    Fourier band and chaos orders r = 0..M-1."""

    n_modes: int
    n_chaos: int
    coeffs: np.ndarray  # complex128, shape (N, M)

    def copy(self):
        return PCField(self.n_modes, self.n_chaos, self.coeffs.copy())

    @property
    def k(self):
        return wavenumbers(self.n_modes)

    def reality_defect(self):
        """Max deviation from conjugate symmetry u_{-k,r} = conj(u_{k,r}),
        including the pinned k = -N/2 mode."""
        paired = self.coeffs[1:]
        defect = np.max(np.abs(paired - np.conj(paired[::-1])))
        return max(defect, float(np.max(np.abs(self.coeffs[0]))))


@dataclass(frozen=True)
class BurgersParams:
    """Viscosity and initial-condition chaos coefficients."""

    nu: float
    alpha0: float = 1.0
    alpha1: float = 1.0

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("nu must be >= 0")


def build_initial_field(N, M, alpha0=1.0, alpha1=1.0):
    """Spectral chaos coefficients of u0(x, xi) = (alpha0 + alpha1*xi) sin x.

    sin x = (e^{ix} - e^{-ix}) / (2i), so only k = +-1 and chaos orders 0, 1
    are populated.
    """
    if N < 4 or N % 2 != 0:
        raise ValueError("N must be an even integer >= 4")
    if M < 2:
        raise ValueError("M must be >= 2 to carry the degree-1 chaos content")
    coeffs = np.zeros((N, M), dtype=np.complex128)
    half = N // 2
    coeffs[half + 1, 0] = -0.5j * alpha0
    coeffs[half - 1, 0] = 0.5j * alpha0
    coeffs[half + 1, 1] = -0.5j * alpha1
    coeffs[half - 1, 1] = 0.5j * alpha1
    return PCField(N, M, coeffs)


def truncated_convolution(a, b):
    """Galerkin-truncated convolution sum_{p+q=k, p,q in band} a_p b_q."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError("operands must share the Fourier band")
    return kernels.convolve_band(a, b)


class ConvolutionPlan:
    """Precomputed contraction of banded convolutions against coupling
    weights: out[:, r] = sum_p weights[r, p] * conv(A[:, a_p], B[:, b_p])."""

    def __init__(self, pair_a, pair_b, weights):
        self.pair_a = np.ascontiguousarray(pair_a, dtype=np.int64)
        self.pair_b = np.ascontiguousarray(pair_b, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)

    @property
    def n_out(self):
        return self.weights.shape[0]

    def apply(self, A, B):
        A = np.ascontiguousarray(A, dtype=np.complex128)
        B = np.ascontiguousarray(B, dtype=np.complex128)
        return kernels.contract_pairs(A, B, self.pair_a, self.pair_b, self.weights)


def _plan_from_triplets(triplets, n_out):
    """Group (col_a, col_b, r, coeff) triplets by column pair."""
    pair_index = {}
    pair_a, pair_b = [], []
    for ca, cb, _, _ in triplets:
        if (ca, cb) not in pair_index:
            pair_index[(ca, cb)] = len(pair_a)
            pair_a.append(ca)
            pair_b.append(cb)
    weights = np.zeros((n_out, max(len(pair_a), 1)))
    for ca, cb, r, coeff in triplets:
        weights[r, pair_index[(ca, cb)]] += coeff
    if not pair_a:
        weights = np.zeros((n_out, 0))
    return ConvolutionPlan(np.array(pair_a or [], dtype=np.int64),
                           np.array(pair_b or [], dtype=np.int64),
                           weights)


def markovian_plan(c: TripleTensor, lam):
    """Plan for the quadratic term with both chaos sums truncated to
    orders < lam; lam = M reproduces the full system."""
    triplets = []
    for (l, m, r), v in c.entries.items():
        if l <= m and l < lam and m < lam and r < lam:
            mult = 1.0 if l == m else 2.0
            triplets.append((l, m, r, mult * v))
    return _plan_from_triplets(triplets, lam)


def full_plan(c: TripleTensor):
    return markovian_plan(c, c.n_order)


def _cached_plan(c: TripleTensor, key, builder):
    cache = getattr(c, "_plan_cache", None)
    if cache is None:
        cache = {}
        c._plan_cache = cache
    if key not in cache:
        cache[key] = builder()
    return cache[key]


def nonlinear_galerkin(coeffs, plan, kvec):
    """-(ik/2) times the plan's weighted convolution contraction, with the
    unpaired k = -N/2 row zeroed."""
    out = plan.apply(coeffs, coeffs)
    out *= (-0.5j * kvec)[:, None]
    out[0, :] = 0.0
    return out


def full_rhs(u: PCField, params: BurgersParams, c: TripleTensor) -> PCField:
    """Time derivative of the full chaos-coupled system:
    du_{kr}/dt = -(ik/2) sum_{l,m} sum_{p+q=k} u_{pl} u_{qm} c_{lmr}
                 - nu k^2 u_{kr}.
    """
    if c.n_order != u.n_chaos:
        raise ValueError("coupling tensor order does not match the field")
    plan = _cached_plan(c, ("full",), lambda: full_plan(c))
    kvec = u.k
    d = nonlinear_galerkin(u.coeffs, plan, kvec)
    d -= params.nu * (kvec ** 2)[:, None] * u.coeffs
    d[0, :] = 0.0
    return PCField(u.n_modes, u.n_chaos, d)
