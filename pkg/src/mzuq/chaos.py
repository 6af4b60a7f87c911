"""Legendre polynomials, Gauss-Legendre quadrature, and the chaos coupling
tensors of the stochastic Galerkin projection.

All expectations are taken with respect to the uniform probability density
1/2 on [-1, 1], so E[L_r^2] = 1/(2r+1).
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_LEGENDRE_ORDER",
    "QuadratureRule",
    "TripleTensor",
    "QuadTensor",
    "legendre_eval",
    "legendre_table",
    "gauss_legendre_rule",
    "triple_product_tensor",
    "quad_product_tensor",
]

MAX_LEGENDRE_ORDER = 64

_NEWTON_TOL = 1e-14
_NEWTON_MAX_ITER = 100


def legendre_eval(order, xi):
    """Evaluate the Legendre polynomial L_order(xi) by the three-term
    recurrence.  ``xi`` may be a scalar or an array."""
    if order < 0 or order > MAX_LEGENDRE_ORDER:
        raise ValueError(f"order must be in [0, {MAX_LEGENDRE_ORDER}], got {order}")
    x = np.asarray(xi, dtype=float)
    p_prev = np.ones_like(x)
    if order == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = x.copy()
    for n in range(1, order):
        p, p_prev = ((2 * n + 1) * x * p - n * p_prev) / (n + 1), p
    return p if p.ndim else float(p)


def legendre_table(n_max, x):
    """Table of L_0 .. L_{n_max-1} evaluated at points x, shape (n_max, len(x))."""
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max, x.size))
    table[0] = 1.0
    if n_max > 1:
        table[1] = x
    for n in range(1, n_max - 1):
        table[n + 1] = ((2 * n + 1) * x * table[n] - n * table[n - 1]) / (n + 1)
    return table


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights for the unweighted integral over
    [-1, 1]; an n-point rule is exact for polynomials up to degree 2n-1."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values):
        """Integral over [-1, 1] of a function sampled at the nodes."""
        return float(np.dot(self.weights, values))

    def expect(self, values):
        """Expectation under the uniform density 1/2 on [-1, 1]."""
        return 0.5 * self.integrate(values)


def gauss_legendre_rule(n):
    """Build the n-point Gauss-Legendre rule by Newton iteration on the
    recurrence-evaluated polynomial, using the standard derivative identity
    L_n'(x) = n (x L_n - L_{n-1}) / (x^2 - 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return QuadratureRule(np.array([0.0]), np.array([2.0]))

    # seed with the Chebyshev-like estimate and polish the positive half,
    # then mirror so the rule is exactly symmetric
    n_half = n // 2
    i = np.arange(n_half)
    x = np.cos(np.pi * (i + 0.75) / (n + 0.5))
    dp = np.empty_like(x)
    for _ in range(_NEWTON_MAX_ITER):
        table = legendre_table(n + 1, x)
        p = table[n]
        dp = n * (x * p - table[n - 1]) / (x * x - 1.0)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    table = legendre_table(n + 1, x)
    dp = n * (x * table[n] - table[n - 1]) / (x * x - 1.0)
    w_half = 2.0 / ((1.0 - x * x) * dp * dp)

    nodes = np.empty(n)
    weights = np.empty(n)
    nodes[:n_half] = -x
    nodes[n - n_half:] = x[::-1]
    weights[:n_half] = w_half
    weights[n - n_half:] = w_half[::-1]
    if n % 2 == 1:
        nodes[n_half] = 0.0
        table0 = legendre_table(n, np.array([0.0]))
        dp0 = n * (0.0 - table0[n - 1, 0]) / (0.0 - 1.0)
        weights[n_half] = 2.0 / (dp0 * dp0)
    return QuadratureRule(nodes, weights)


def _triple_is_structural_zero(l, m, r):
    return (l + m < r) or (l + r < m) or (m + r < l) or ((l + m + r) % 2 == 1)


@dataclass
class TripleTensor:
    """Sparse tensor of normalized Legendre triple products
    c_{lmr} = E[L_l L_m L_r] / E[L_r^2].

    Entries ruled out by the sparsity pattern (triangle inequality or odd
    index sum) are structural zeros and never computed.
    """

    n_order: int
    entries: dict = field(default_factory=dict)

    def value(self, l, m, r):
        return self.entries.get((l, m, r), 0.0)

    @property
    def nnz(self):
        return len(self.entries)

    def dense(self):
        c = np.zeros((self.n_order,) * 3)
        for (l, m, r), v in self.entries.items():
            c[l, m, r] = v
        return c


def triple_product_tensor(M):
    """Build the chaos coupling tensor c_{lmr} for orders 0..M-1.

    The numerator expectation is computed with a quadrature rule exact for
    polynomials of degree 3(M-1); the denominator is 1/(2r+1) in closed form.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    n_nodes = max(16, -(-(3 * (M - 1) + 1) // 2))
    rule = gauss_legendre_rule(n_nodes)
    table = legendre_table(M, rule.nodes)

    entries = {}
    for l in range(M):
        for m in range(l, M):
            prod_lm = table[l] * table[m]
            for r in range(M):
                if _triple_is_structural_zero(l, m, r):
                    continue
                num = rule.expect(prod_lm * table[r])
                val = num * (2 * r + 1)
                entries[(l, m, r)] = val
                entries[(m, l, r)] = val
    return TripleTensor(n_order=M, entries=entries)


@dataclass(frozen=True)
class QuadTensor:
    """Fully symmetric tensor d_{r1 r2 r3 r4} of Legendre quadruple products
    under the uniform density 1/2, used for variance statistics."""

    n_order: int
    values: np.ndarray

    def value(self, r1, r2, r3, r4):
        return float(self.values[r1, r2, r3, r4])


def quad_product_tensor(lam):
    """Build d_{r1r2r3r4} = E[L_{r1} L_{r2} L_{r3} L_{r4}] for indices
    0..lam-1, using a rule exact for degree 4(lam-1)."""
    if lam < 1:
        raise ValueError("lam must be >= 1")
    n_nodes = max(16, -(-(4 * (lam - 1) + 1) // 2))
    rule = gauss_legendre_rule(n_nodes)
    table = legendre_table(lam, rule.nodes)

    d = np.zeros((lam,) * 4)
    for r1 in range(lam):
        for r2 in range(r1, lam):
            for r3 in range(r2, lam):
                for r4 in range(r3, lam):
                    if (r1 + r2 + r3 + r4) % 2 == 1:
                        continue
                    v = rule.expect(table[r1] * table[r2] * table[r3] * table[r4])
                    for perm in _permutations4(r1, r2, r3, r4):
                        d[perm] = v
    return QuadTensor(n_order=lam, values=d)


def _permutations4(r1, r2, r3, r4):
    from itertools import permutations

    return set(permutations((r1, r2, r3, r4)))
