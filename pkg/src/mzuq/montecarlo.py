"""Monte Carlo ground truth: sample xi ~ U[-1,1], solve the deterministic
Fourier-Galerkin Burgers equation per sample, and estimate the same
statistics as the chaos expansion.

Sampling uses numpy's default PCG64 generator seeded deterministically;
samples are integrated as one vectorized batch and aggregated in a fixed
order, so equal seeds give identical outputs.
"""

from dataclasses import dataclass

import numpy as np

from .spectral import wavenumbers
from .stepping import IntegrationFailure, n_steps

__all__ = ["McConfig", "McRow", "deterministic_rhs", "sample_trajectory",
           "mc_statistics"]


@dataclass(frozen=True)
class McConfig:
    n_samples: int
    seed: int
    n_modes: int
    nu: float
    dt: float
    t_end: float
    alpha0: float = 1.0
    alpha1: float = 1.0
    antithetic: bool = False

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2 (variance undefined otherwise)")


@dataclass(frozen=True)
class McRow:
    t: float
    stat: str
    value: float
    stderr: float


def deterministic_rhs(states, nu, kvec, nfft):
    """Batched RHS of the deterministic spectral Burgers system; ``states``
    has shape (S, N).  The quadratic term is a Galerkin-truncated linear
    convolution computed by zero-padded FFT."""
    N = states.shape[1]
    half = N // 2
    spec = np.fft.fft(states, n=nfft, axis=1)
    conv = np.fft.ifft(spec * spec, axis=1)[:, half:half + N]
    d = (-0.5j * kvec)[None, :] * conv - nu * (kvec ** 2)[None, :] * states
    d[:, 0] = 0.0
    return d


def _initial_states(xis, N, alpha0, alpha1):
    half = N // 2
    states = np.zeros((xis.shape[0], N), dtype=np.complex128)
    amp = alpha0 + alpha1 * xis
    states[:, half + 1] = -0.5j * amp
    states[:, half - 1] = 0.5j * amp
    return states


def _heun_batch(states, nu, dt, steps, observer=None):
    N = states.shape[1]
    kvec = wavenumbers(N).astype(float)
    nfft = 2 * N
    t = 0.0
    if observer is not None:
        observer(0, t, states)
    for j in range(1, steps + 1):
        k1 = deterministic_rhs(states, nu, kvec, nfft)
        k2 = deterministic_rhs(states + dt * k1, nu, kvec, nfft)
        states = states + (0.5 * dt) * (k1 + k2)
        t = j * dt
        if not np.all(np.isfinite(states.view(np.float64))):
            raise IntegrationFailure(t)
        if observer is not None:
            observer(j, t, states)
    return states


def sample_trajectory(xi, N, nu, dt, t_end, observer=None,
                      alpha0=1.0, alpha1=1.0):
    """Evolve the single deterministic sample with IC (alpha0 + alpha1 xi) sin x.

    The observer, when given, receives (t, coeffs) at every step.
    """
    if not -1.0 <= xi <= 1.0:
        raise ValueError("xi must lie in [-1, 1]")
    states = _initial_states(np.array([xi]), N, alpha0, alpha1)
    steps = n_steps(t_end, dt)
    obs = None
    if observer is not None:
        obs = lambda j, t, s: observer(t, s[0])
    return _heun_batch(states, nu, dt, steps, obs)[0]


def _energy_gradient(states):
    N = states.shape[1]
    k2 = wavenumbers(N).astype(float) ** 2
    sq = np.abs(states) ** 2
    energy = 0.5 * 2.0 * np.pi * sq.sum(axis=1)
    gradient = 2.0 * np.pi * (sq * k2[None, :]).sum(axis=1)
    return energy, gradient


def _moment_rows(t, values, name_mean, name_var):
    n = values.shape[0]
    mean = float(np.mean(values))
    dev = values - mean
    var = float(np.sum(dev ** 2) / (n - 1))
    se_mean = np.sqrt(var / n)
    # standard error of the unbiased sample variance via the fourth moment
    m4 = float(np.mean(dev ** 4))
    se_var = np.sqrt(max(m4 - var ** 2 * (n - 3) / (n - 1), 0.0) / n)
    return [McRow(t, name_mean, mean, se_mean), McRow(t, name_var, var, se_var)]


def mc_statistics(cfg: McConfig, times):
    """Sample statistics of energy and squared gradient norm at the
    requested times (snapped to the step grid).  Returns a list of McRow."""
    steps = n_steps(cfg.t_end, cfg.dt)
    snap = {}
    for t in times:
        if not 0.0 <= t <= cfg.t_end + 1e-12:
            raise ValueError(f"requested time {t} outside [0, t_end]")
        snap[int(round(t / cfg.dt))] = t

    rng = np.random.default_rng(cfg.seed)
    if cfg.antithetic:
        half = rng.uniform(-1.0, 1.0, size=(cfg.n_samples + 1) // 2)
        xis = np.concatenate([half, -half])[: cfg.n_samples]
    else:
        xis = rng.uniform(-1.0, 1.0, size=cfg.n_samples)

    states = _initial_states(xis, cfg.n_modes, cfg.alpha0, cfg.alpha1)
    rows = []

    def observer(j, t, s):
        if j in snap:
            energy, gradient = _energy_gradient(s)
            rows.extend(_moment_rows(snap[j], energy, "mean_energy", "var_energy"))
            rows.extend(_moment_rows(snap[j], gradient, "mean_gradient", "var_gradient"))

    _heun_batch(states, cfg.nu, cfg.dt, steps, observer)
    return rows
