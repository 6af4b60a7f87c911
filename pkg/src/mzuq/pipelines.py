"""Run-mode pipelines: full system, Markovian-only and memory reduced
models, each returning a statistics time series plus per-step timing."""

import time
from dataclasses import dataclass, field

import numpy as np

from .chaos import quad_product_tensor, triple_product_tensor
from .reduction import ReductionSpec, pack_reduced, reduced_rhs, unpack_reduced
from .spectral import BurgersParams, PCField, build_initial_field, full_rhs
from .stats import stat_sample
from .stepping import heun_step, n_steps

__all__ = ["RunResult", "run_full", "run_reduced"]


@dataclass
class RunResult:
    stats: list = field(default_factory=list)   # (StatSample, mode) tuples
    step_seconds: float = 0.0
    final_coeffs: np.ndarray = None


def _tensors(cfg, c, d):
    if c is None:
        c = triple_product_tensor(cfg.n_pc)
    if d is None:
        d = quad_product_tensor(cfg.lambda_stat)
    return c, d


def run_full(cfg, c=None, d=None):
    """Evolve the full chaos-coupled system, sampling statistics every
    ``out_stride`` steps."""
    c, d = _tensors(cfg, c, d)
    params = BurgersParams(cfg.nu, cfg.alpha0, cfg.alpha1)
    N, M = cfg.n_modes, cfg.n_pc
    state = build_initial_field(N, M, cfg.alpha0, cfg.alpha1).coeffs
    steps = n_steps(cfg.t_end, cfg.dt)

    def rhs(t, coeffs):
        return full_rhs(PCField(N, M, coeffs), params, c).coeffs

    result = RunResult()
    result.stats.append((stat_sample(0.0, state, d, cfg.lambda_stat), "full"))
    elapsed = 0.0
    for j in range(1, steps + 1):
        tic = time.perf_counter()
        state = heun_step(state, rhs, (j - 1) * cfg.dt, cfg.dt)
        elapsed += time.perf_counter() - tic
        if j % cfg.out_stride == 0:
            result.stats.append((stat_sample(j * cfg.dt, state, d,
                                             cfg.lambda_stat), "full"))
    result.step_seconds = elapsed / max(steps, 1)
    result.final_coeffs = state
    return result


def run_reduced(cfg, with_memory, c=None, d=None):
    """Evolve the reduced model, Markovian-only or with the memory ODEs
    (t0 taken from the config)."""
    c, d = _tensors(cfg, c, d)
    params = BurgersParams(cfg.nu, cfg.alpha0, cfg.alpha1)
    N, M, lam = cfg.n_modes, cfg.n_pc, cfg.lam
    spec = ReductionSpec(lam, M, t0=cfg.t0 if with_memory else 0.0,
                         n_sub=cfg.n0, memory_enabled=with_memory)
    u_hat = build_initial_field(N, M, cfg.alpha0, cfg.alpha1).coeffs[:, :lam].copy()
    w = np.zeros((cfg.n0, N, lam), dtype=np.complex128)
    steps = n_steps(cfg.t_end, cfg.dt)
    lam_stat = min(cfg.lambda_stat, lam)

    def rhs(t, flat):
        uh, ww = unpack_reduced(flat, N, lam, cfg.n0)
        du, dw = reduced_rhs(uh, ww, spec, params, c)
        return pack_reduced(du, dw)

    label = "memory" if with_memory else "markovian"
    flat = pack_reduced(u_hat, w)
    result = RunResult()
    result.stats.append((stat_sample(0.0, u_hat, d, lam_stat), label))
    elapsed = 0.0
    for j in range(1, steps + 1):
        tic = time.perf_counter()
        flat = heun_step(flat, rhs, (j - 1) * cfg.dt, cfg.dt)
        elapsed += time.perf_counter() - tic
        if j % cfg.out_stride == 0:
            uh, _ = unpack_reduced(flat, N, lam, cfg.n0)
            result.stats.append((stat_sample(j * cfg.dt, uh, d, lam_stat),
                                 label))
    result.step_seconds = elapsed / max(steps, 1)
    result.final_coeffs, _ = unpack_reduced(flat, N, lam, cfg.n0)
    return result
