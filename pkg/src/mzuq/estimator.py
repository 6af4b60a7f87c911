"""On-the-fly estimation of the memory length t0 and the adaptive
full-to-reduced switching algorithm.

While the full system is evolved, the memory integrand f, the projected
unresolved forcing q, and the resolved coefficients are sampled every step.
At each estimation step a polynomial equation in y = exp(-2 dt / t0) is
solved by Newton's method so that the reduced model's memory integral
matches the full system's drift of the squared l2 norm of the resolved
variables.  The convergence monitor eps(t) (max change across powers of
y-hat) reaches a minimum at t_min; the run then switches to the reduced
model with t0 = t0_hat(t_min).
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .chaos import quad_product_tensor, triple_product_tensor
from .reduction import (ReductionSpec, pack_reduced, petql_term, plql_kernel,
                        reduced_rhs, unpack_reduced)
from .spectral import BurgersParams, PCField, build_initial_field, full_rhs
from .stats import stat_sample
from .stepping import heun_step, n_steps

__all__ = [
    "NoRootInRange",
    "DegenerateEquation",
    "HistoryCapExceeded",
    "EstimatorHistory",
    "SwitchReport",
    "AdaptiveResult",
    "record_sample",
    "memory_integral",
    "matching_residual",
    "solve_y",
    "t0_from_y",
    "epsilon",
    "adaptive_run",
]

_NEWTON_MAX_ITER = 20
_NEWTON_DY_TOL = 1e-14
_NEWTON_RES_TOL = 1e-13
_SCAN_POINTS = 64
_DEGENERATE_TOL = 1e-14


class NoRootInRange(RuntimeError):
    """The matching condition has no root y in (0, 1) at this step."""


class DegenerateEquation(RuntimeError):
    """Both sides of the matching condition vanish; any y fits."""


class HistoryCapExceeded(RuntimeError):
    """The sample history grew past the configured cap."""


class EstimatorHistory:
    """Uniformly spaced samples of the kernel values f = 2 PLQL, the
    unresolved forcing q = Pe^{tL}QL, and the resolved coefficients."""

    def __init__(self, dt, n_resolved, history_cap=200_000):
        self.dt = dt
        self.n_resolved = n_resolved
        self.history_cap = history_cap
        cap = 256
        self._f = np.empty((cap, n_resolved), dtype=np.complex128)
        self._q = np.empty((cap, n_resolved), dtype=np.complex128)
        self._u = np.empty((cap, n_resolved), dtype=np.complex128)
        self._len = 0
        self.y_hat = None
        self.epsilon_log = []

    def __len__(self):
        return self._len

    @property
    def n_t(self):
        return self._len - 1

    def _ensure_capacity(self):
        if self._len == self._f.shape[0]:
            cap = 2 * self._len
            for name in ("_f", "_q", "_u"):
                old = getattr(self, name)
                new = np.empty((cap, self.n_resolved), dtype=np.complex128)
                new[: self._len] = old
                setattr(self, name, new)

    def append(self, f, q, u):
        if self._len >= self.history_cap:
            raise HistoryCapExceeded(
                f"estimator history exceeded its cap of {self.history_cap} samples")
        self._ensure_capacity()
        self._f[self._len] = f
        self._q[self._len] = q
        self._u[self._len] = u
        self._len += 1

    def f(self, j):
        return self._f[j]

    def q(self, j):
        return self._q[j]

    def u(self, j):
        return self._u[j]

    def f_rows(self, upto):
        return self._f[: upto + 1]


def record_sample(history: EstimatorHistory, t, full_state: PCField, c, lam,
                  params: BurgersParams):
    """Append the sample at t = j*dt; t must follow the uniform grid."""
    j = len(history)
    if abs(t - j * history.dt) > 1e-9 * max(history.dt, 1.0):
        raise ValueError(f"sample time {t} does not match the grid point {j * history.dt}")
    u_hat = np.ascontiguousarray(full_state.coeffs[:, :lam])
    f = 2.0 * plql_kernel(u_hat, c, lam, params)
    q = petql_term(full_state, c, lam)
    history.append(f.ravel(), q.ravel(), u_hat.ravel())
    return history


def memory_integral(history: EstimatorHistory, y, upto=None):
    """Trapezoidal memory integral with exponential weights given as
    powers of y: I = [f(t) + 2 sum_j y^{n_t-j} f(j dt) + y^{n_t} f(0)] dt/2.

    Returns the flat resolved array; ``upto`` restricts the history to the
    first ``upto`` steps (default: all of it).
    """
    nt = history.n_t if upto is None else upto
    if nt < 1:
        raise ValueError("memory integral needs at least two samples")
    wgt = np.empty(nt + 1)
    j = np.arange(nt + 1)
    wgt[:] = 2.0 * y ** (nt - j)
    wgt[0] = y ** nt
    wgt[nt] = 1.0
    return (history.dt / 2.0) * (wgt @ history.f_rows(nt))


def t0_from_y(y, dt):
    """Invert y = exp(-2 dt / t0): t0 = -2 dt / ln y."""
    if not 0.0 < y < 1.0:
        raise ValueError("y must lie strictly inside (0, 1)")
    return -2.0 * dt / np.log(y)


def epsilon(y_prev, y_curr, nt):
    """Convergence monitor: max over l in [1, n_t] of |y_curr^l - y_prev^l|."""
    if nt < 1:
        raise ValueError("n_t must be >= 1")
    ls = np.arange(1, nt + 1)
    return float(np.max(np.abs(y_curr ** ls - y_prev ** ls)))


def _matching_polynomial(history: EstimatorHistory, upto=None):
    """Coefficients a_p of the degree-n_t polynomial in y on the left side
    of the matching condition, and the right-side target."""
    nt = history.n_t if upto is None else upto
    u_t = history.u(nt)
    target = 2.0 * float(np.real(np.vdot(u_t, history.q(nt))))
    g = 2.0 * np.real(history.f_rows(nt) @ np.conj(u_t))
    a = np.zeros(nt + 1)
    a[0] = 0.5 * history.dt * g[nt]
    if nt >= 2:
        # power n_t - j for interior samples j = 1 .. n_t-1
        a[1:nt] = history.dt * g[nt - 1:0:-1]
    a[nt] += 0.5 * history.dt * g[0]
    return a, target


def matching_residual(history: EstimatorHistory, y, upto=None):
    """Signed residual of the matching condition at y; a certificate for
    estimates accepted earlier in the run (``upto`` picks the step)."""
    a, target = _matching_polynomial(history, upto)
    return _poly_and_derivative(a, y)[0] - target


def _poly_and_derivative(a, y):
    powers = y ** np.arange(a.shape[0])
    value = float(a @ powers)
    dpowers = np.arange(a.shape[0]) * a
    deriv = float(dpowers[1:] @ powers[:-1])
    return value, deriv


def _newton(a, target, y0):
    y = y0
    for it in range(1, _NEWTON_MAX_ITER + 1):
        value, deriv = _poly_and_derivative(a, y)
        res = value - target
        if abs(res) < _NEWTON_RES_TOL:
            return y, it
        if deriv == 0.0:
            return None, it
        y_new = y - res / deriv
        if not 0.0 < y_new < 1.0:
            return None, it
        if abs(y_new - y) < _NEWTON_DY_TOL:
            return y_new, it
        y = y_new
    return None, _NEWTON_MAX_ITER


def _bracket_scan(a, target):
    ys = np.linspace(0.0, 1.0, _SCAN_POINTS + 1)
    vals = np.array([_poly_and_derivative(a, y)[0] - target for y in ys])
    brackets = []
    for i in range(_SCAN_POINTS):
        if vals[i] == 0.0 and 0.0 < ys[i] < 1.0:
            brackets.append((ys[i], ys[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            brackets.append((ys[i], ys[i + 1]))
    return brackets


def _bisect(a, target, lo, hi):
    flo = _poly_and_derivative(a, lo)[0] - target
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fmid = _poly_and_derivative(a, mid)[0] - target
        if fmid == 0.0 or hi - lo < 1e-15:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def solve_y(history: EstimatorHistory, y_prev=None):
    """Solve the matching condition for y in (0, 1).

    Newton iteration is seeded from the previous estimate (0.5 by default);
    if it leaves (0, 1) or stalls, a sign-bracketing scan with bisection
    takes over.  On the first estimate the largest bracketed root is taken.
    Returns (y, newton_iterations).
    """
    if history.n_t < 1:
        raise ValueError("need at least two samples to solve for y")
    a, target = _matching_polynomial(history)
    if abs(target) < _DEGENERATE_TOL and np.sum(np.abs(a)) < _DEGENERATE_TOL:
        raise DegenerateEquation("both sides of the matching condition vanish")

    first = y_prev is None
    if not first:
        y, iters = _newton(a, target, y_prev)
        if y is not None:
            return y, iters
    brackets = _bracket_scan(a, target)
    if not brackets:
        raise NoRootInRange("no sign change of the matching condition in (0, 1)")
    if first:
        lo, hi = brackets[-1]
    else:
        lo, hi = min(brackets, key=lambda b: abs(0.5 * (b[0] + b[1]) - y_prev))
    y = _bisect(a, target, lo, hi)
    y = min(max(y, 1e-15), 1.0 - 1e-15)
    polished, iters = _newton(a, target, y)
    if polished is not None:
        return polished, iters
    return y, iters


@dataclass(frozen=True)
class SwitchReport:
    t_min: float
    t0_hat: float
    y_hat: float
    epsilon_min: float
    newton_iterations_max: int


@dataclass
class AdaptiveResult:
    report: SwitchReport
    switched: bool
    stats: list = field(default_factory=list)       # (StatSample, mode) tuples
    estimator_log: list = field(default_factory=list)
    phase1_step_seconds: float = 0.0
    phase2_step_seconds: float = 0.0
    history: EstimatorHistory = None


def adaptive_run(cfg, c=None, d=None):
    """Run the adaptive algorithm end to end.

    Phase 1 evolves the full system, sampling the estimator every step and
    recomputing y-hat each estimation step after a warm-up.  Once eps(t)
    has stayed above its running minimum for ``confirm_window`` estimation
    steps, the run rewinds to t_min and evolves only the reduced model with
    t0 = t0_hat(t_min), the resolved state taken from the recorded full
    trajectory and the memory variable initialized to the history integral
    (which keeps du/dt continuous across the switch).
    """
    N, M, lam = cfg.n_modes, cfg.n_pc, cfg.lam
    if lam >= M:
        raise ValueError("adaptive mode requires lam < M")
    if c is None:
        c = triple_product_tensor(M)
    if d is None:
        d = quad_product_tensor(cfg.lambda_stat)
    params = BurgersParams(cfg.nu, cfg.alpha0, cfg.alpha1)
    dt = cfg.dt
    steps = n_steps(cfg.t_end, dt)
    state = build_initial_field(N, M, cfg.alpha0, cfg.alpha1).coeffs
    hist = EstimatorHistory(dt, N * lam, cfg.history_cap)

    def rhs_full(t, coeffs):
        return full_rhs(PCField(N, M, coeffs), params, c).coeffs

    stats_rows = []
    est_log = []
    estimates = []            # rows parallel to the eps log
    y_prev = None
    eps_min = np.inf
    eps_min_idx = None
    above_min = 0
    iters_max = 0
    confirmed = False
    step_time = 0.0
    steps_done = 0

    for j in range(steps + 1):
        t = j * dt
        record_sample(hist, t, PCField(N, M, state), c, lam, params)
        if j % cfg.out_stride == 0:
            stats_rows.append((stat_sample(t, state, d, cfg.lambda_stat), "full"))
        if j >= cfg.warmup and (j - cfg.warmup) % cfg.stride == 0:
            row = {"t": t, "y_hat": np.nan, "t0_hat": np.nan,
                   "epsilon": np.nan, "newton_iters": 0, "status": "ok"}
            try:
                y, iters = solve_y(hist, y_prev)
            except NoRootInRange:
                row["status"] = "no_root"
            except DegenerateEquation:
                row["status"] = "degenerate"
            else:
                t0_hat = t0_from_y(y, dt)
                row.update(y_hat=y, t0_hat=t0_hat, newton_iters=iters)
                iters_max = max(iters_max, iters)
                if y_prev is not None:
                    eps = epsilon(y_prev, y, hist.n_t)
                    row["epsilon"] = eps
                    estimates.append((t, y, t0_hat, eps))
                    if eps <= eps_min:
                        eps_min = eps
                        eps_min_idx = len(estimates) - 1
                        above_min = 0
                    else:
                        above_min += 1
                y_prev = y
            est_log.append(row)
            if above_min >= cfg.confirm_window:
                confirmed = True
                break
        if j < steps:
            tic = time.perf_counter()
            state = heun_step(state, rhs_full, t, dt)
            step_time += time.perf_counter() - tic
            steps_done += 1

    phase1_per_step = step_time / max(steps_done, 1)

    if eps_min_idx is None:
        report = SwitchReport(np.nan, np.nan, np.nan, np.nan, iters_max)
    else:
        t_min, y_min, t0_min, e_min = estimates[eps_min_idx]
        report = SwitchReport(t_min, t0_min, y_min, e_min, iters_max)

    if not confirmed or eps_min_idx is None:
        return AdaptiveResult(report, False, stats_rows, est_log,
                              phase1_per_step, 0.0, hist)

    # rewind to t_min and hand over to the reduced model
    t_min = report.t_min
    j_min = int(round(t_min / dt))
    stats_rows = [(s, m) for (s, m) in stats_rows if s.t <= t_min + 1e-12]
    u_hat = hist.u(j_min).reshape(N, lam).copy()
    w = np.zeros((cfg.n0, N, lam), dtype=np.complex128)
    w[0] = memory_integral(hist, report.y_hat, upto=j_min).reshape(N, lam)
    spec = ReductionSpec(lam, M, t0=report.t0_hat, n_sub=cfg.n0,
                         memory_enabled=True)

    def rhs_reduced(t, flat):
        uh, ww = unpack_reduced(flat, N, lam, cfg.n0)
        du, dw = reduced_rhs(uh, ww, spec, params, c)
        return pack_reduced(du, dw)

    flat = pack_reduced(u_hat, w)
    remaining = n_steps(cfg.t_end, dt, t_min)
    step_time2 = 0.0
    for jj in range(1, remaining + 1):
        tic = time.perf_counter()
        flat = heun_step(flat, rhs_reduced, t_min + (jj - 1) * dt, dt)
        step_time2 += time.perf_counter() - tic
        if (j_min + jj) % cfg.out_stride == 0:
            uh, _ = unpack_reduced(flat, N, lam, cfg.n0)
            stats_rows.append((stat_sample(t_min + jj * dt, uh, d,
                                           min(cfg.lambda_stat, lam)), "reduced"))
    phase2_per_step = step_time2 / max(remaining, 1)

    return AdaptiveResult(report, True, stats_rows, est_log,
                          phase1_per_step, phase2_per_step, hist)
