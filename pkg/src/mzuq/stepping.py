"""Second-order explicit time stepping (modified Euler / Heun) over flat
complex state vectors."""

from dataclasses import dataclass

import numpy as np

__all__ = ["IntegrationFailure", "StepperConfig", "heun_step", "evolve", "n_steps"]


class IntegrationFailure(RuntimeError):
    """Raised when a step produces non-finite values; carries the time."""

    def __init__(self, t):
        super().__init__(f"integration produced non-finite values at t = {t:.6g}")
        self.t = t


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    t_end: float
    observe_every: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.t_end < self.dt:
            raise ValueError("t_end must be >= dt")
        if self.observe_every < 1:
            raise ValueError("observer stride must be >= 1")


def heun_step(state, rhs, t, dt):
    """One explicit-trapezoidal step: u + dt/2 (k1 + k2) with
    k1 = rhs(t, u) and k2 = rhs(t + dt, u + dt k1)."""
    k1 = rhs(t, state)
    k2 = rhs(t + dt, state + dt * k1)
    new = state + (0.5 * dt) * (k1 + k2)
    if not np.all(np.isfinite(new.view(np.float64))):
        raise IntegrationFailure(t)
    return new


def n_steps(t_end, dt, t_start=0.0):
    return int(round((t_end - t_start) / dt))


def evolve(state, rhs, config: StepperConfig, observer=None, t_start=0.0):
    """Repeated Heun steps from t_start to t_end.

    The observer, when given, is invoked with (t, state) at t_start and then
    every ``observe_every`` steps; it may record but must not mutate.
    """
    steps = n_steps(config.t_end, config.dt, t_start)
    t = t_start
    if observer is not None:
        observer(t, state)
    for j in range(1, steps + 1):
        state = heun_step(state, rhs, t, config.dt)
        t = t_start + j * config.dt
        if observer is not None and j % config.observe_every == 0:
            observer(t, state)
    return state
