import numpy as np
import pytest

from mzuq.chaos import triple_product_tensor
from mzuq.config import RunConfig
from mzuq.estimator import (DegenerateEquation, EstimatorHistory,
                            HistoryCapExceeded, NoRootInRange, adaptive_run,
                            epsilon, memory_integral, record_sample, solve_y,
                            t0_from_y)
from mzuq.reduction import petql_term, plql_kernel, project
from mzuq.spectral import BurgersParams, PCField, build_initial_field, full_rhs
from mzuq.stepping import heun_step

from conftest import random_reality_field


def scalar_history(dt, f_values, q_values, u_values):
    h = EstimatorHistory(dt, 1)
    for f, q, u in zip(f_values, q_values, u_values):
        h.append(np.array([f + 0j]), np.array([q + 0j]), np.array([u + 0j]))
    return h


class TestRecordSample:
    def test_first_sample_sets_nt_zero(self, rng):
        N, M, lam = 16, 3, 2
        c = triple_product_tensor(M)
        h = EstimatorHistory(0.01, N * lam)
        u = random_reality_field(rng, N, M)
        record_sample(h, 0.0, u, c, lam, BurgersParams(0.03))
        assert h.n_t == 0

    def test_rejects_off_grid_time(self, rng):
        N, M, lam = 16, 3, 2
        c = triple_product_tensor(M)
        h = EstimatorHistory(0.01, N * lam)
        u = random_reality_field(rng, N, M)
        record_sample(h, 0.0, u, c, lam, BurgersParams(0.03))
        with pytest.raises(ValueError):
            record_sample(h, 0.017, u, c, lam, BurgersParams(0.03))

    def test_projected_state_gives_zero_q(self, rng):
        N, M, lam = 16, 4, 2
        c = triple_product_tensor(M)
        h = EstimatorHistory(0.01, N * lam)
        u = project(random_reality_field(rng, N, M), lam)
        record_sample(h, 0.0, u, c, lam, BurgersParams(0.03))
        assert np.all(h.q(0) == 0)

    def test_samples_replay_deterministically(self, rng):
        N, M, lam = 16, 3, 2
        c = triple_product_tensor(M)
        params = BurgersParams(0.03)
        h = EstimatorHistory(0.01, N * lam)
        u = random_reality_field(rng, N, M)
        record_sample(h, 0.0, u, c, lam, params)
        u_hat = np.ascontiguousarray(u.coeffs[:, :lam])
        np.testing.assert_array_equal(h.f(0) / 2.0,
                                      plql_kernel(u_hat, c, lam, params).ravel())
        np.testing.assert_array_equal(h.q(0), petql_term(u, c, lam).ravel())

    def test_history_cap_aborts(self, rng):
        N, M, lam = 16, 3, 2
        c = triple_product_tensor(M)
        h = EstimatorHistory(0.01, N * lam, history_cap=2)
        u = random_reality_field(rng, N, M)
        record_sample(h, 0.0, u, c, lam, BurgersParams(0.03))
        record_sample(h, 0.01, u, c, lam, BurgersParams(0.03))
        with pytest.raises(HistoryCapExceeded):
            record_sample(h, 0.02, u, c, lam, BurgersParams(0.03))


class TestMemoryIntegral:
    def test_two_point_rule(self):
        h = scalar_history(0.1, [4.0, 2.0], [0, 0], [1, 1])
        assert memory_integral(h, 0.5)[0] == pytest.approx((2.0 + 0.5 * 4.0) * 0.05)

    def test_tiny_y_keeps_only_endpoint(self):
        h = scalar_history(0.1, [4.0, 3.0, 2.0], [0, 0, 0], [1, 1, 1])
        assert memory_integral(h, 1e-300)[0] == pytest.approx(2.0 * 0.05)

    def test_unit_y_constant_integrand(self):
        const = 3.0
        h = scalar_history(0.1, [const] * 6, [0] * 6, [1] * 6)
        # trapezoid of a constant over [0, n_t dt]
        assert memory_integral(h, 1.0)[0] == pytest.approx(const * 0.1 * 5)

    def test_needs_two_samples(self):
        h = scalar_history(0.1, [4.0], [0], [1])
        with pytest.raises(ValueError):
            memory_integral(h, 0.5)


class TestSolveY:
    def test_linear_case(self):
        h = scalar_history(0.1, [4.0, 2.0], [0.0, 0.25], [1.0, 1.0])
        y, iters = solve_y(h)
        assert y == pytest.approx(0.75, abs=1e-13)
        assert iters <= 20

    def test_no_root_in_range(self):
        h = scalar_history(0.1, [4.0, 2.0], [0.0, 0.35], [1.0, 1.0])
        with pytest.raises(NoRootInRange):
            solve_y(h)

    def test_degenerate_equation(self):
        h = scalar_history(0.1, [0.0, 0.0], [0.0, 0.0], [1.0, 1.0])
        with pytest.raises(DegenerateEquation):
            solve_y(h)

    def test_newton_seeded_from_previous_estimate(self):
        h = scalar_history(0.1, [4.0, 2.0], [0.0, 0.25], [1.0, 1.0])
        y, iters = solve_y(h, y_prev=0.74)
        assert y == pytest.approx(0.75, abs=1e-13)
        assert iters <= 3

    def test_residual_certificate_on_spectral_run(self, rng):
        # short full-system run; every accepted estimate satisfies the
        # polynomial residual bound
        from mzuq.estimator import _matching_polynomial, _poly_and_derivative
        N, M, lam = 16, 4, 2
        c = triple_product_tensor(M)
        params = BurgersParams(0.05)
        dt = 0.005
        state = build_initial_field(N, M).coeffs
        h = EstimatorHistory(dt, N * lam)
        rhs = lambda t, co: full_rhs(PCField(N, M, co), params, c).coeffs
        y_prev = None
        for j in range(80):
            record_sample(h, j * dt, PCField(N, M, state), c, lam, params)
            if j >= 10:
                y_prev, iters = solve_y(h, y_prev)
                a, target = _matching_polynomial(h)
                assert abs(_poly_and_derivative(a, y_prev)[0] - target) < 1e-12
                assert iters <= 20
            state = heun_step(state, rhs, j * dt, dt)


class TestT0FromY:
    def test_analytic_inversion(self):
        assert t0_from_y(np.exp(-1.0), 0.001) == pytest.approx(0.002, rel=1e-13)

    def test_direct_value(self):
        assert t0_from_y(0.5, 0.1) == pytest.approx(0.2 / np.log(2.0), rel=1e-13)

    def test_round_trip_with_reported_memory_length(self):
        # y for t0 = 0.3783 at dt = 0.001, then back
        y = np.exp(-0.002 / 0.3783)
        assert y == pytest.approx(0.994727, abs=1e-6)
        assert t0_from_y(y, 0.001) == pytest.approx(0.3783, rel=1e-12)

    @pytest.mark.parametrize("t0", [1e-3, 0.1, 1.0, 37.0, 1e3])
    def test_round_trip_identity(self, t0):
        # log(1 - eps) cancellation limits accuracy when t0 >> dt
        dt = 0.001
        rel = 1e-12 if t0 <= 1.0 else 1e-8
        assert t0_from_y(np.exp(-2.0 * dt / t0), dt) == pytest.approx(t0, rel=rel)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            t0_from_y(1.0, 0.1)
        with pytest.raises(ValueError):
            t0_from_y(0.0, 0.1)


class TestEpsilon:
    def test_zero_iff_equal(self):
        assert epsilon(0.5, 0.5, 7) == 0.0
        assert epsilon(0.5, 0.50001, 7) > 0.0

    def test_enumerated_powers(self):
        assert epsilon(0.5, 0.6, 2) == pytest.approx(0.11)

    def test_single_power(self):
        assert epsilon(0.9, 0.8, 1) == pytest.approx(0.1)

    def test_nonnegative(self, rng):
        for _ in range(50):
            a, b = rng.uniform(0.01, 0.99, size=2)
            assert epsilon(a, b, 10) >= 0.0


def small_adaptive_config(**kw):
    base = dict(mode="adaptive", nu=0.05, n_modes=32, n_pc=4, lam=2, dt=0.002,
                t_end=1.5, warmup=20, confirm_window=10, out_stride=5)
    base.update(kw)
    return RunConfig(**base).validate()


class TestAdaptiveRun:
    def test_switch_happens_at_logged_argmin(self):
        cfg = small_adaptive_config()
        res = adaptive_run(cfg)
        assert res.switched
        logged = [(r["t"], r["epsilon"], r["y_hat"], r["t0_hat"])
                  for r in res.estimator_log
                  if r["status"] == "ok" and not np.isnan(r["epsilon"])]
        t_arg, eps_min, y_min, t0_min = min(logged, key=lambda r: r[1])
        assert res.report.t_min == pytest.approx(t_arg)
        assert res.report.epsilon_min == pytest.approx(eps_min)
        assert res.report.y_hat == pytest.approx(y_min)
        assert res.report.t0_hat == pytest.approx(t0_min)

    def test_continuity_of_drift_across_switch(self):
        # by construction the reduced model's du/dt at the switch equals
        # Markovian + history integral
        from mzuq.reduction import ReductionSpec, markovian_rhs, reduced_rhs
        cfg = small_adaptive_config()
        res = adaptive_run(cfg)
        assert res.switched
        N, lam = cfg.n_modes, cfg.lam
        c = triple_product_tensor(cfg.n_pc)
        params = BurgersParams(cfg.nu)
        j_min = int(round(res.report.t_min / cfg.dt))
        u_hat = res.history.u(j_min).reshape(N, lam)
        w = np.zeros((1, N, lam), dtype=np.complex128)
        w[0] = memory_integral(res.history, res.report.y_hat,
                               upto=j_min).reshape(N, lam)
        spec = ReductionSpec(lam, cfg.n_pc, t0=res.report.t0_hat)
        du, _ = reduced_rhs(u_hat, w, spec, params, c)
        expect = markovian_rhs(np.ascontiguousarray(u_hat), params, c, lam) + w[0]
        expect[0, :] = 0.0
        np.testing.assert_allclose(du, expect, atol=1e-14)

    def test_stats_switch_mode_labels(self):
        cfg = small_adaptive_config()
        res = adaptive_run(cfg)
        modes = [m for _, m in res.stats]
        times = [s.t for s, _ in res.stats]
        assert modes[0] == "full" and modes[-1] == "reduced"
        flip = modes.index("reduced")
        assert all(m == "full" for m in modes[:flip])
        assert all(m == "reduced" for m in modes[flip:])
        assert times == sorted(times)
        assert times[-1] == pytest.approx(cfg.t_end, abs=cfg.out_stride * cfg.dt)

    def test_no_switch_completes_in_full_mode(self):
        cfg = small_adaptive_config(t_end=0.1, warmup=20, confirm_window=1000)
        res = adaptive_run(cfg)
        assert not res.switched
        assert all(m == "full" for _, m in res.stats)

    def test_failed_estimates_keep_epsilon_log_untouched(self):
        cfg = small_adaptive_config()
        res = adaptive_run(cfg)
        for row in res.estimator_log:
            if row["status"] != "ok":
                assert np.isnan(row["epsilon"])
