import numpy as np
import pytest

from mzuq import kernels
from mzuq.chaos import triple_product_tensor
from mzuq.spectral import (BurgersParams, PCField, build_initial_field,
                           full_rhs, truncated_convolution, wavenumbers)

from conftest import random_reality_field

SIN_HALF = 4  # index of k = 0 for N = 8


def sin_band(N):
    """Coefficients of sin x on the band: a_{+-1} = -+ i/2."""
    a = np.zeros(N, dtype=np.complex128)
    a[N // 2 + 1] = -0.5j
    a[N // 2 - 1] = 0.5j
    return a


class TestInitialField:
    def test_sin_x_times_chaos(self):
        u = build_initial_field(8, 2, 1.0, 1.0)
        half = 4
        assert u.coeffs[half + 1, 0] == -0.5j
        assert u.coeffs[half - 1, 1] == 0.5j
        nonzero = np.argwhere(u.coeffs != 0)
        assert {tuple(x) for x in nonzero} == {(half + 1, 0), (half - 1, 0),
                                               (half + 1, 1), (half - 1, 1)}

    def test_deterministic_when_alpha1_zero(self):
        u = build_initial_field(8, 2, 1.0, 0.0)
        assert np.all(u.coeffs[:, 1] == 0)

    def test_reality_invariant(self):
        u = build_initial_field(16, 3, 2.0, -1.5)
        assert u.reality_defect() == 0.0

    def test_rejects_small_chaos_order(self):
        with pytest.raises(ValueError):
            build_initial_field(8, 1)

    def test_rejects_odd_or_small_bands(self):
        with pytest.raises(ValueError):
            build_initial_field(7, 2)
        with pytest.raises(ValueError):
            build_initial_field(2, 2)


class TestTruncatedConvolution:
    def test_sin_squared_at_zero(self):
        a = sin_band(8)
        conv = truncated_convolution(a, a)
        assert conv[SIN_HALF] == pytest.approx(0.5)

    def test_single_pair_at_band_edge(self):
        # band [-2, 1]: k = -2 only from the pair (-1, -1)
        a = sin_band(4)
        conv = truncated_convolution(a, a)
        assert conv[0] == pytest.approx((0.5j) ** 2)

    def test_no_in_band_pair(self):
        a = sin_band(8)
        conv = truncated_convolution(a, a)
        assert conv[SIN_HALF + 1] == 0.0

    def test_matches_enumeration(self, rng):
        N = 16
        a = rng.normal(size=N) + 1j * rng.normal(size=N)
        b = rng.normal(size=N) + 1j * rng.normal(size=N)
        conv = truncated_convolution(a, b)
        k = wavenumbers(N)
        for ik in range(N):
            acc = sum(a[ip] * b[iq] for ip in range(N) for iq in range(N)
                      if k[ip] + k[iq] == k[ik])
            assert conv[ik] == pytest.approx(acc, abs=1e-12)

    def test_matches_fft_path(self, rng):
        # zero-padded transform evaluation of the same truncated sum
        N = 32
        a = rng.normal(size=N) + 1j * rng.normal(size=N)
        b = rng.normal(size=N) + 1j * rng.normal(size=N)
        half = N // 2
        fft_conv = np.fft.ifft(np.fft.fft(a, 2 * N) * np.fft.fft(b, 2 * N))
        np.testing.assert_allclose(truncated_convolution(a, b),
                                   fft_conv[half:half + N], atol=1e-12)


class TestFullRhs:
    def test_deterministic_quadratic_term(self):
        # -u u_x of sin x projects to -(1/2) sin 2x: du_2/dt = i/4
        c = triple_product_tensor(2)
        u = build_initial_field(8, 2, 1.0, 0.0)
        d = full_rhs(u, BurgersParams(0.0), c)
        assert d.coeffs[SIN_HALF + 2, 0] == pytest.approx(0.25j)

    def test_zero_mode_row_is_zero(self, rng):
        c = triple_product_tensor(3)
        u = random_reality_field(rng, 16, 3)
        d = full_rhs(u, BurgersParams(0.5), c)
        assert np.all(d.coeffs[8, :] == 0)

    def test_viscous_only_at_k_one(self):
        c = triple_product_tensor(2)
        u = build_initial_field(8, 2, 1.0, 0.0)
        d = full_rhs(u, BurgersParams(0.03), c)
        assert d.coeffs[SIN_HALF + 1, 0] == pytest.approx(0.015j)

    def test_reality_preservation(self, rng):
        c = triple_product_tensor(4)
        u = random_reality_field(rng, 32, 4)
        d = full_rhs(u, BurgersParams(0.1), c)
        assert PCField(32, 4, d.coeffs).reality_defect() < 1e-13

    @pytest.mark.parametrize("N,M", [(16, 2), (32, 4)])
    def test_inviscid_energy_conservation(self, rng, N, M):
        c = triple_product_tensor(M)
        u = random_reality_field(rng, N, M, scale=0.5)
        d = full_rhs(u, BurgersParams(0.0), c)
        inv = 1.0 / (2.0 * np.arange(M) + 1.0)
        drift = np.real(np.sum(d.coeffs * np.conj(u.coeffs) * inv[None, :]))
        assert abs(drift) < 1e-10

    def test_dissipation_identity(self, rng):
        nu = 0.07
        N, M = 32, 4
        c = triple_product_tensor(M)
        u = random_reality_field(rng, N, M, scale=0.5)
        d = full_rhs(u, BurgersParams(nu), c)
        inv = 1.0 / (2.0 * np.arange(M) + 1.0)
        lhs = np.real(np.sum(d.coeffs * np.conj(u.coeffs) * inv[None, :]))
        k2 = wavenumbers(N).astype(float) ** 2
        rhs = -nu * np.sum(k2[:, None] * np.abs(u.coeffs) ** 2 * inv[None, :])
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_deterministic_limit_matches_scalar_galerkin(self, rng):
        # M = 1 chaos collapses to the scalar Fourier-Galerkin Burgers ODE
        N = 16
        nu = 0.05
        c = triple_product_tensor(1)
        a = random_reality_field(rng, N, 1).coeffs
        d = full_rhs(PCField(N, 1, a), BurgersParams(nu), c).coeffs[:, 0]
        k = wavenumbers(N)
        expect = (-0.5j * k) * truncated_convolution(a[:, 0], a[:, 0]) \
            - nu * k ** 2 * a[:, 0]
        expect[0] = 0.0
        np.testing.assert_allclose(d, expect, atol=1e-13)


class TestBackends:
    def test_numpy_and_numba_agree(self, rng):
        if "numba" not in kernels.available_backends():
            pytest.skip("numba backend not available")
        c = triple_product_tensor(4)
        u = random_reality_field(rng, 32, 4)
        results = {}
        for name in ("numpy", "numba"):
            previous = kernels.set_backend(name)
            try:
                results[name] = full_rhs(u, BurgersParams(0.03), c).coeffs
            finally:
                kernels.set_backend(previous)
        np.testing.assert_allclose(results["numpy"], results["numba"], atol=1e-12)

    def test_env_flag_selects_backend(self, tmp_path):
        import os
        import subprocess
        import sys
        code = "from mzuq import kernels; print(kernels.get_backend())"
        env = dict(os.environ, MZUQ_BACKEND="numpy")
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        assert out.stdout.strip() == "numpy"
