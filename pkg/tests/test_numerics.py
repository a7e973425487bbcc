import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from pdpmc.numerics import (
    BracketError,
    NonConvergenceError,
    NonHermitianError,
    RngStream,
    find_root_increasing,
    gauss_legendre,
    hermitian_eig,
    sine_integral,
)
from pdpmc.two_band import integral_h


def sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


class TestSineIntegral:
    def test_zero(self):
        assert sine_integral(0.0) == 0.0

    def test_asymptote(self):
        # Si -> pi/2; the leading correction at 1e4 is cos(x)/x ~ 1e-4
        assert abs(sine_integral(1e4) - math.pi / 2) < 2e-4

    def test_value_at_pi(self):
        # adaptive-quadrature oracle of the integrand sin(u)/u
        oracle, err = quad(sinc, 0.0, math.pi, epsabs=1e-14)
        assert err < 1e-12
        assert abs(oracle - 1.851937051982466) < 1e-12
        assert abs(sine_integral(math.pi) - oracle) < 1e-12

    def test_against_quadrature_on_random_points(self):
        rng = np.random.default_rng(20240401)
        xs = rng.uniform(0.0, 100.0, size=1000)
        for x in xs:
            ref = quad(sinc, 0.0, x, epsabs=1e-13, limit=300)[0]
            assert abs(sine_integral(float(x)) - ref) <= 1e-10

    def test_monotone_on_first_arch(self):
        xs = np.linspace(0.0, math.pi, 400)
        vals = sine_integral(xs)
        assert np.all(np.diff(vals) > 0)

    def test_odd_extension(self):
        for x in (0.3, 2.0, 7.7, 42.0):
            assert sine_integral(-x) == -sine_integral(x)

    def test_array_matches_scalar(self):
        xs = np.array([0.0, 1e-8, 0.5, 3.999, 4.0, 17.3, 5000.0])
        arr = sine_integral(xs)
        for x, v in zip(xs, arr):
            assert v == pytest.approx(sine_integral(float(x)), abs=1e-15)


class TestGaussLegendre:
    def test_constant(self):
        assert gauss_legendre(lambda x: np.ones_like(x), 0.0, 1.0, 1e-12) == pytest.approx(1.0, abs=1e-14)

    def test_sine(self):
        assert gauss_legendre(np.sin, 0.0, math.pi, 1e-12) == pytest.approx(2.0, abs=1e-10)

    def test_correlation_kernel_closed_form(self):
        # integral of the squared-sinc kernel matches its Si-based closed form
        de = 0.31

        def h(t):
            return de / (2 * math.pi) * sinc(de * t / 2) ** 2

        val = gauss_legendre(h, 0.0, 20.0, 1e-12)
        closed = (sine_integral(6.2) + (math.cos(6.2) - 1.0) / 6.2) / math.pi
        assert val == pytest.approx(closed, abs=1e-10)

    def test_against_integral_h_on_random_intervals(self):
        de = 0.31

        def h(t):
            return de / (2 * math.pi) * sinc(de * t / 2) ** 2

        rng = np.random.default_rng(7)
        for _ in range(100):
            a, b = np.sort(rng.uniform(0.0, 50.0, size=2))
            val = gauss_legendre(h, float(a), float(b), 1e-10)
            closed = integral_h(float(b), de) - integral_h(float(a), de)
            assert abs(val - closed) <= 1e-8

    def test_empty_interval(self):
        assert gauss_legendre(np.sin, 2.0, 2.0, 1e-10) == 0.0

    def test_panel_cap(self):
        with pytest.raises(NonConvergenceError):
            gauss_legendre(lambda x: np.sin(1e4 * x), 0.0, 20.0, 1e-14, max_panels=8)

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            gauss_legendre(np.sin, 1.0, 0.0, 1e-10)


class TestFindRootIncreasing:
    def test_linear(self):
        assert find_root_increasing(lambda x: x - 1.0, 0.0, 2.0, 1e-14) == pytest.approx(1.0, abs=1e-12)

    def test_sqrt2(self):
        root = find_root_increasing(lambda x: x * x - 2.0, 0.0, 2.0, 1e-14)
        assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_invalid_bracket(self):
        with pytest.raises(BracketError):
            find_root_increasing(lambda x: x + 1.0, 0.0, 2.0, 1e-12)

    def test_endpoint_roots(self):
        assert find_root_increasing(lambda x: x, 0.0, 1.0, 1e-12) == 0.0
        assert find_root_increasing(lambda x: x - 1.0, 0.0, 1.0, 1e-12) == 1.0

    @given(st.floats(0.01, 0.99), st.floats(0.2, 5.0))
    @settings(max_examples=100, deadline=None)
    def test_exponential_inversion(self, u, rate):
        # survival of a constant-rate process: root of u - exp(-rate t)
        root = find_root_increasing(lambda t: u - math.exp(-rate * t), 0.0, 1e4, 1e-13)
        assert root == pytest.approx(-math.log(u) / rate, rel=1e-9)


class TestHermitianEig:
    def test_sigma_z(self):
        vals, _ = hermitian_eig(np.diag([1.0, -1.0]).astype(complex))
        assert np.allclose(vals, [-1.0, 1.0])

    def test_sigma_x(self):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        vals, vecs = hermitian_eig(sx)
        assert np.allclose(vals, [-1.0, 1.0])
        # eigenvectors are (|0> -+ |1>)/sqrt(2) up to phase
        for k, sign in ((0, -1.0), (1, 1.0)):
            v = vecs[:, k]
            v = v / v[0]
            assert v[1] == pytest.approx(sign, abs=1e-12)

    def test_large_random_reconstruction(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(400, 400)) + 1j * rng.normal(size=(400, 400))
        h = (a + a.conj().T) / 2
        vals, vecs = hermitian_eig(h)
        assert np.all(np.diff(vals) >= 0)
        recon = (vecs * vals) @ vecs.conj().T
        assert np.linalg.norm(recon - h) <= 1e-10 * np.linalg.norm(h)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.zeros((2, 3), dtype=complex))


class TestRngStream:
    def test_determinism(self):
        a = RngStream(99, 7)
        b = RngStream(99, 7)
        assert [a.uniform() for _ in range(50)] == [b.uniform() for _ in range(50)]
        assert np.array_equal(RngStream(99, 7).normal_array(64), RngStream(99, 7).normal_array(64))

    def test_streams_differ(self):
        a = RngStream(99, 0)
        b = RngStream(99, 1)
        assert [a.uniform() for _ in range(8)] != [b.uniform() for _ in range(8)]

    def test_uniform_open_interval(self):
        gen = RngStream(5, 0)
        us = np.array([gen.uniform() for _ in range(200000)])
        assert us.min() > 0.0
        assert us.max() < 1.0

    def test_complex_gaussian_moments(self):
        gen = RngStream(11, 0)
        draws = gen.complex_normal_array(1_000_000)
        assert abs(np.mean(draws)) < 0.005
        second = np.mean(np.abs(draws) ** 2)
        assert 0.995 <= second <= 1.005

    def test_real_gaussian_moments(self):
        gen = RngStream(13, 0)
        draws = gen.normal_array(1_000_000)
        assert abs(draws.mean()) < 0.005
        assert abs(draws.var() - 1.0) < 0.01

    def test_seed_range_validation(self):
        with pytest.raises(ValueError):
            RngStream(-1, 0)
        with pytest.raises(ValueError):
            RngStream(0, 2**64)
