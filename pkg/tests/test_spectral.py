import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flsuite.harness import corpus
from flsuite.legendre_core import gauss_rule
from flsuite.spectral import (
    coefficients,
    default_quad_order,
    partial_sum,
    partial_sum_grid,
    partial_sum_kernel,
    sup_error,
)

from oracles import orthonormal_legendre


def one(x, y):
    return np.ones_like(x)


def xy(x, y):
    return x * y


def poly_fn(C):
    return lambda x, y: np.polynomial.polynomial.polyval2d(x, y, C)


class TestCoefficients:
    def test_constant(self):
        C = coefficients(one, 1, 1, gauss_rule(4))
        assert C.values[0, 0] == pytest.approx(2.0, abs=1e-14)
        assert C.quad_order == 4

    def test_xy(self):
        C = coefficients(xy, 2, 2, gauss_rule(4)).values
        assert C[1, 1] == pytest.approx(2 / 3, abs=1e-13)
        for n, m in [(0, 0), (0, 1), (1, 0)]:
            assert abs(C[n, m]) <= 1e-13

    def test_x_only(self):
        C = coefficients(lambda x, y: x, 2, 2, gauss_rule(4)).values
        assert C[1, 0] == pytest.approx(2 / math.sqrt(3), abs=1e-13)
        for n, m in [(0, 0), (0, 1), (1, 1)]:
            assert abs(C[n, m]) <= 1e-13

    def test_against_scipy_dblquad(self):
        from scipy.integrate import dblquad

        f = corpus("smooth_osc", a=0.5)
        C = coefficients(f, 4, 3, gauss_rule(80)).values
        for n, m in [(0, 0), (1, 1), (3, 2), (2, 0)]:
            ref, _ = dblquad(
                lambda t, s: float(f(s, t)) * orthonormal_legendre(n, s) * orthonormal_legendre(m, t),
                -1, 1, -1, 1, epsabs=1e-12, epsrel=1e-12,
            )
            assert C[n, m] == pytest.approx(ref, abs=1e-10)

    def test_polynomial_modes_vanish(self):
        rng = np.random.default_rng(3)
        d = 5
        Cm = rng.normal(size=(d, d))
        N = 9
        C = coefficients(poly_fn(Cm), N, N, gauss_rule(d + N)).values
        assert np.max(np.abs(C[d:, :])) <= 1e-10
        assert np.max(np.abs(C[:, d:])) <= 1e-10

    def test_symmetry(self):
        f = corpus("smooth_osc")
        C = coefficients(f, 12, 12).values
        np.testing.assert_allclose(C, C.T, atol=1e-12, rtol=0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError), np.errstate(divide="ignore", invalid="ignore"):
            coefficients(lambda x, y: 1.0 / (x - x), 2, 2, gauss_rule(4))

    def test_propagates_evaluation_failure(self):
        def boom(x, y):
            raise RuntimeError("eval failed")

        with pytest.raises(RuntimeError):
            coefficients(boom, 2, 2)

    def test_warns_on_low_order(self):
        with pytest.warns(RuntimeWarning):
            coefficients(one, 8, 8, gauss_rule(4))

    def test_immutable(self):
        C = coefficients(one, 2, 2)
        with pytest.raises(ValueError):
            C.values[0, 0] = 1.0

    def test_quad_policy(self):
        assert default_quad_order(10, 4) == 42
        assert default_quad_order(10, 4, kinked=True) == 40


class TestPartialSum:
    def test_constant(self):
        C = coefficients(one, 1, 1, gauss_rule(4))
        assert partial_sum(C, 1, 1, 0.37, -0.81).value == pytest.approx(1.0, abs=1e-14)

    def test_xy_reproduced(self):
        C = coefficients(xy, 2, 2, gauss_rule(4))
        assert partial_sum(C, 2, 2, 0.3, -0.4).value == pytest.approx(-0.12, abs=1e-14)

    def test_xy_truncated(self):
        C = coefficients(xy, 2, 2, gauss_rule(4))
        assert abs(partial_sum(C, 1, 1, 0.3, -0.4).value) <= 1e-14

    def test_index_error(self):
        C = coefficients(xy, 2, 2, gauss_rule(4))
        with pytest.raises(IndexError):
            partial_sum(C, 3, 2, 0.0, 0.0)

    def test_asymmetric_orders(self):
        # x^2 needs three x-modes and one y-mode
        f = lambda x, y: x * x
        C = coefficients(f, 3, 1, gauss_rule(6))
        assert partial_sum(C, 3, 1, 0.7, -0.2).value == pytest.approx(0.49, abs=1e-13)
        assert partial_sum(C, 2, 1, 0.7, -0.2).value == pytest.approx(1 / 3, abs=1e-13)

    def test_grid_matches_pointwise(self):
        C = coefficients(corpus("smooth_osc"), 10, 7)
        xs, ys = np.linspace(-1, 1, 5), np.linspace(-0.9, 0.6, 4)
        G = partial_sum_grid(C, 10, 7, xs, ys)
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                assert G[i, j] == pytest.approx(partial_sum(C, 10, 7, x, y).value, abs=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(a=st.integers(0, 6), b=st.integers(0, 6), seed=st.integers(0, 2**16))
    def test_projection_identity(self, a, b, seed):
        rng = np.random.default_rng(seed)
        Cm = rng.normal(size=(a + 1, b + 1))
        f = poly_fn(Cm)
        C = coefficients(f, a + 1, b + 1)
        pts = rng.uniform(-1, 1, size=(20, 2))
        for x, y in pts:
            assert partial_sum(C, a + 1, b + 1, x, y).value == pytest.approx(float(f(x, y)), abs=1e-9)

    def test_idempotence(self):
        f = corpus("abs_power", alpha=0.5)
        N = M = 10
        C = coefficients(f, N, M, gauss_rule(60))

        def proj(x, y):
            out = np.empty(x.shape)
            for idx in np.ndindex(x.shape):
                out[idx] = partial_sum(C, N, M, x[idx], y[idx]).value
            return out

        C2 = coefficients(proj, N, M, gauss_rule(20))
        np.testing.assert_allclose(C2.values, C.values, atol=1e-9, rtol=0)


class TestKernelPath:
    def test_constant(self):
        assert partial_sum_kernel(one, 1, 1, 0.0, 0.0, gauss_rule(4)).value == pytest.approx(1.0, abs=1e-14)

    def test_xy(self):
        assert partial_sum_kernel(xy, 2, 2, 0.3, -0.4, gauss_rule(4)).value == pytest.approx(-0.12, abs=1e-10)

    def test_x_squared(self):
        f = lambda x, y: x * x
        assert partial_sum_kernel(f, 3, 3, 0.5, 0.5, gauss_rule(6)).value == pytest.approx(0.25, abs=1e-10)

    @pytest.mark.parametrize("name", ["abs_sum", "smooth_osc", "pbv_p", "abs_power", "polynomial"])
    def test_two_path_agreement(self, name):
        f = corpus(name)
        rule = gauss_rule(64)
        rng = np.random.default_rng(7)
        for N, M in [(1, 1), (5, 9), (32, 32), (17, 3)]:
            C = coefficients(f, N, M, rule)
            for x, y in rng.uniform(-1, 1, size=(4, 2)):
                a = partial_sum(C, N, M, x, y).value
                b = partial_sum_kernel(f, N, M, x, y, rule).value
                assert abs(a - b) <= 1e-8 * (1 + abs(a))

    def test_rule_too_small(self):
        with pytest.raises(ValueError):
            partial_sum_kernel(one, 8, 8, 0.0, 0.0, gauss_rule(4))


class TestSupError:
    def test_constant(self):
        C = coefficients(one, 3, 3)
        assert sup_error(one, C, 1, 1, 0.2, 11) <= 1e-12
        assert sup_error(one, C, 3, 2, 0.2, 11) <= 1e-12

    def test_xy(self):
        C = coefficients(xy, 2, 2, gauss_rule(4))
        assert sup_error(xy, C, 2, 2, 0.1, 21) <= 1e-10

    def test_abs_sum_decays(self):
        f = corpus("abs_sum")
        C = coefficients(f, 64, 64, gauss_rule(256))
        assert sup_error(f, C, 64, 64, 0.25, 41) < sup_error(f, C, 4, 4, 0.25, 41)

    def test_lattice_includes_corners(self):
        # f = x + y is reproduced by 2 modes, so error comes only from the truncation
        f = lambda x, y: x + y
        C = coefficients(f, 2, 2)
        err = sup_error(f, C, 1, 1, 0.5, 2)
        assert err == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("eps, g", [(0.0, 5), (1.0, 5), (0.2, 1)])
    def test_validation(self, eps, g):
        C = coefficients(one, 1, 1)
        with pytest.raises(ValueError):
            sup_error(one, C, 1, 1, eps, g)
