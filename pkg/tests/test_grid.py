"""Log-spaced radial grids, sampled radial functions, weighted quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fraclab as fl


class TestMakeLogGrid:
    def test_geometric_midpoint(self):
        g = fl.make_log_grid(1e-6, 1e6, 9)
        assert g.nodes[0] == pytest.approx(1e-6, rel=1e-12)
        assert g.nodes[4] == pytest.approx(1.0, rel=1e-12)
        assert g.nodes[8] == pytest.approx(1e6, rel=1e-12)

    def test_constant_node_ratio(self):
        g = fl.make_log_grid(1.0, 2.0, 8)
        ratios = g.nodes[1:] / g.nodes[:-1]
        assert np.allclose(ratios, 2.0 ** (1.0 / 7.0), rtol=1e-14)

    def test_reversed_endpoints_rejected(self):
        with pytest.raises(fl.InvalidArgumentError):
            fl.make_log_grid(2.0, 1.0, 64)

    def test_nonpositive_rmin_rejected(self):
        with pytest.raises(fl.InvalidArgumentError):
            fl.make_log_grid(0.0, 1.0, 64)

    def test_too_few_nodes_rejected(self):
        with pytest.raises(fl.InvalidArgumentError):
            fl.make_log_grid(1.0, 2.0, 7)

    @given(lo=st.floats(-6, 0), span=st.floats(0.5, 12),
           n=st.integers(8, 512))
    @settings(max_examples=50, deadline=None)
    def test_nodes_strictly_increasing(self, lo, span, n):
        g = fl.make_log_grid(10.0**lo, 10.0 ** (lo + span), n)
        assert np.all(np.diff(g.nodes) > 0)
        assert g.nodes[0] == pytest.approx(10.0**lo, rel=1e-12)


class TestParams:
    def test_derived_exponents_config1(self):
        p = fl.Params(2, 0.75, 0.5)
        assert p.crit == pytest.approx(6.0, rel=1e-14)
        assert p.p == pytest.approx(5.0, rel=1e-14)
        assert p.q == pytest.approx(3.0, rel=1e-14)
        assert p.low_dim

    def test_exponent_identity(self):
        for p in (fl.Params(2, 0.75, 0.5), fl.Params(3, 0.9, 0.4)):
            assert 2.0 / p.q == pytest.approx(1.0 - 2.0 / p.crit, rel=1e-14)

    def test_low_dim_iff_p_above_two(self):
        for p in (fl.Params(2, 0.75, 0.5), fl.Params(3, 0.9, 0.4)):
            assert p.low_dim == (p.p > 2.0)

    def test_t_bound_message(self):
        with pytest.raises(fl.InvalidArgumentError, match=r"t must lie in \(0, 2s\)"):
            fl.Params(2, 0.75, 1.6)

    def test_n_le_2s_rejected(self):
        with pytest.raises(fl.InvalidArgumentError):
            fl.Params(1, 0.9, 0.5)


class TestIntegrateRadial:
    def test_exponential_2d(self, params1):
        g = fl.default_grid()
        f = fl.RadialFn(g, np.exp(-g.nodes))
        assert fl.integrate_radial(f, 0.0, params1) == pytest.approx(
            2.0 * math.pi, rel=1e-9)

    def test_gaussian_3d(self, params2):
        g = fl.default_grid()
        f = fl.RadialFn(g, np.exp(-g.nodes**2))
        assert fl.integrate_radial(f, 0.0, params2) == pytest.approx(
            math.pi ** 1.5, rel=1e-9)

    def test_bubble_nonlinearity_mass_vs_refined_quadrature(self, V1, params1):
        """Oracle: adaptive quadrature on a spline of the profile at 4x nodes."""
        from scipy.integrate import quad
        from scipy.interpolate import CubicSpline

        g = V1.grid
        val = fl.integrate_radial(V1.profile ** params1.p, -params1.t, params1)
        spl = CubicSpline(np.log(g.nodes), np.log(V1.profile.values))

        def integrand(lr):
            return math.exp(params1.p * spl(lr)
                            + (params1.N - params1.t) * lr)

        lo, hi = math.log(g.r_min), math.log(g.r_max)
        pieces = np.linspace(lo, hi, 9)
        oracle = sum(quad(integrand, a, b, limit=200, epsabs=0.0,
                          epsrel=1e-10)[0]
                     for a, b in zip(pieces[:-1], pieces[1:]))
        oracle *= fl.sphere_area(params1.N)
        assert val == pytest.approx(oracle, rel=1e-6)
        assert val > 0.0

    def test_nonintegrable_weight_rejected(self, params1):
        g = fl.default_grid()
        f = fl.RadialFn(g, np.exp(-g.nodes))
        with pytest.raises(fl.NonIntegrableWeightError):
            fl.integrate_radial(f, -float(params1.N), params1)

    def test_nan_rejected(self, params1):
        g = fl.default_grid()
        vals = np.exp(-g.nodes)
        vals[10] = np.nan
        with pytest.raises(fl.InvalidDataError):
            fl.RadialFn(g, vals)

    def test_power_law_quadrature_exact(self, params1):
        """r^{-b} on [r_min, r_max] against the closed-form truncated integral."""
        g = fl.default_grid()
        N, a, b = params1.N, -0.5, 0.75
        f = fl.RadialFn(g, g.nodes ** (-b))
        expo = N + a - b
        exact = fl.sphere_area(N) * (g.r_max**expo - g.r_min**expo) / expo
        assert fl.integrate_radial(f, a, params1) == pytest.approx(
            exact, rel=1e-10)

    def test_linearity(self, params1):
        g = fl.default_grid()
        rng = np.random.default_rng(3)
        f = fl.RadialFn(g, np.exp(-g.nodes) * rng.uniform(0.5, 1.5, g.n))
        h = fl.RadialFn(g, np.exp(-g.nodes**2) * rng.uniform(0.5, 1.5, g.n))
        lhs = fl.integrate_radial(f + h, 0.0, params1)
        rhs = (fl.integrate_radial(f, 0.0, params1)
               + fl.integrate_radial(h, 0.0, params1))
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_dilation_shift_invariance(self, V1, params1):
        """Node-ratio-power dilations shift indices exactly; the critical
        norms of the original and the dilate agree on the overlapping
        support to near machine precision."""
        g = V1.grid
        k = 512
        lam = (g.r_max / g.r_min) ** (k / (g.n - 1))  # node ratio ^ 512
        moved = fl.dilate(V1, lam, params1)
        m = g.n - k
        sub_hi = fl.make_log_grid(g.nodes[k], g.nodes[-1], m)
        sub_lo = fl.make_log_grid(g.nodes[0], g.nodes[m - 1], m)
        before = fl.weighted_lp_norm(
            fl.RadialFn(sub_hi, V1.profile.values[k:]),
            params1.crit, -params1.t, params1)
        after = fl.weighted_lp_norm(
            fl.RadialFn(sub_lo, moved.values[:m]),
            params1.crit, -params1.t, params1)
        assert after == pytest.approx(before, rel=1e-12)


class TestWeightedLpNorm:
    def test_zero_function(self, params1):
        g = fl.default_grid()
        f = fl.RadialFn(g, np.zeros(g.n))
        assert fl.weighted_lp_norm(f, 2.0, 0.0, params1) == 0.0

    def test_homogeneity(self, params1):
        g = fl.default_grid()
        f = fl.RadialFn(g, np.exp(-g.nodes))
        base = fl.weighted_lp_norm(f, 3.0, -0.25, params1)
        scaled = fl.weighted_lp_norm(f * (-3.0), 3.0, -0.25, params1)
        assert scaled == pytest.approx(3.0 * base, rel=1e-13)

    def test_critical_norm_dilation_invariant(self, V1, params1):
        vals = [fl.weighted_lp_norm(fl.dilate(V1, lam, params1), params1.crit,
                                    -params1.t, params1)
                for lam in (1e-2, 1.0, 1e2)]
        assert max(vals) / min(vals) - 1.0 < 1e-8


class TestRadialFnArithmetic:
    def test_grid_mismatch_rejected(self):
        a = fl.make_log_grid(1e-3, 1e3, 64)
        b = fl.make_log_grid(1e-3, 1e3, 128)
        fa = fl.RadialFn(a, np.ones(64))
        fb = fl.RadialFn(b, np.ones(128))
        with pytest.raises(fl.GridMismatchError):
            _ = fa + fb

    def test_product_and_power(self):
        g = fl.make_log_grid(1e-3, 1e3, 64)
        f = fl.RadialFn(g, np.full(64, 2.0))
        assert np.allclose((f * f).values, (f**2.0).values)
