"""Extremal profile solver, dilation map, scale derivative, normalization."""

import numpy as np
import pytest

import fraclab as fl


class TestSolveBubble:
    def test_profile_positive_decreasing(self, V1):
        assert np.all(V1.values > 0.0)
        assert np.all(np.diff(V1.values) < 0.0)

    def test_tail_decay_exponent(self, V1, params1):
        g = V1.grid
        mask = (g.nodes >= 1e2) & (g.nodes <= 1e5)
        slope = np.polyfit(np.log(g.nodes[mask]),
                           np.log(V1.values[mask]), 1)[0]
        target = -(params1.N - 2.0 * params1.s)
        assert slope == pytest.approx(target, rel=0.02)

    def test_t_zero_validation_mode(self):
        """Without the singular weight, the extremal shape is closed-form."""
        params = fl.Params(3, 0.75, 0.0)
        grid = fl.default_grid()
        V = fl.solve_bubble(params, grid, tol=1e-10)
        shape = (1.0 + grid.nodes**2) ** (-(params.N - 2.0 * params.s) / 2.0)
        mask = (grid.nodes >= 1e-3) & (grid.nodes <= 1e3)
        ratio = V.values[mask] / shape[mask]
        assert np.abs(ratio / ratio[0] - 1.0).max() <= 1e-4

    def test_residual_stable_at_refined_resolution(self, V1, params1):
        refined = fl.make_log_grid(V1.grid.r_min, V1.grid.r_max,
                                   2 * V1.grid.n)
        Vr = fl.solve_bubble(params1, refined, tol=1e-10)
        from scipy.interpolate import CubicSpline

        spl = CubicSpline(np.log(V1.grid.nodes), np.log(V1.values))
        resampled = fl.RadialFn(refined, np.exp(spl(np.log(refined.nodes))))
        gamma = fl.deficit(resampled, params1)
        assert gamma <= 10.0 * max(V1.residual, 1e-10) * fl.hs_norm(
            Vr.profile, params1)

    def test_norm_identity(self, V1, params1):
        lhs = fl.hs_inner(V1.profile, V1.profile, params1)
        rhs = V1.mu ** ((params1.N - params1.t)
                        / (2.0 * params1.s - params1.t))
        assert lhs == pytest.approx(rhs, rel=1e-5)

    def test_bounded_at_origin(self, V1):
        head = V1.values[:64]
        assert np.isfinite(head).all()
        assert head.max() / head.min() - 1.0 < 1e-3

    def test_tolerance_floor_rejected(self, params1, grid):
        with pytest.raises(fl.InvalidArgumentError):
            fl.solve_bubble(params1, grid, tol=1e-13)


class TestDilate:
    def test_identity_at_one(self, V1, params1):
        out = fl.dilate(V1, 1.0, params1)
        assert np.allclose(out.values, V1.values, rtol=0.0, atol=0.0)

    def test_norm_invariance(self, V1, params1):
        base = fl.hs_norm(V1.profile, params1)
        for lam in (1e-3, 1e3):
            assert fl.hs_norm(fl.dilate(V1, lam, params1),
                              params1) == pytest.approx(base, rel=1e-6)

    def test_group_law(self, V1, params1):
        g = V1.grid
        ratio = (g.r_max / g.r_min) ** (1.0 / (g.n - 1))
        a, b = ratio**300, ratio**150  # shift-exact scales
        once = fl.dilate(fl.dilate(V1, a, params1), b, params1)
        direct = fl.dilate(V1, a * b, params1)
        mask = direct.values > direct.values.max() * 1e-12
        rel = np.abs(once.values[mask] / direct.values[mask] - 1.0)
        assert rel.max() <= 1e-10

    def test_nonpositive_scale_rejected(self, V1, params1):
        with pytest.raises(fl.InvalidArgumentError):
            fl.dilate(V1, -1.0, params1)


class TestBubbleDerivative:
    def test_orthogonality_integral(self, V1, params1):
        vdot = fl.bubble_derivative(V1)
        lhs = fl.integrate_radial(V1.profile ** params1.p * vdot,
                                  -params1.t, params1)
        scale = fl.integrate_radial(V1.profile ** (params1.p + 1.0),
                                    -params1.t, params1)
        assert abs(lhs) <= 1e-6 * scale

    def test_second_moment_identity(self, V1, params1):
        vdot = fl.bubble_derivative(V1)
        lhs = fl.integrate_radial(V1.profile ** (params1.p - 1.0) * vdot,
                                  -params1.t, params1)
        mass = fl.integrate_radial(V1.profile ** params1.p, -params1.t,
                                   params1)
        target = -(params1.N - 2.0 * params1.s) / (2.0 * params1.p) * mass
        assert lhs == pytest.approx(target, rel=1e-3)

    def test_pointwise_bound_stable_in_lambda(self, V1, params1):
        sups = []
        g = V1.grid
        mask = (g.nodes >= 1e-4) & (g.nodes <= 1e4)
        for lam in (0.1, 1.0, 10.0):
            vdot = fl.bubble_derivative(V1, lam)
            vlam = fl.dilate(V1, lam, params1)
            sups.append(np.max(np.abs(vdot.values[mask]) * lam
                               / vlam.values[mask]))
        assert max(sups) / min(sups) <= 2.0
        assert np.isfinite(sups).all()


class TestMuConstant:
    def test_positive(self, V1):
        assert fl.mu_constant(V1) > 0.0

    def test_lambda_independent(self, V1, params1):
        moved = fl.dilate(V1, 100.0, params1)
        mass = fl.integrate_radial(moved ** (params1.p + 1.0), -params1.t,
                                   params1)
        mu_moved = mass ** ((params1.crit - 2.0) / params1.crit)
        assert mu_moved == pytest.approx(V1.mu, rel=1e-6)

    def test_weighted_mass_exponent(self, V1, params1):
        """The full-power weighted mass matches mu^{crit/(crit-2)}."""
        mass = fl.integrate_radial(V1.profile ** (params1.p + 1.0),
                                   -params1.t, params1)
        assert mass == pytest.approx(
            V1.mu ** (params1.crit / (params1.crit - 2.0)), rel=1e-4)

    def test_order_of_magnitude_law(self, V1, V2):
        """The weighted p-mass tracks (N+2s-2t)/((N-t)(2s-t)) within [1/50, 50]."""
        for V in (V1, V2):
            p = V.params
            mass = fl.integrate_radial(V.profile ** p.p, -p.t, p)
            predicted = (p.N + 2.0 * p.s - 2.0 * p.t) / (
                (p.N - p.t) * (2.0 * p.s - p.t))
            assert 1.0 / 50.0 <= mass / predicted <= 50.0


class TestSerialization:
    def test_round_trip_bit_exact(self, V1):
        text = fl.dump_bubble(V1)
        back = fl.load_bubble(text)
        assert fl.dump_bubble(back) == text
        assert np.array_equal(back.values, V1.values)
        assert back.mu == V1.mu and back.residual == V1.residual

    def test_missing_header_rejected(self):
        with pytest.raises(fl.InvalidArgumentError):
            fl.load_bubble("1.0 2.0\n1.5 1.0\n")
