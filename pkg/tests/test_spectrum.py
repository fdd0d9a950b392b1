"""Linearized eigenproblem of the weighted quotient and the gap inequality."""

import numpy as np
import pytest

import fraclab as fl
from fraclab.spectrum import resample_to_report


def b_inner(report, f_vals, g_vals):
    return float(np.sum(f_vals * g_vals * report._mass))


class TestLinearizedEigs:
    def test_first_eigenvalue_is_one(self, report1, report2):
        assert report1.eigenvalues[0] == pytest.approx(1.0, abs=1e-3)
        assert report2.eigenvalues[0] == pytest.approx(1.0, abs=1e-3)

    def test_second_eigenvalue_is_p(self, report1, report2, params1, params2):
        assert report1.eigenvalues[1] == pytest.approx(params1.p, abs=1e-2)
        assert report2.eigenvalues[1] == pytest.approx(params2.p, abs=1e-2)

    def test_gap_margin_positive(self, report1, report2):
        assert report1.gap_margin > 0.0
        assert report2.gap_margin > 0.0

    def test_first_eigenfunction_matches_profile(self, V1, report1):
        psi = report1.eigenfunctions[0].values
        v = resample_to_report(V1.profile, report1)
        cos = abs(b_inner(report1, psi, v)) / np.sqrt(
            b_inner(report1, psi, psi) * b_inner(report1, v, v))
        assert cos >= 0.999

    def test_second_eigenfunction_matches_scale_derivative(self, V1, report1):
        psi = report1.eigenfunctions[1].values
        vdot = resample_to_report(fl.bubble_derivative(V1), report1)
        cos = abs(b_inner(report1, psi, vdot)) / np.sqrt(
            b_inner(report1, psi, psi) * b_inner(report1, vdot, vdot))
        assert cos >= 0.995

    def test_scale_invariance(self, V1, report1):
        moved = fl.linearized_eigs(V1, k=5, scale=100.0)
        rel = np.abs(moved.eigenvalues / report1.eigenvalues - 1.0)
        assert rel.max() <= 1e-3

    def test_refinement_stability(self, V1, report1):
        fine = fl.linearized_eigs(V1, k=5, refine=2)
        rel = np.abs(fine.eigenvalues / report1.eigenvalues - 1.0)
        assert rel.max() <= 1e-3

    def test_eigenvalues_sorted_positive(self, report1, report2):
        for rep in (report1, report2):
            assert np.all(np.diff(rep.eigenvalues) >= 0.0)
            assert np.all(rep.eigenvalues > 0.0)

    def test_eigenfunctions_b_orthonormal(self, report1):
        k = len(report1.eigenfunctions)
        gram = np.array([[b_inner(report1, report1.eigenfunctions[i].values,
                                  report1.eigenfunctions[j].values)
                          for j in range(k)] for i in range(k)])
        assert np.abs(gram - np.eye(k)).max() <= 1e-8

    def test_rayleigh_characterization(self, report1):
        for mu, psi in zip(report1.eigenvalues, report1.eigenfunctions):
            num = float(psi.values @ (report1._form @ psi.values))
            den = b_inner(report1, psi.values, psi.values)
            # re-evaluating the quadratic form loses a few digits to
            # cancellation across the widely weighted window
            assert num / den == pytest.approx(mu, rel=1e-4)

    def test_k_below_three_rejected(self, V1):
        with pytest.raises(fl.InvalidArgumentError):
            fl.linearized_eigs(V1, k=2)


class TestSpectralGapCheck:
    def test_random_projected_functions(self, V1, report1):
        grid = V1.grid
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(20):
            center = 10.0 ** rng.uniform(-2, 2)
            width = rng.uniform(0.5, 2.0)
            f = fl.RadialFn(grid, np.exp(-((np.log(grid.nodes / center))**2)
                                         / (2.0 * width**2)))
            res = fl.spectral_gap_check(V1, f, report1)
            worst = max(worst, res["ratio"])
        assert worst <= 1.0 + 1e-3

    def test_equality_at_third_eigenfunction(self, V1, report1):
        res = fl.spectral_gap_check(V1, report1.eigenfunctions[2], report1)
        assert res["ratio"] == pytest.approx(1.0, abs=1e-3)

    def test_unprojected_profile_violates(self, V1, report1):
        res = fl.spectral_gap_check(V1, V1.profile, report1, project=False)
        # the raw profile is (up to window truncation) the first mode, so
        # its Rayleigh quotient is near mu_1 and the gap ratio near mu_3
        assert res["ratio"] == pytest.approx(report1.eigenvalues[2], rel=0.1)
        assert res["ratio"] > 1.0

    def test_zero_input_rejected(self, V1, report1):
        zero = fl.RadialFn(V1.grid, np.zeros(V1.grid.n))
        with pytest.raises(fl.DegenerateInputError):
            fl.spectral_gap_check(V1, zero, report1)


class TestReportText:
    def test_serialization_fields(self, report1, params1):
        from fraclab.spectrum import report_text

        text = report_text(report1)
        for token in (f"N={params1.N}", "mu=", "gap_margin",
                      "trimmed_nodes"):
            assert token in text
