"""Mutual information: exact sums, closed forms, quadrature, curve route."""

import io
import json
import math

import numpy as np
import pytest

import liftdep as ld
from liftdep.information import MiMethod

import oracles

LOG_2 = 0.6931471805599453
MI_FIXTURE = 0.19274475702175753          # 0.8 log 1.6 + 0.2 log 0.4
MI_CURVE_NORMAL_ID = 0.6207822376352453   # log(2 sqrt(e) / sqrt(pi))
MI_CURVE_UNIFORM_ID = -0.7981562955694275  # log(sqrt(2) / pi)
MI_CAUCHY = 0.22417142752923613           # 3 log 2 + log pi - 3 (full plane)


class TestMiDiscrete:
    def test_independent_is_zero(self, indep_pmf):
        report = ld.mi_discrete(indep_pmf)
        assert report.value == pytest.approx(0.0, abs=1e-15)
        assert report.method == MiMethod.EXACT_SUM

    def test_perfectly_dependent(self):
        dist = ld.DiscreteJoint([0.0, 1.0], [0.0, 1.0], [[0.5, 0.0], [0.0, 0.5]])
        assert ld.mi_discrete(dist).value == pytest.approx(LOG_2, abs=1e-15)

    def test_hand_sum_fixture(self, dep_pmf):
        assert ld.mi_discrete(dep_pmf).value == pytest.approx(MI_FIXTURE, abs=1e-15)
        assert oracles.brute_mi(dep_pmf.pmf) == pytest.approx(MI_FIXTURE, abs=1e-15)


class TestMiBvnClosedForm:
    def test_zero_correlation(self):
        assert ld.mi_bvn_closed_form(0.0).value == 0.0

    def test_paper_value(self):
        report = ld.mi_bvn_closed_form(0.6)
        assert report.value == pytest.approx(0.22314355131420974, abs=1e-12)
        assert report.method == MiMethod.CLOSED_FORM

    def test_high_correlation(self):
        assert ld.mi_bvn_closed_form(0.99).value == pytest.approx(
            1.9585177736258443, abs=1e-12
        )

    def test_degenerate(self):
        with pytest.raises(ld.DegenerateCorrelation):
            ld.mi_bvn_closed_form(1.0)


class TestMiContinuous:
    @pytest.mark.parametrize("r", [0.0, 0.3, 0.6, 0.9])
    def test_matches_closed_form(self, r):
        quad = ld.mi_continuous(ld.BivariateNormal(r))
        assert quad.value == pytest.approx(ld.mi_bvn_closed_form(r).value, abs=1e-3)
        assert quad.method == MiMethod.QUADRATURE

    def test_circular_cauchy(self):
        report = ld.mi_continuous(ld.CircularCauchy())
        assert report.value == pytest.approx(0.223, abs=5e-3)
        assert report.value == pytest.approx(MI_CAUCHY, abs=1e-3)

    def test_independent_product(self):
        dist = ld.IndependentProduct(ld.standard_normal_pdf, ld.standard_normal_pdf)
        report = ld.mi_continuous(dist)
        assert abs(report.value) <= 1e-6

    def test_quadrature_not_converged_on_tiny_budget(self):
        with pytest.raises(ld.QuadratureNotConverged):
            ld.mi_continuous(ld.BivariateNormal(0.9), budget=64)

    def test_monte_carlo_fallback(self):
        report = ld.mi_continuous(
            ld.BivariateNormal(0.6), budget=64, monte_carlo_fallback=True, mc_samples=200_000
        )
        assert report.method == MiMethod.MONTE_CARLO
        assert report.value == pytest.approx(0.22314355131420974, abs=0.01)
        assert report.abs_error_estimate > 0


class TestMiCurve:
    def test_normal_identity_singular_limit(self, normal_identity_curve):
        report = ld.mi_curve(normal_identity_curve)
        assert report.value == pytest.approx(MI_CURVE_NORMAL_ID, abs=1e-6)
        assert report.method == MiMethod.CURVE_QUADRATURE

    def test_uniform_identity(self, uniform_identity_curve):
        assert ld.mi_curve(uniform_identity_curve).value == pytest.approx(
            MI_CURVE_UNIFORM_ID, abs=1e-9
        )

    def test_normal_double_slope_against_independent_quadrature(self):
        # independent 1D oracle: integrand rho_X(x) log(2 / (pi rho_Y(2x) sqrt(5)))
        branch = ld.CurveBranch(
            phi=lambda x: 2.0 * np.asarray(x, dtype=float),
            dphi=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
            domain=(-8.0, 8.0),
        )
        dist = ld.CurveSingularJoint(
            ld.standard_normal_pdf, (-8.0, 8.0), (branch,)
        )

        def rho_y_analytic(y):
            return oracles.normal_pdf(y / 2.0) / 2.0

        expected = oracles.quad_1d(
            lambda x: oracles.normal_pdf(x)
            * math.log(2.0 / (math.pi * rho_y_analytic(2 * x) * math.sqrt(5.0))),
            -8.0,
            8.0,
        )
        assert ld.mi_curve(dist).value == pytest.approx(expected, abs=1e-6)

    def test_mixture_uses_branch_weights(self, tent_curve):
        # both branches have rho_Y = 1 and slope 1, so log L is constant
        expected = math.log(2 * 0.5 / (math.pi * math.sqrt(2)))
        assert ld.mi_curve(tent_curve).value == pytest.approx(expected, abs=1e-9)


class TestConvergenceCounterexample:
    def test_standard_schedule(self):
        report = ld.convergence_counterexample([0.9, 0.99, 0.999])
        mis = [row[1] for row in report.rows]
        assert mis == pytest.approx(
            [0.8303656034108255, 1.9585177736258443, 3.1075541117319436], abs=1e-9
        )
        assert report.limit_mi == pytest.approx(MI_CURVE_NORMAL_ID, abs=1e-6)
        assert all(row[2] for row in report.rows)

    def test_not_yet_exceeding(self):
        report = ld.convergence_counterexample([0.6])
        assert report.rows[0][1] == pytest.approx(0.22314355131420974, abs=1e-12)
        assert report.rows[0][2] is False

    def test_empty_schedule(self):
        report = ld.convergence_counterexample([])
        assert report.rows == ()
        assert report.limit_mi == pytest.approx(MI_CURVE_NORMAL_ID, abs=1e-6)

    def test_schedule_must_increase(self):
        with pytest.raises(ValueError):
            ld.convergence_counterexample([0.9, 0.8])

    def test_schedule_must_be_valid_correlation(self):
        with pytest.raises(ld.DegenerateCorrelation):
            ld.convergence_counterexample([0.9, 1.0])

    def test_closed_form_monotone_unbounded_vs_finite_limit(self):
        rs = np.linspace(0.9, 0.999999, 25)
        mis = [ld.mi_bvn_closed_form(r).value for r in rs]
        assert all(b > a for a, b in zip(mis[:-1], mis[1:]))
        assert mis[-1] > 6.0  # grows without bound as r -> 1
        limit = ld.convergence_counterexample([]).limit_mi
        assert math.isfinite(limit)

    def test_csv_format(self):
        report = ld.convergence_counterexample([0.9, 0.99])
        buf = io.StringIO()
        report.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "r,mi,limit_mi,exceeds"
        assert len(lines) == 3
        assert lines[1].endswith(",true")


class TestMiInvariants:
    def test_nonnegativity_random_pmfs(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            pmf = oracles.random_pmf(rng, 3, 4, zero_fraction=0.3)
            dist = ld.DiscreteJoint(np.arange(3.0), np.arange(4.0), pmf)
            assert ld.mi_discrete(dist).value >= -1e-6

    def test_zero_iff_independent(self, indep_pmf, dep_pmf):
        assert abs(ld.mi_discrete(indep_pmf).value) <= 1e-6
        assert ld.mi_discrete(dep_pmf).value >= 0.01
        indep = ld.IndependentProduct(ld.standard_normal_pdf, ld.standard_normal_pdf)
        assert abs(ld.mi_continuous(indep).value) <= 1e-6
        assert ld.mi_continuous(ld.BivariateNormal(0.3)).value >= 0.01

    def test_report_fields_and_json(self):
        report = ld.mi_bvn_closed_form(0.6)
        buf = io.StringIO()
        report.to_json(buf)
        payload = json.loads(buf.getvalue())
        assert set(payload) == {"value", "method", "abs_error_estimate", "n_evals"}
        assert payload["method"] == "ClosedForm"
        assert payload["value"] == report.value

    def test_negative_error_estimate_rejected(self):
        with pytest.raises(ValueError):
            ld.MiReport(0.5, MiMethod.QUADRATURE, -1.0, 10)
