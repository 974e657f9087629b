"""Model library: reductions, conditional density, contours, invariants."""
import math

import numpy as np
import pytest

from possim import ArgumentError, DegenerateDataError, DomainError, NumericError, dkw_band
from possim.models import (
    CurvedNormalModel,
    CurvedNormalReduction,
    EivModel,
    asymmetric_laplace_cdf,
    cauchy_posterior_contour,
    curved_normal_conditional_density,
    curved_normal_reduce,
    eiv_contour_limits,
    eiv_posterior_contour,
    eta_observed,
    make_model,
    median_stat,
)

# frozen oracle values
ALAPLACE_5_05_AT_M36 = 0.15027171656507865   # (5/5.5) * exp(-1.8)
EIV_RIGHT_LIMIT = 0.1641699972477976         # 2 * exp(-2.5)
PAPER_H = 0.8773584905660378                 # 1.86 / 2.12


class TestCauchyModel:
    def test_contour_values(self):
        post = cauchy_posterior_contour(0.0)
        assert float(post.eval(0.0)) == 1.0
        assert float(post.eval(1.0)) == pytest.approx(0.5, abs=1e-12)
        post3 = cauchy_posterior_contour(3.0)
        assert float(post3.eval(3.0)) == 1.0

    def test_symmetry_about_y(self):
        post = cauchy_posterior_contour(1.3)
        for t in (0.5, 1.7, 4.0):
            assert float(post.eval(1.3 + t)) == pytest.approx(float(post.eval(1.3 - t)), abs=1e-12)


class TestCurvedNormalReduce:
    def test_paper_instance_rounds(self):
        red = CurvedNormalReduction(y1=1.86, y2=2.12, h=1.86 / 2.12)
        assert round(red.h, 2) == 0.88
        assert red.h == pytest.approx(PAPER_H, abs=1e-15)

    def test_two_point_sample(self):
        red = curved_normal_reduce([0.0, 2.0])
        assert red.y1 == pytest.approx(1.0)
        assert red.y2 == pytest.approx(math.sqrt(2.0))
        assert red.h == pytest.approx(1.0 / math.sqrt(2.0))

    def test_constant_sample_errors(self):
        with pytest.raises(DegenerateDataError):
            curved_normal_reduce([1.5, 1.5, 1.5])

    def test_too_short(self):
        with pytest.raises(ArgumentError):
            curved_normal_reduce([1.0])


@pytest.fixture(scope="module")
def fh():
    return curved_normal_conditional_density(CurvedNormalModel(n=10), PAPER_H)


@pytest.fixture(scope="module")
def eiv_model():
    return EivModel(lambda1=5.0, lambda2=5.0, y1=1.40, y2=0.50)


class TestConditionalDensity:
    def test_normalizes(self, fh):
        assert fh.normalization_defect <= 1e-6

    def test_support_and_vanishing_at_h(self, fh):
        assert fh.support.hi == PAPER_H
        near = PAPER_H - np.array([1e-3, 1e-4, 1e-5])
        d = fh.density(near)
        assert np.all(np.diff(d) <= 0)
        assert d[-1] < 1e-30

    def test_unimodal_and_cdf_at_mode(self, fh):
        assert fh.unimodal
        c = float(fh.cdf(np.array([fh.mode]))[0])
        assert 0.0 < c < 1.0

    def test_self_uniformity_of_ranked_contour(self, fh):
        # v drawn from f_h itself: pi_h(v) is Unif(0,1); KS within DKW band
        rng = np.random.default_rng(314)
        n = 10_000
        pit = np.sort(fh.contour(fh.sample(rng, n)))
        ks = float(np.max(np.abs(pit - np.arange(1, n + 1) / n)))
        assert ks <= dkw_band(n, 0.01)

    def test_n2_normalization_diverges(self):
        with pytest.raises(NumericError):
            curved_normal_conditional_density(CurvedNormalModel(n=2), 0.7)

    def test_negative_sign_support(self):
        fh = curved_normal_conditional_density(CurvedNormalModel(n=8, sign_theta=-1), -0.4)
        assert fh.support.lo == -0.4 and fh.support.hi == math.inf
        assert fh.normalization_defect <= 1e-6


class TestCurvedNormalPosterior:
    def test_mode_maps_to_one(self):
        red = CurvedNormalReduction(y1=1.86, y2=2.12, h=PAPER_H)
        post = make_model("curved-normal", n=10).posterior(red)
        assert float(post.eval(np.array([post.mode_hint]))[0]) == pytest.approx(1.0, abs=1e-9)

    def test_eta_is_observed_for_every_theta(self):
        model = CurvedNormalModel(n=10)
        red = CurvedNormalReduction(y1=1.86, y2=2.12, h=PAPER_H)
        thetas = np.linspace(0.05, 40.0, 113)
        eta = eta_observed(model, red, thetas)
        np.testing.assert_allclose(eta, red.h, atol=1e-10)
        # discrete chain-rule identity: d eta / d theta = 0
        deta = np.diff(eta) / np.diff(thetas)
        np.testing.assert_allclose(deta, 0.0, atol=1e-9)


class TestAsymmetricLaplace:
    def test_continuity_at_zero(self):
        r1, r2 = 3.0, 7.0
        from_pos = asymmetric_laplace_cdf(r1, r2, 0.0)
        from_neg = asymmetric_laplace_cdf(r1, r2, -1e-300)
        assert from_pos == pytest.approx(r1 / (r1 + r2), abs=1e-12)
        assert from_neg == pytest.approx(r1 / (r1 + r2), abs=1e-12)

    def test_spot_value(self):
        assert asymmetric_laplace_cdf(5.0, 0.5, -3.6) == pytest.approx(
            ALAPLACE_5_05_AT_M36, abs=1e-15)

    def test_limits(self):
        assert asymmetric_laplace_cdf(2.0, 3.0, 1e8) == pytest.approx(1.0, abs=1e-12)
        assert asymmetric_laplace_cdf(2.0, 3.0, -1e8) == pytest.approx(0.0, abs=1e-12)

    def test_bad_rates(self):
        with pytest.raises(ArgumentError):
            asymmetric_laplace_cdf(0.0, 1.0, 0.5)

    def test_matches_simulated_difference(self):
        # Monte Carlo oracle at reduced budget (the acceptance suite runs 1e6)
        rng = np.random.default_rng(77)
        n = 200_000
        for phi in (0.5, 2.0, 10.0):
            d = np.sort(rng.exponential(1 / 5.0, n) - phi * rng.exponential(1 / 5.0, n))
            F = asymmetric_laplace_cdf(5.0, 5.0 / phi, d)
            err = float(np.max(np.abs(F - np.arange(1, n + 1) / n)))
            assert err <= 0.005


class TestEivModel:
    def test_median_crossing_gives_one(self, eiv_model):
        post = eiv_posterior_contour(eiv_model)
        assert float(post.eval(np.array([post.mode_hint]))[0]) == pytest.approx(1.0, abs=1e-9)
        assert median_stat(eiv_model, post.mode_hint) == pytest.approx(0.5, abs=1e-10)

    def test_right_tail_limit(self, eiv_model):
        lo_lim, hi_lim = eiv_contour_limits(eiv_model)
        assert hi_lim == pytest.approx(EIV_RIGHT_LIMIT, abs=1e-12)
        post = eiv_posterior_contour(eiv_model)
        assert float(post.eval(np.array([1e9]))[0]) == pytest.approx(EIV_RIGHT_LIMIT, abs=1e-6)

    def test_phi_nonpositive_rejected(self, eiv_model):
        post = eiv_posterior_contour(eiv_model)
        with pytest.raises(DomainError):
            post.eval(np.array([-1.0]))
        with pytest.raises(DomainError):
            median_stat(eiv_model, 0.0)

    def test_rates_validated(self):
        with pytest.raises(ArgumentError):
            EivModel(lambda1=-5.0, lambda2=5.0, y1=1.0, y2=1.0)

    def test_nuisance_free_by_construction(self):
        # two data pairs with identical y1 - phi*y2 at phi*=2 give identical
        # contour values there, regardless of the xi that generated them
        phi_star = 2.0
        a = EivModel(5.0, 5.0, y1=1.40, y2=0.50)
        b = EivModel(5.0, 5.0, y1=1.40 + phi_star * 0.25, y2=0.75)
        va = float(eiv_posterior_contour(a).eval(np.array([phi_star]))[0])
        vb = float(eiv_posterior_contour(b).eval(np.array([phi_star]))[0])
        assert va == vb

    def test_monotone_decreasing_after_peak(self, eiv_model):
        post = eiv_posterior_contour(eiv_model)
        grid = np.geomspace(post.mode_hint, 1e4, 200)
        vals = np.asarray(post.eval(grid))
        assert np.all(np.diff(vals) <= 1e-12)


class TestValidityAtTruthFastPaths:
    """The adapters' contour_at_truth must agree with the full posterior."""

    def test_cauchy(self):
        adapter = make_model("cauchy")
        rng = np.random.default_rng(1)
        data = adapter.simulate(rng, 0.7)
        assert adapter.contour_at_truth(data, 0.7) == pytest.approx(
            float(adapter.posterior(data).eval(0.7)), abs=1e-12)

    def test_curved_normal(self):
        adapter = make_model("curved-normal", n=10)
        rng = np.random.default_rng(2)
        data = adapter.simulate(rng, 2.0)
        assert adapter.contour_at_truth(data, 2.0) == pytest.approx(
            float(adapter.posterior(data).eval(np.array([2.0]))[0]), abs=1e-12)

    def test_eiv(self):
        adapter = make_model("exp-eiv", lambda1=5, lambda2=5)
        rng = np.random.default_rng(3)
        data = adapter.simulate(rng, (1.0, 0.1))
        assert adapter.contour_at_truth(data, (1.0, 0.1)) == pytest.approx(
            float(adapter.posterior(data).eval(np.array([10.0]))[0]), abs=1e-12)


class TestAuxiliaryInvariants:
    """Density nonnegative on support, sampler lands in support, CDF valid."""

    @pytest.mark.parametrize("case", ["cauchy", "curved", "uniform"])
    def test_distribution_contracts(self, case, fh):
        from possim.models import cauchy_aux, uniform_aux
        dist = {"cauchy": cauchy_aux(), "curved": fh.as_aux(),
                "uniform": uniform_aux()}[case]
        rng = np.random.default_rng(99)
        draws = dist.sample(rng, 4000)
        assert np.all(draws >= dist.support.lo) and np.all(draws <= dist.support.hi)
        grid = np.linspace(np.quantile(draws, 0.001), np.quantile(draws, 0.999), 301)
        assert np.all(dist.density(grid) >= 0)
        if dist.cdf is not None:
            c = np.asarray(dist.cdf(grid))
            assert np.all(np.diff(c) >= -1e-12)
            assert np.all((c >= 0) & (c <= 1))

    def test_curved_normal_reduced_coverage_assumption(self):
        # the attained v-range over theta in (0, inf) fills the support
        red = CurvedNormalReduction(y1=1.86, y2=2.12, h=PAPER_H)
        post = make_model("curved-normal", n=10).posterior(red)
        assoc = post.assoc
        lo, hi = assoc.attained_u_range(red, np.concatenate([
            np.geomspace(1e-6, 1e6, 101)]))
        assert hi >= red.h - 1e-4
        assert lo <= -1e5


class TestEivGridHint:
    def test_grid_hint_accepted(self):
        model = EivModel(5.0, 5.0, 1.40, 0.50)
        post = eiv_posterior_contour(model, phi_grid_hint=np.geomspace(0.1, 50, 25))
        assert float(post.eval(np.array([post.mode_hint]))[0]) == pytest.approx(1.0, abs=1e-9)
