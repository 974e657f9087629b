"""Nested random sets: realizations, hitting probabilities, equivalence."""
import math

import numpy as np
import pytest
from scipy.stats import norm

from possim import AuxiliaryDistribution, Interval, IntervalUnion, Points, build_triangular
from possim.association import posterior_necessity, posterior_possibility
from possim.models import (
    cauchy_association,
    cauchy_aux,
    cauchy_contour,
    cauchy_posterior_contour,
    make_model,
    uniform_aux,
)
from possim.models.eiv import EivModel, eiv_association, eiv_posterior_contour
from possim.randomsets import (
    NestedRandomSetSampler,
    hitting_curve,
    hitting_probability,
    randomset_plausibility,
    randomset_plausibility_report,
    sample_nested_set,
    set_at_threshold,
)

CAUCHY_TAIL_10 = 0.06345103486110704
TWO_SIDED_NORMAL_196 = 0.04999579029644097


def normal_sampler() -> NestedRandomSetSampler:
    dist = AuxiliaryDistribution(
        support=Interval(-np.inf, np.inf),
        density=lambda u: norm.pdf(np.asarray(u, dtype=float)),
        cdf=lambda u: norm.cdf(np.asarray(u, dtype=float)),
        sampler=lambda rng, size: rng.normal(size=size),
        mode=0.0,
        symmetric_about=0.0,
    )
    return NestedRandomSetSampler(dist)


class TestRealizations:
    def test_maximal_threshold_degenerate_set(self):
        s = normal_sampler()
        draw = set_at_threshold(s, float(norm.pdf(0.0)))
        assert draw.interval.lo == pytest.approx(0.0, abs=1e-6)
        assert draw.interval.hi == pytest.approx(0.0, abs=1e-6)

    def test_196_level_set(self):
        s = normal_sampler()
        draw = set_at_threshold(s, float(norm.pdf(1.96)))
        assert draw.interval.lo == pytest.approx(-1.96, abs=1e-6)
        assert draw.interval.hi == pytest.approx(1.96, abs=1e-6)
        assert draw.contains(1.5) and not draw.contains(2.5)

    def test_mode_always_member(self):
        s = normal_sampler()
        rng = np.random.default_rng(17)
        for _ in range(25):
            draw = sample_nested_set(s, rng)
            assert draw.contains(0.0)

    def test_nestedness(self):
        s = normal_sampler()
        rng = np.random.default_rng(18)
        thresholds = sorted(s.draw_thresholds(rng, 20))
        intervals = [set_at_threshold(s, t).interval for t in thresholds]
        for small_t, big_t in zip(intervals[:-1], intervals[1:]):
            # larger threshold -> smaller set
            assert big_t.lo >= small_t.lo - 1e-9
            assert big_t.hi <= small_t.hi + 1e-9


class TestHitting:
    def test_mode_hit_certain(self):
        s = normal_sampler()
        assert hitting_probability(s, 0.0, budget=1000,
                                   rng=np.random.default_rng(0)) == 1.0

    def test_normal_196(self):
        s = normal_sampler()
        p = TWO_SIDED_NORMAL_196
        est = hitting_probability(s, 1.96, budget=100_000, rng=np.random.default_rng(1))
        assert est == pytest.approx(p, abs=3 * math.sqrt(p * (1 - p) / 100_000))

    def test_cauchy_unit(self):
        s = NestedRandomSetSampler(cauchy_aux())
        est = hitting_probability(s, 1.0, budget=100_000, rng=np.random.default_rng(2))
        assert est == pytest.approx(0.5, abs=3 * math.sqrt(0.25 / 100_000))

    def test_curve_matches_contour(self):
        s = NestedRandomSetSampler(cauchy_aux())
        grid = np.linspace(-8, 8, 41)
        target = np.asarray(cauchy_contour()(grid))
        est = hitting_curve(s, grid, budget=100_000, rng=np.random.default_rng(3))
        se = np.sqrt(target * (1 - target) / 100_000)
        assert np.all(np.abs(est - target) <= 3 * se + 1e-12)

    def test_triangular_level_hitting(self):
        tri = build_triangular()
        s = NestedRandomSetSampler(uniform_aux(), level=tri.func)
        est = hitting_probability(s, 0.3, budget=100_000, rng=np.random.default_rng(4))
        assert est == pytest.approx(0.6, abs=3 * math.sqrt(0.24 / 100_000))


class TestPlausibilityEquivalence:
    def test_full_domain_certain(self):
        s = NestedRandomSetSampler(cauchy_aux())
        assoc = cauchy_association()
        rep = randomset_plausibility_report(s, assoc, 0.0,
                                            Interval(-math.inf, math.inf),
                                            budget=20_000, rng=np.random.default_rng(5),
                                            postc=cauchy_posterior_contour(0.0))
        assert rep.value == 1.0
        assert rep.empty_count == 0

    def test_cauchy_tail_assertion(self):
        s = NestedRandomSetSampler(cauchy_aux())
        assoc = cauchy_association()
        est = randomset_plausibility(s, assoc, 0.0, Interval(10, math.inf),
                                     budget=100_000, rng=np.random.default_rng(6),
                                     postc=cauchy_posterior_contour(0.0))
        p = CAUCHY_TAIL_10
        assert est == pytest.approx(p, abs=3 * math.sqrt(p * (1 - p) / 100_000))

    def test_mode_point_assertion(self):
        s = NestedRandomSetSampler(cauchy_aux())
        assoc = cauchy_association()
        est = randomset_plausibility(s, assoc, 0.0, Points((0.0,)),
                                     budget=20_000, rng=np.random.default_rng(7))
        assert est == 1.0

    def test_duality_with_posterior_necessity(self):
        s = NestedRandomSetSampler(cauchy_aux())
        assoc = cauchy_association()
        postc = cauchy_posterior_contour(0.0)
        A = IntervalUnion.of(Interval(-1.0, 1.0))
        comp = A.complement(assoc.param_domain)
        est = 1.0 - randomset_plausibility(s, assoc, 0.0, comp,
                                           budget=100_000, rng=np.random.default_rng(8),
                                           postc=postc)
        nec = posterior_necessity(postc, A)
        q = 1.0 - nec
        assert est == pytest.approx(nec, abs=3 * math.sqrt(q * (1 - q) / 100_000))

    def test_eiv_triangular_equivalence(self):
        model = EivModel(5.0, 5.0, 1.40, 0.50)
        assoc = eiv_association(model)
        postc = eiv_posterior_contour(model)
        tri = build_triangular()
        s = NestedRandomSetSampler(uniform_aux(), level=tri.func)
        for a, b in [(2.0, 4.0), (0.5, 1.5), (8.0, math.inf)]:
            A = Interval(a, b)
            target = posterior_possibility(postc, A)
            est = randomset_plausibility(s, assoc, (1.40, 0.50), A,
                                         budget=100_000, rng=np.random.default_rng(9),
                                         postc=postc)
            se = math.sqrt(max(target * (1 - target), 1e-12) / 100_000)
            assert est == pytest.approx(target, abs=3 * se + 1e-4)

    def test_no_empty_draws_in_shipped_models(self):
        s = NestedRandomSetSampler(cauchy_aux())
        assoc = cauchy_association()
        rep = randomset_plausibility_report(s, assoc, 1.3, Interval(0.0, 1.0),
                                            budget=50_000, rng=np.random.default_rng(10),
                                            postc=cauchy_posterior_contour(1.3))
        assert rep.empty_count == 0
        assert 0.0 <= rep.value <= 1.0


class TestParameterSets:
    def test_nested_parameter_sets_through_association(self):
        from possim.randomsets import parameter_set
        s = NestedRandomSetSampler(cauchy_aux())
        assoc = cauchy_association()
        rng = np.random.default_rng(21)
        thresholds = sorted(s.draw_thresholds(rng, 12))
        sets = [parameter_set(set_at_threshold(s, t), assoc, 0.7) for t in thresholds]
        for big, small in zip(sets[:-1], sets[1:]):
            assert small.lo >= big.lo - 1e-9 and small.hi <= big.hi + 1e-9
        # the set at the smallest threshold contains the mode theta = y
        assert sets[0].lo <= 0.7 <= sets[0].hi
