"""Nested random sets and their equivalence with possibility contours.

The canonical nested random set for a unimodal auxiliary density f is the
random upper level set S = {u : f(u) >= f(U~)}, U~ ~ P_U.  Its hitting
probability u -> P(S contains u) equals the maximum-specificity contour, and
pushing S through an association reproduces the posterior possibility of any
assertion.  Sets are represented implicitly by their thresholds; every set
query reduces to a density comparison.

For auxiliaries without a unimodal density (the uniform auxiliary of the
errors-in-variables marginal), the same construction applies with a ranking
function in place of the density, e.g. the triangular contour itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .association import Association, PosteriorContour
from .contours import AuxiliaryDistribution, _refined_sup
from .errors import ArgumentError
from .spaces import (
    Interval,
    IntervalUnion,
    Points,
    SetDescriptor,
    as_interval_union,
    horizon_point,
)


@dataclass(frozen=True)
class NestedRandomSetSampler:
    """Draws thresholds t = level(U~); the realized set is {u: level(u) >= t}."""

    dist: AuxiliaryDistribution
    level: Callable[[np.ndarray], np.ndarray] | None = None

    def level_values(self, u):
        fn = self.level if self.level is not None else self.dist.density
        return np.asarray(fn(np.asarray(u, dtype=float)), dtype=float)

    def draw_thresholds(self, rng: np.random.Generator, budget: int) -> np.ndarray:
        return self.level_values(self.dist.sample(rng, budget))


@dataclass(frozen=True)
class NestedSetDraw:
    threshold: float
    contains: Callable[[float], bool]
    interval: Interval | None  # explicit endpoints for unimodal level functions


def _level_mode(sampler: NestedRandomSetSampler) -> float | None:
    return sampler.dist.mode


def sample_nested_set(
    sampler: NestedRandomSetSampler, rng: np.random.Generator
) -> NestedSetDraw:
    """One realization: threshold plus membership test; for unimodal 1-D
    level functions also the explicit interval endpoints by bisection."""
    t = float(sampler.draw_thresholds(rng, 1)[0])
    return set_at_threshold(sampler, t)


def set_at_threshold(sampler: NestedRandomSetSampler, t: float) -> NestedSetDraw:
    def contains(u: float) -> bool:
        return bool(sampler.level_values(np.asarray([u]))[0] >= t)

    interval = None
    mode = _level_mode(sampler)
    if mode is not None:
        interval = _superlevel_interval(sampler, t, mode)
    return NestedSetDraw(threshold=t, contains=contains, interval=interval)


def _superlevel_interval(sampler: NestedRandomSetSampler, t: float, mode: float) -> Interval:
    support = sampler.dist.support

    def endpoint(side: int) -> float:
        probe = horizon_point(support, side, mode, 1.0)
        lo, hi = (probe, mode) if side < 0 else (mode, probe)
        if sampler.level_values(np.asarray([probe]))[0] >= t:
            return support.lo if side < 0 else support.hi
        # bisect the crossing of level = t between probe and mode
        for _ in range(200):
            if hi - lo <= 1e-10 * max(1.0, abs(mode)) + 1e-12:
                break
            mid = 0.5 * (lo + hi)
            inside = sampler.level_values(np.asarray([mid]))[0] >= t
            if side < 0:
                if inside:
                    hi = mid
                else:
                    lo = mid
            else:
                if inside:
                    lo = mid
                else:
                    hi = mid
        return hi if side < 0 else lo

    return Interval(endpoint(-1), endpoint(+1))


def parameter_set(
    draw: NestedSetDraw, assoc: Association, y
) -> Interval | None:
    """Theta_y(S) for one realization, as an interval.

    Available when the realized auxiliary set has explicit endpoints and the
    association solves for theta; nestedness in u carries over to theta."""
    if draw.interval is None or assoc.solve_theta is None:
        return None
    ends = np.asarray(assoc.solve_theta(y, np.asarray([draw.interval.lo,
                                                       draw.interval.hi])), dtype=float)
    return Interval(float(np.min(ends)), float(np.max(ends)))


def hitting_probability(
    sampler: NestedRandomSetSampler,
    u: float,
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
) -> float:
    """Monte Carlo estimate of P(S contains u) = P{level(U~) <= level(u)}."""
    if budget < 1:
        raise ArgumentError("budget must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    t = sampler.draw_thresholds(rng, budget)
    return float(np.mean(t <= sampler.level_values(np.asarray([u]))[0]))


def hitting_curve(
    sampler: NestedRandomSetSampler,
    grid: np.ndarray,
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Hitting probabilities on a grid from one shared threshold sample."""
    rng = rng if rng is not None else np.random.default_rng()
    t = np.sort(sampler.draw_thresholds(rng, budget))
    levels = sampler.level_values(np.asarray(grid, dtype=float))
    return np.searchsorted(t, levels, side="right") / budget


@dataclass(frozen=True)
class RandomSetPlausibility:
    value: float
    empty_count: int
    budget: int

    @property
    def mc_se(self) -> float:
        p = min(max(self.value, 0.0), 1.0)
        return math.sqrt(p * (1.0 - p) / self.budget)


def _sup_level_over(assoc, y, A: IntervalUnion | Points,
                    sampler: NestedRandomSetSampler,
                    postc: PosteriorContour | None = None) -> float:
    """sup over theta in A of level(u_{y,theta}).

    The maximum-specificity contour is a nondecreasing transform of the
    level function, so the two share maximizers; when the posterior contour
    is supplied with a unimodal/monotone shape hint, the supremum is exact
    from the interval endpoints plus the contour mode.  Otherwise an
    adaptive grid refinement is used (adequate for bounded queries only).
    """
    dom = assoc.param_domain

    def g(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return sampler.level_values(np.asarray(assoc.solve_u(y, theta), dtype=float))

    if isinstance(A, Points):
        return float(np.max(g(np.asarray(A.values)))) if A.values else -math.inf

    exact = (postc is not None and postc.shape_hint in ("unimodal", "monotone"))
    anchor = postc.mode_hint if exact and postc.mode_hint is not None else 0.0
    best = -math.inf
    for part in A.parts:
        lo = part.lo if math.isfinite(part.lo) else horizon_point(dom, -1, anchor)
        hi = part.hi if math.isfinite(part.hi) else horizon_point(dom, +1, anchor)
        lo = max(lo, dom.lo)
        hi = min(hi, dom.hi)
        if lo > hi:
            continue
        finite = [abs(x) for x in (lo, hi, anchor) if math.isfinite(x)]
        inset = 1e-9 * max(1.0, *finite)
        if lo == dom.lo and math.isfinite(dom.lo):
            lo = min(dom.lo + inset, hi)
        if hi == dom.hi and math.isfinite(dom.hi):
            hi = max(dom.hi - inset, lo)
        if exact:
            cands = [lo, hi]
            if postc.mode_hint is not None and lo <= postc.mode_hint <= hi:
                cands.append(postc.mode_hint)
            best = max(best, float(np.max(g(np.asarray(cands)))))
        else:
            best = max(best, _refined_sup(g, lo, hi, tol=1e-9))
    return best


def randomset_plausibility_report(
    sampler: NestedRandomSetSampler,
    assoc: Association,
    y,
    A: SetDescriptor,
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
    postc: PosteriorContour | None = None,
    sup_fn: Callable[[IntervalUnion | Points], float] | None = None,
) -> RandomSetPlausibility:
    """P{Theta_y(S) hits A}: a draw hits iff its threshold does not exceed
    sup over A of level(u_{y,theta}).  Also counts empty Theta_y(S) draws
    (thresholds above the supremum over the whole parameter domain)."""
    rng = rng if rng is not None else np.random.default_rng()
    A = as_interval_union(A)
    sup_of = sup_fn if sup_fn is not None else (
        lambda K: _sup_level_over(assoc, y, K, sampler, postc=postc))
    m_A = sup_of(A)
    m_all = sup_of(IntervalUnion((assoc.param_domain,)))
    t = sampler.draw_thresholds(rng, budget)
    value = float(np.mean(t <= m_A))
    empty = int(np.count_nonzero(t > m_all))
    return RandomSetPlausibility(value=value, empty_count=empty, budget=budget)


def randomset_plausibility(
    sampler: NestedRandomSetSampler,
    assoc: Association,
    y,
    A: SetDescriptor,
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
    postc: PosteriorContour | None = None,
) -> float:
    return randomset_plausibility_report(sampler, assoc, y, A, budget, rng,
                                         postc=postc).value
