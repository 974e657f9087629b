"""Propagation of possibility through a data-generating association.

Given an association a(y, theta, u) = 0 with solver u_{y,theta} and a
possibility contour on the auxiliary space, the combination step produces a
posterior possibility contour on the parameter space:

    pi_y(theta) = sup over solutions u of the base contour at u.

Posterior possibility/necessity of assertions, plausibility regions and
hypothesis tests are derived from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .contours import (
    AuxiliaryDistribution,
    PossibilityContour,
    _bisect_level,
    _refined_sup,
)
from .errors import ArgumentError
from .spaces import (
    Interval,
    IntervalUnion,
    Points,
    SetDescriptor,
    as_interval_union,
    horizon_point,
    require_within,
)


@dataclass(frozen=True)
class Association:
    """The relation a(y, theta, u) = 0 as solvers plus forward simulation.

    ``solve_u`` is vectorized over theta and returns the (unique) auxiliary
    solution; associations with finitely many solutions supply
    ``solve_u_set`` (theta scalar -> 1-D array, possibly empty) instead of /
    in addition to it.
    """

    aux: AuxiliaryDistribution
    param_domain: Interval
    solve_u: Callable[[object, np.ndarray], np.ndarray] | None = None
    solve_u_set: Callable[[object, float], np.ndarray] | None = None
    solve_theta: Callable[[object, np.ndarray], np.ndarray] | None = None
    simulate: Callable[[float, np.ndarray], object] | None = None

    def u_values(self, y, theta: float) -> np.ndarray:
        if self.solve_u_set is not None:
            return np.atleast_1d(np.asarray(self.solve_u_set(y, theta), dtype=float))
        if self.solve_u is not None:
            return np.atleast_1d(np.asarray(self.solve_u(y, theta), dtype=float))
        raise ArgumentError("association has no u-solver")

    def attained_u_range(self, y, theta_grid: np.ndarray) -> tuple[float, float]:
        """Range of u_{y,theta} over a theta grid (coverage diagnostics)."""
        if self.solve_u is None:
            raise ArgumentError("coverage diagnostic needs the vectorized solver")
        u = np.asarray(self.solve_u(y, np.asarray(theta_grid, dtype=float)))
        return float(np.min(u)), float(np.max(u))


@dataclass(frozen=True)
class PosteriorContour:
    """Parameter-space contour obtained by pushing a base contour through
    an association at observed data y."""

    y: object
    eval: Callable[[np.ndarray], np.ndarray]
    base: PossibilityContour | None
    assoc: Association | None
    param_domain: Interval
    mode_hint: float | None = None
    shape_hint: str = "general"
    # contour limits at the two ends of the parameter domain, when known in
    # closed form; used to classify region endpoints as unbounded.
    tail_limits: tuple[float, float] | None = None
    empty_solution_flag: bool = False

    def __call__(self, theta):
        return self.eval(theta)

    def tail_value(self, side: int) -> float:
        if self.tail_limits is not None:
            return self.tail_limits[0] if side < 0 else self.tail_limits[1]
        anchor = self.mode_hint if self.mode_hint is not None else 0.0
        probe = horizon_point(self.param_domain, side, anchor)
        return float(self.eval(np.asarray([probe]))[0])


@dataclass(frozen=True)
class PlausibilityRegion:
    alpha: float
    intervals: IntervalUnion

    @property
    def is_empty(self) -> bool:
        return self.intervals.is_empty

    def contains(self, theta: float) -> bool:
        return self.intervals.contains(theta)

    def length(self) -> float:
        """Total length; +inf when any side is unbounded."""
        total = 0.0
        for p in self.intervals.parts:
            if not p.is_bounded:
                return math.inf
            total += p.hi - p.lo
        return total

    @property
    def is_bounded(self) -> bool:
        return all(p.is_bounded for p in self.intervals.parts)


@dataclass(frozen=True)
class TestDecision:
    reject: bool
    attained: float
    alpha: float


def posterior_contour(
    assoc: Association,
    y,
    base: PossibilityContour,
    mode_hint: float | None = None,
    shape_hint: str = "general",
    tail_limits: tuple[float, float] | None = None,
) -> PosteriorContour:
    """C-step: theta -> sup over u_{y,theta} of the base contour.

    Parameters where the association has no auxiliary solution get contour
    value 0 (supremum over the empty set) and raise the diagnostic flag.
    """
    empty_seen = False

    if assoc.solve_u_set is not None:
        def eval_fn(theta):
            theta = np.atleast_1d(np.asarray(theta, dtype=float))
            out = np.zeros_like(theta)
            for i, t in enumerate(theta):
                us = assoc.u_values(y, float(t))
                out[i] = np.max(base.func(us)) if us.size else 0.0
            return out

        # probe for empty solution sets on a coarse grid
        lo = horizon_point(assoc.param_domain, -1, mode_hint or 0.0)
        hi = horizon_point(assoc.param_domain, +1, mode_hint or 0.0)
        for t in np.linspace(lo, hi, 33):
            if assoc.u_values(y, float(t)).size == 0:
                empty_seen = True
                break
    else:
        def eval_fn(theta):
            theta = np.asarray(theta, dtype=float)
            return np.asarray(base.func(assoc.solve_u(y, theta)), dtype=float)

    return PosteriorContour(
        y=y,
        eval=eval_fn,
        base=base,
        assoc=assoc,
        param_domain=assoc.param_domain,
        mode_hint=mode_hint,
        shape_hint=shape_hint,
        tail_limits=tail_limits,
        empty_solution_flag=empty_seen,
    )


def _boundary_inset(lo: float, hi: float, anchor: float) -> float:
    finite = [abs(x) for x in (lo, hi, anchor) if math.isfinite(x)]
    return 1e-9 * max(1.0, *finite) if finite else 1e-9


def _post_interval_sup(postc: PosteriorContour, iv: Interval) -> float:
    dom = postc.param_domain
    anchor = postc.mode_hint if postc.mode_hint is not None else 0.0
    lo = max(iv.lo, dom.lo)
    hi = min(iv.hi, dom.hi)
    if lo > hi:
        return 0.0
    inset = _boundary_inset(lo, hi, anchor)
    cands = []
    # sides touching the domain boundary contribute the tail limit; the
    # evaluation point is pulled strictly inside (open-domain boundaries,
    # e.g. phi = 0, are not evaluable)
    if lo <= dom.lo:
        cands.append(postc.tail_value(-1))
        lo_eval = min(dom.lo + inset, hi) if math.isfinite(dom.lo) \
            else horizon_point(dom, -1, anchor)
    else:
        lo_eval = lo
    if hi >= dom.hi:
        cands.append(postc.tail_value(+1))
        hi_eval = max(dom.hi - inset, lo_eval) if math.isfinite(dom.hi) \
            else horizon_point(dom, +1, anchor)
    else:
        hi_eval = hi
    if lo_eval > hi_eval:
        lo_eval = hi_eval = 0.5 * (lo + min(hi, lo_eval))
    if postc.shape_hint == "unimodal" and postc.mode_hint is not None:
        pts = [lo_eval, hi_eval]
        if lo_eval <= postc.mode_hint <= hi_eval:
            pts.append(postc.mode_hint)
        cands.extend(float(v) for v in np.atleast_1d(postc.eval(np.asarray(pts))))
    elif postc.shape_hint == "monotone":
        cands.extend(float(v) for v in np.atleast_1d(postc.eval(np.asarray([lo_eval, hi_eval]))))
    else:
        cands.append(_refined_sup(postc.eval, lo_eval, hi_eval))
    return min(1.0, max(cands))


def posterior_possibility(postc: PosteriorContour, A: SetDescriptor | Sequence) -> float:
    """Possibility of an assertion A about the parameter."""
    A = as_interval_union(A)
    require_within(A, postc.param_domain)
    if isinstance(A, Points):
        if not A.values:
            return 0.0
        return float(np.max(postc.eval(np.asarray(A.values, dtype=float))))
    if A.is_empty:
        return 0.0
    return max(_post_interval_sup(postc, part) for part in A.parts)


def posterior_necessity(postc: PosteriorContour, A: SetDescriptor | Sequence) -> float:
    """Necessity of A: 1 - possibility of its complement."""
    A = as_interval_union(A)
    if isinstance(A, Points):
        raise ArgumentError("complement of a finite point set is not representable")
    require_within(A, postc.param_domain)
    comp = A.complement(postc.param_domain)
    return 1.0 - posterior_possibility(postc, comp)


def plausibility_region(postc: PosteriorContour, alpha: float) -> PlausibilityRegion:
    """The region {theta : pi_y(theta) > alpha}.

    Sides where the contour's tail limit stays above alpha are unbounded (or
    run to the domain boundary when that is finite).
    """
    if not 0.0 < alpha < 1.0:
        raise ArgumentError(f"alpha must be in (0,1), got {alpha}")
    if postc.shape_hint not in ("unimodal", "monotone"):
        return _region_by_scan(postc, alpha)
    if postc.shape_hint == "monotone":
        return _region_monotone(postc, alpha)
    mode = postc.mode_hint
    dom = postc.param_domain
    peak = float(postc.eval(np.asarray([mode]))[0])
    if peak <= alpha:
        return PlausibilityRegion(alpha, IntervalUnion.empty())
    anchor = mode
    if postc.tail_value(-1) > alpha:
        left = dom.lo
    else:
        lo_probe = dom.lo if math.isfinite(dom.lo) else horizon_point(dom, -1, anchor)
        left = _bisect_level(postc.eval, lo_probe, mode, alpha, rising=True)
    if postc.tail_value(+1) > alpha:
        right = dom.hi
    else:
        hi_probe = dom.hi if math.isfinite(dom.hi) else horizon_point(dom, +1, anchor)
        right = _bisect_level(postc.eval, mode, hi_probe, alpha, rising=False)
    return PlausibilityRegion(alpha, IntervalUnion((Interval(left, right),)))


def _region_monotone(postc: PosteriorContour, alpha: float) -> PlausibilityRegion:
    dom = postc.param_domain
    v_lo, v_hi = postc.tail_value(-1), postc.tail_value(+1)
    if v_lo <= alpha and v_hi <= alpha:
        return PlausibilityRegion(alpha, IntervalUnion.empty())
    if v_lo > alpha and v_hi > alpha:
        return PlausibilityRegion(alpha, IntervalUnion((dom,)))
    anchor = postc.mode_hint if postc.mode_hint is not None else 0.0
    lo_probe = dom.lo if math.isfinite(dom.lo) else horizon_point(dom, -1, anchor)
    hi_probe = dom.hi if math.isfinite(dom.hi) else horizon_point(dom, +1, anchor)
    rising = v_hi > v_lo
    x = _bisect_level(postc.eval, lo_probe, hi_probe, alpha, rising=rising)
    iv = Interval(x, dom.hi) if rising else Interval(dom.lo, x)
    return PlausibilityRegion(alpha, IntervalUnion((iv,)))


def _region_by_scan(postc: PosteriorContour, alpha: float, num: int = 4097) -> PlausibilityRegion:
    """Grid fallback for contours without a usable shape hint."""
    dom = postc.param_domain
    anchor = postc.mode_hint if postc.mode_hint is not None else 0.0
    lo = dom.lo if math.isfinite(dom.lo) else horizon_point(dom, -1, anchor)
    hi = dom.hi if math.isfinite(dom.hi) else horizon_point(dom, +1, anchor)
    grid = np.linspace(lo, hi, num)
    vals = np.asarray(postc.eval(grid), dtype=float)
    above = vals > alpha
    if not np.any(above):
        return PlausibilityRegion(alpha, IntervalUnion.empty())
    parts = []
    edges = np.flatnonzero(np.diff(above.astype(int)))
    starts = [0] if above[0] else []
    for e in edges:
        if above[e + 1] and not above[e]:
            starts.append(e + 1)
    for s in starts:
        e = s
        while e + 1 < num and above[e + 1]:
            e += 1
        left = grid[s] if s > 0 else (dom.lo if postc.tail_value(-1) > alpha else grid[0])
        right = grid[e] if e < num - 1 else (dom.hi if postc.tail_value(+1) > alpha else grid[-1])
        parts.append(Interval(left, right))
    return PlausibilityRegion(alpha, IntervalUnion.of(*parts))


def hypothesis_test(postc: PosteriorContour, A: SetDescriptor | Sequence, alpha: float) -> TestDecision:
    """Reject the assertion A iff its posterior possibility is <= alpha."""
    if not 0.0 < alpha < 1.0:
        raise ArgumentError(f"alpha must be in (0,1), got {alpha}")
    attained = posterior_possibility(postc, A)
    return TestDecision(reject=attained <= alpha, attained=attained, alpha=alpha)
