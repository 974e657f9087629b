"""Possibility contours and measures on 1-D spaces.

A possibility contour is a function pi with sup pi = 1; it induces a
possibility measure by supremum over sets and a dual necessity measure.
Builders construct contours from a probability distribution: the
maximum-specificity contour pi(u) = P{f(U) < f(u)} for unimodal densities f,
the generic ranked contour pi(u) = P{h(U) < h(u)}, and the triangular
contour 1 - |2u - 1| for symmetric distributions on [0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import (
    ArgumentError,
    ConfigurationError,
    DataError,
    NumericError,
    UnsupportedShapeError,
)
from .spaces import (
    Interval,
    IntervalUnion,
    Points,
    SetDescriptor,
    as_interval_union,
    horizon_point,
    require_within,
)

SUP_TOL = 1e-9        # sup-attainment tolerance for exact contours
CUT_TOL = 1e-8        # absolute tolerance on alpha-cut / region endpoints
GRID_SUP_TOL = 1e-6   # target for adaptive-grid suprema of general shapes
CREDAL_SLACK = 1e-12  # float slack in the binding credal inequalities


@dataclass(frozen=True)
class AuxiliaryDistribution:
    """Distribution of the auxiliary variable: density, optional CDF, sampler."""

    support: Interval
    density: Callable[[np.ndarray], np.ndarray]
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None
    cdf: Callable[[np.ndarray], np.ndarray] | None = None
    mode: float | None = None
    symmetric_about: float | None = None
    name: str = ""

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.sampler is None:
            raise ConfigurationError(f"distribution {self.name or '?'} has no sampler")
        return np.asarray(self.sampler(rng, size))


@dataclass(frozen=True)
class PossibilityContour:
    """Evaluable contour plus the hints the exact set-operations rely on."""

    domain: Interval
    func: Callable[[np.ndarray], np.ndarray]
    mode_hint: float | None = None
    shape_hint: str = "general"  # 'unimodal' | 'monotone' | 'general'
    mc_budget: int | None = None
    sup_estimate: float = 1.0
    sup_violation: bool = False

    def __call__(self, u):
        return self.func(u)

    def mc_se(self, p: float | np.ndarray = 0.5) -> float | np.ndarray:
        """Monte Carlo standard error of the contour estimate at level p."""
        if self.mc_budget is None:
            return 0.0 if np.isscalar(p) else np.zeros_like(np.asarray(p, float))
        p = np.clip(p, 0.0, 1.0)
        return np.sqrt(p * (1.0 - p) / self.mc_budget)


@dataclass(frozen=True)
class AlphaCut:
    alpha: float
    set: IntervalUnion


@dataclass(frozen=True)
class DiscreteCredalInstance:
    """Finite-space instance: atom probabilities vs. a contour on the atoms."""

    atoms: tuple[str, ...]
    probs: np.ndarray
    contour_values: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        cont = np.asarray(self.contour_values, dtype=float)
        if len(self.atoms) != probs.size or probs.size != cont.size:
            raise ArgumentError("atoms, probs, contour_values must share length")
        if np.any(probs < 0):
            raise ArgumentError("probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ArgumentError(f"probabilities sum to {probs.sum()}, not 1")
        if np.any((cont < 0) | (cont > 1)) or abs(cont.max() - 1.0) > 1e-12:
            raise ArgumentError("contour values must lie in [0,1] with max 1")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "contour_values", cont)


@dataclass(frozen=True)
class CredalWitness:
    alpha: float
    cut: tuple[str, ...]
    cut_probability: float
    required: float


@dataclass(frozen=True)
class DominanceReport:
    max_violation: float
    passed: bool
    tolerance: float
    n: int


# ---------------------------------------------------------------------------
# suprema over sets


def _probe(contour: PossibilityContour, side: int) -> float:
    anchor = contour.mode_hint if contour.mode_hint is not None else 0.0
    return horizon_point(contour.domain, side, anchor)


def _interval_sup(contour: PossibilityContour, iv: Interval) -> float:
    lo = iv.lo if math.isfinite(iv.lo) else _probe(contour, -1)
    hi = iv.hi if math.isfinite(iv.hi) else _probe(contour, +1)
    lo = max(lo, contour.domain.lo)
    hi = min(hi, contour.domain.hi)
    if lo > hi:
        return 0.0
    cands = [lo, hi]
    if contour.shape_hint == "unimodal":
        if contour.mode_hint is None:
            raise UnsupportedShapeError("unimodal contour without mode_hint")
        if lo <= contour.mode_hint <= hi:
            cands.append(contour.mode_hint)
    elif contour.shape_hint == "monotone":
        pass  # endpoints suffice
    else:
        return _refined_sup(contour.func, lo, hi)
    return float(np.max(contour.func(np.asarray(cands, dtype=float))))


def _refined_sup(func: Callable, lo: float, hi: float, tol: float = GRID_SUP_TOL) -> float:
    """Adaptive grid refinement around the running argmax."""
    if hi <= lo:
        return float(func(np.asarray([lo]))[0])
    xs = np.linspace(lo, hi, 513)
    best_x, best = lo, -np.inf
    for _ in range(60):
        vals = np.asarray(func(xs), dtype=float)
        i = int(np.argmax(vals))
        improved = vals[i] - best
        if vals[i] > best:
            best, best_x = float(vals[i]), float(xs[i])
        span = xs[-1] - xs[0]
        if span < 1e-12 * max(1.0, abs(best_x)) or (improved < tol / 8 and span < (hi - lo) / 64):
            break
        h = span / (len(xs) - 1)
        xs = np.linspace(max(lo, best_x - 2 * h), min(hi, best_x + 2 * h), 65)
    return best


def eval_possibility(contour: PossibilityContour, K: SetDescriptor | Sequence) -> float:
    """Possibility of K: sup of the contour over K (0 for empty K)."""
    K = as_interval_union(K)
    require_within(K, contour.domain)
    if isinstance(K, Points):
        if not K.values:
            return 0.0
        return float(np.max(contour.func(np.asarray(K.values, dtype=float))))
    if K.is_empty:
        return 0.0
    return max(_interval_sup(contour, part) for part in K.parts)


def necessity_of(contour: PossibilityContour, K: SetDescriptor | Sequence) -> float:
    """Necessity of K: 1 - possibility of the complement of K."""
    K = as_interval_union(K)
    if isinstance(K, Points):
        raise ArgumentError("complement of a finite point set is not representable")
    require_within(K, contour.domain)
    return 1.0 - eval_possibility(contour, K.complement(contour.domain))


# ---------------------------------------------------------------------------
# builders


def build_triangular() -> PossibilityContour:
    """Triangular contour 1 - |2u - 1| on [0, 1]."""

    def func(u):
        u = np.asarray(u, dtype=float)
        return 1.0 - np.abs(2.0 * u - 1.0)

    return PossibilityContour(
        domain=Interval(0.0, 1.0), func=func, mode_hint=0.5, shape_hint="unimodal"
    )


def _reject_constant_density(dist: AuxiliaryDistribution) -> None:
    lo = horizon_point(dist.support, -1, dist.mode or 0.0, 1.0)
    hi = horizon_point(dist.support, +1, dist.mode or 0.0, 1.0)
    probe = np.asarray(dist.density(np.linspace(lo, hi, 257)), dtype=float)
    if probe.max() - probe.min() <= 1e-12 * max(probe.max(), 1e-300):
        raise ArgumentError(
            "density is constant (no unimodal shape); use build_triangular for "
            "symmetric bounded-support distributions"
        )


def _locate_mode(dist: AuxiliaryDistribution) -> float:
    if dist.mode is not None:
        return dist.mode
    lo = horizon_point(dist.support, -1, 0.0, 1.0)
    hi = horizon_point(dist.support, +1, 0.0, 1.0)
    xs = np.linspace(lo, hi, 4097)
    i = int(np.argmax(dist.density(xs)))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    res = optimize.minimize_scalar(lambda x: -float(dist.density(np.asarray([x]))[0]),
                                   bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-10})
    return float(res.x)


def _numeric_cdf(dist: AuxiliaryDistribution) -> Callable[[float], float]:
    if dist.cdf is not None:
        return lambda x: float(np.asarray(dist.cdf(np.asarray([x])))[0])
    lo = dist.support.lo

    def cdf(x: float) -> float:
        a = lo if math.isfinite(lo) else -np.inf
        val, _ = integrate.quad(lambda w: float(dist.density(np.asarray([w]))[0]),
                                a, x, limit=200)
        return val

    return cdf


def _density_level_root(dist, t: float, lo: float, hi: float) -> float:
    """Root of f(w) = t on [lo, hi] where f is monotone across the bracket."""

    def g(w):
        return float(dist.density(np.asarray([w]))[0]) - t

    return float(optimize.brentq(g, lo, hi, xtol=1e-12, maxiter=200))


def build_max_specificity(
    dist: AuxiliaryDistribution,
    method: str = "closed_form",
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
) -> PossibilityContour:
    """Maximum-specificity contour pi(u) = P{f(U) < f(u)} for unimodal f.

    closed_form: symmetric unimodal about m with CDF -> 2(1 - F(m + |u - m|)).
    quadrature: level-set inversion, integrating the density over {f < f(u)}.
    monte_carlo: empirical fraction over ``budget`` draws.
    """
    if method == "closed_form":
        if dist.cdf is None or dist.symmetric_about is None:
            raise ConfigurationError(
                "closed_form needs a CDF and a symmetry center on the distribution"
            )
        _reject_constant_density(dist)
        m = dist.symmetric_about

        def func(u):
            u = np.asarray(u, dtype=float)
            return np.clip(2.0 * (1.0 - np.asarray(dist.cdf(m + np.abs(u - m)))), 0.0, 1.0)

        return PossibilityContour(dist.support, func, mode_hint=m, shape_hint="unimodal")

    if method == "quadrature":
        _reject_constant_density(dist)
        mode = _locate_mode(dist)
        cdf = _numeric_cdf(dist)
        f_mode = float(dist.density(np.asarray([mode]))[0])

        def pi_one(u: float) -> float:
            t = float(dist.density(np.asarray([u]))[0])
            if t >= f_mode:
                return 1.0
            if u <= mode:
                a = u
                hi = _expand_below_level(dist, t, mode, +1)
                b = _density_level_root(dist, t, mode, hi)
            else:
                b = u
                lo = _expand_below_level(dist, t, mode, -1)
                a = _density_level_root(dist, t, lo, mode)
            return max(0.0, min(1.0, cdf(a) + 1.0 - cdf(b)))

        def func(u):
            u = np.asarray(u, dtype=float)
            return np.array([pi_one(x) for x in np.atleast_1d(u)]).reshape(u.shape)

        return PossibilityContour(dist.support, func, mode_hint=mode, shape_hint="unimodal")

    if method == "monte_carlo":
        if dist.sampler is None:
            raise ConfigurationError("monte_carlo needs a sampler on the distribution")
        rng = rng if rng is not None else np.random.default_rng()
        return build_ranked(dist, lambda u: np.asarray(dist.density(u)), budget, rng)

    raise ArgumentError(f"unknown method {method!r}")


def _expand_below_level(dist, t: float, mode: float, side: int) -> float:
    """Walk outward from the mode until the density drops below level t."""
    step = 1.0
    x = mode + side * step
    for _ in range(80):
        end = dist.support.lo if side < 0 else dist.support.hi
        if math.isfinite(end) and (x - end) * side >= 0:
            return end
        if float(dist.density(np.asarray([x]))[0]) < t:
            return x
        step *= 2.0
        x = mode + side * step
    raise NumericError("could not bracket the density level set")


def build_ranked(
    dist: AuxiliaryDistribution,
    h: Callable[[np.ndarray], np.ndarray],
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
) -> PossibilityContour:
    """Ranked contour pi(u) = P{h(U) < h(u)}, estimated by Monte Carlo.

    Raises the sup-violation flag when the ranking statistic plateaus at its
    maximum (then sup pi < 1 over any continuum, as for constant h).
    """
    rng = rng if rng is not None else np.random.default_rng()
    draws = dist.sample(rng, budget)
    hvals = np.asarray(h(draws), dtype=float)
    if not np.all(np.isfinite(hvals)):
        raise NumericError("ranking statistic produced non-finite values")
    order = np.argsort(hvals)
    hs = hvals[order]
    top_ties = int(np.sum(hs == hs[-1]))
    sup_violation = top_ties >= 2
    sup_estimate = 1.0 if not sup_violation else float((budget - top_ties) / budget)
    mode_hint = float(np.atleast_1d(draws)[order[-1]])

    def func(u):
        u = np.asarray(u, dtype=float)
        hu = np.asarray(h(u), dtype=float)
        return np.searchsorted(hs, hu, side="left") / budget

    return PossibilityContour(
        domain=dist.support,
        func=func,
        mode_hint=mode_hint,
        shape_hint="general",
        mc_budget=budget,
        sup_estimate=sup_estimate,
        sup_violation=sup_violation,
    )


# ---------------------------------------------------------------------------
# alpha-cuts


def _bisect_level(func: Callable, lo: float, hi: float, alpha: float, rising: bool) -> float:
    """Crossing of func = alpha on [lo, hi]; func is monotone on the bracket.

    ``rising`` means func(lo) < alpha <= func(hi); returns the smallest u with
    func(u) >= alpha (mirrored when falling).
    """
    for _ in range(200):
        if hi - lo <= CUT_TOL:
            break
        mid = 0.5 * (lo + hi)
        val = float(func(np.asarray([mid]))[0])
        if (val >= alpha) == rising:
            hi = mid
        else:
            lo = mid
    return hi if rising else lo


def alpha_cut(contour: PossibilityContour, alpha: float) -> AlphaCut:
    """Upper level set {u : pi(u) >= alpha} for unimodal/monotone contours."""
    if not 0.0 <= alpha <= 1.0:
        raise ArgumentError(f"alpha must be in [0,1], got {alpha}")
    dom = contour.domain
    if alpha == 0.0:
        return AlphaCut(alpha, IntervalUnion((dom,)))
    if contour.shape_hint not in ("unimodal", "monotone"):
        raise UnsupportedShapeError(
            "alpha_cut needs a unimodal or monotone contour; scan a grid with "
            "eval_possibility for general shapes"
        )
    if contour.shape_hint == "monotone":
        return _alpha_cut_monotone(contour, alpha)
    mode = contour.mode_hint
    if mode is None:
        raise UnsupportedShapeError("unimodal contour without mode_hint")
    lo_probe = _probe(contour, -1)
    hi_probe = _probe(contour, +1)
    # lower endpoint
    if float(contour.func(np.asarray([lo_probe]))[0]) >= alpha:
        left = dom.lo  # -inf when the domain is unbounded below
    else:
        left = _bisect_level(contour.func, lo_probe, mode, alpha, rising=True)
    if float(contour.func(np.asarray([hi_probe]))[0]) >= alpha:
        right = dom.hi
    else:
        right = _bisect_level(contour.func, mode, hi_probe, alpha, rising=False)
    return AlphaCut(alpha, IntervalUnion((Interval(left, right),)))


def _alpha_cut_monotone(contour: PossibilityContour, alpha: float) -> AlphaCut:
    lo_probe, hi_probe = _probe(contour, -1), _probe(contour, +1)
    v_lo = float(contour.func(np.asarray([lo_probe]))[0])
    v_hi = float(contour.func(np.asarray([hi_probe]))[0])
    rising = v_hi >= v_lo
    if rising:
        if v_lo >= alpha:
            return AlphaCut(alpha, IntervalUnion((contour.domain,)))
        if v_hi < alpha:
            return AlphaCut(alpha, IntervalUnion.empty())
        x = _bisect_level(contour.func, lo_probe, hi_probe, alpha, rising=True)
        return AlphaCut(alpha, IntervalUnion((Interval(x, contour.domain.hi),)))
    if v_hi >= alpha:
        return AlphaCut(alpha, IntervalUnion((contour.domain,)))
    if v_lo < alpha:
        return AlphaCut(alpha, IntervalUnion.empty())
    x = _bisect_level(contour.func, lo_probe, hi_probe, alpha, rising=False)
    return AlphaCut(alpha, IntervalUnion((Interval(contour.domain.lo, x),)))


# ---------------------------------------------------------------------------
# credal membership and stochastic dominance


def credal_membership(instance: DiscreteCredalInstance) -> tuple[bool, CredalWitness | None]:
    """Check P(cut at alpha) >= 1 - alpha at every binding level.

    The binding levels are just above each distinct contour value v: the cut
    there is {pi > v} and the requirement tends to P({pi > v}) >= 1 - v.
    """
    probs = instance.probs
    cont = instance.contour_values
    for v in np.unique(cont)[::-1]:
        mask = cont > v
        p_cut = float(probs[mask].sum())
        if p_cut + CREDAL_SLACK < 1.0 - v:
            alpha = v + CREDAL_SLACK
            cut = tuple(a for a, m in zip(instance.atoms, mask) if m)
            return False, CredalWitness(alpha=float(alpha), cut=cut,
                                        cut_probability=p_cut, required=1.0 - v)
    return True, None


def dominance_check(samples, tolerance: float) -> DominanceReport:
    """Is the sample stochastically no smaller than Unif(0,1)?

    Computes max over a 1001-point grid of ECDF(alpha) - alpha; passes when
    the maximum does not exceed ``tolerance``.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise DataError("empty sample")
    if np.any(~np.isfinite(x)) or np.any((x < 0) | (x > 1)):
        raise DataError("samples must lie in [0,1]")
    xs = np.sort(x)
    grid = np.linspace(0.0, 1.0, 1001)
    ecdf = np.searchsorted(xs, grid, side="right") / x.size
    max_violation = float(np.max(ecdf - grid))
    return DominanceReport(max_violation=max_violation,
                           passed=max_violation <= tolerance,
                           tolerance=float(tolerance), n=int(x.size))


def dkw_band(n: int, delta: float = 0.01) -> float:
    """Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/delta)/(2n))."""
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def tabulate(contour: PossibilityContour, lo: float, hi: float, num: int = 1001):
    """Grid adapter (plotting, generic scans): returns (grid, values)."""
    grid = np.linspace(lo, hi, num)
    return grid, np.asarray(contour.func(grid), dtype=float)
