"""Comparison methods: fiducial-style push-forwards and the flat-prior Bayes
marginal for the errors-in-variables example.

The fiducial baseline exists to show what valid possibilistic inference is
NOT: possibilizing the fiducial density (ranking by f(u) J_y(theta_{y,u}))
agrees with the direct construction only when the Jacobian is constant, and
the half-line local strategy recovers Fisher's fiducial probability, which
is additive and therefore exposed to false confidence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .association import Association
from .contours import PossibilityContour
from .errors import (
    ArgumentError,
    ConfigurationError,
    DegenerateDataError,
    NumericError,
    UnsupportedShapeError,
)
from .models.curved_normal import (
    CurvedNormalModel,
    CurvedNormalReduction,
    curved_normal_conditional_density,
)
from .models.eiv import EivModel
from .spaces import Interval

_JAC_REL_STEP = 1e-6


@dataclass(frozen=True)
class BeliefAssigner:
    """A named data-dependent belief assignment (y, A) -> [0,1]."""

    name: str
    assign: Callable


@dataclass(frozen=True)
class FiducialSampler:
    """Push-forward sampler: draws theta_{y,U} with U from the auxiliary."""

    assoc: Association

    def __post_init__(self):
        if self.assoc.solve_theta is None:
            raise ConfigurationError("fiducial sampling needs solve_theta")

    def draw(self, rng: np.random.Generator, y, budget: int) -> np.ndarray:
        u = self.assoc.aux.sample(rng, budget)
        return np.asarray(self.assoc.solve_theta(y, u), dtype=float)


def _jacobian(assoc: Association, y, theta: np.ndarray) -> np.ndarray:
    """|d u_{y,theta} / d theta| by central finite differences."""
    theta = np.asarray(theta, dtype=float)
    step = _JAC_REL_STEP * np.maximum(1.0, np.abs(theta))
    u_hi = np.asarray(assoc.solve_u(y, theta + step), dtype=float)
    u_lo = np.asarray(assoc.solve_u(y, theta - step), dtype=float)
    jac = np.abs(u_hi - u_lo) / (2.0 * step)
    if not np.all(np.isfinite(jac)):
        raise NumericError("non-finite Jacobian in fiducial construction")
    return jac


def fiducial_contour(
    assoc: Association,
    y,
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
) -> PossibilityContour:
    """Possibilize the fiducial density: rank parameters by the push-forward
    density f(u_{y,theta}) J_y(theta) instead of by f(u_{y,theta}) alone."""
    if assoc.solve_theta is None:
        raise ConfigurationError("fiducial construction needs solve_theta")
    rng = rng if rng is not None else np.random.default_rng()
    draws = assoc.aux.sample(rng, budget)
    thetas = np.asarray(assoc.solve_theta(y, draws), dtype=float)
    weights = np.asarray(assoc.aux.density(draws), dtype=float) * _jacobian(assoc, y, thetas)
    if not np.all(np.isfinite(weights)):
        raise NumericError("non-finite fiducial weights")
    ws = np.sort(weights)
    i_best = int(np.argmax(weights))
    mode_hint = float(thetas[i_best])

    def func(theta):
        theta = np.asarray(theta, dtype=float)
        u = np.asarray(assoc.solve_u(y, theta), dtype=float)
        w = np.asarray(assoc.aux.density(u), dtype=float) * _jacobian(assoc, y, theta)
        return np.searchsorted(ws, w, side="left") / budget

    return PossibilityContour(
        domain=assoc.param_domain,
        func=func,
        mode_hint=mode_hint,
        shape_hint="general",
        mc_budget=budget,
    )


def _theta_monotone_direction(assoc: Association, y) -> int:
    """+1 if theta_{y,u} increases in u, -1 if it decreases; else error."""
    lo, hi = assoc.aux.support.lo, assoc.aux.support.hi
    lo = lo if math.isfinite(lo) else -50.0
    hi = hi if math.isfinite(hi) else 50.0
    grid = np.linspace(lo, hi, 201)
    th = np.asarray(assoc.solve_theta(y, grid), dtype=float)
    d = np.diff(th)
    if np.all(d >= 0):
        return 1
    if np.all(d <= 0):
        return -1
    raise UnsupportedShapeError("theta_{y,u} is not monotone in u")


def fiducial_halfline_possibility(
    assoc: Association,
    y,
    theta: float,
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
) -> float:
    """Fisher-style fiducial probability of the half-line [theta, inf):
    P_U(theta_{y,U} >= theta).  Closed form through the auxiliary CDF when
    available, otherwise Monte Carlo."""
    if assoc.solve_theta is None:
        raise ConfigurationError("half-line fiducial needs solve_theta")
    direction = _theta_monotone_direction(assoc, y)
    if assoc.aux.cdf is not None and assoc.solve_u is not None:
        u_star = float(np.asarray(assoc.solve_u(y, np.asarray(theta, dtype=float))))
        F = float(np.asarray(assoc.aux.cdf(np.asarray([u_star])))[0])
        return F if direction < 0 else 1.0 - F
    rng = rng if rng is not None else np.random.default_rng()
    draws = assoc.aux.sample(rng, budget)
    thetas = np.asarray(assoc.solve_theta(y, draws), dtype=float)
    return float(np.mean(thetas >= theta))


def curved_normal_fiducial_interval(
    model: CurvedNormalModel,
    reduction: CurvedNormalReduction,
    level: float,
    budget: int = 10_000,
    rng: np.random.Generator | None = None,
) -> Interval:
    """Equal-tailed interval of the conditional push-forward y1 - y2*V,
    V ~ f_h, from sample quantiles."""
    if not 0.0 < level < 1.0:
        raise ArgumentError(f"level must be in (0,1), got {level}")
    rng = rng if rng is not None else np.random.default_rng()
    fh = curved_normal_conditional_density(model, reduction.h)
    v = fh.sample(rng, budget)
    q_lo, q_hi = np.quantile(v, [(1.0 - level) / 2.0, (1.0 + level) / 2.0])
    return Interval(reduction.y1 - reduction.y2 * float(q_hi),
                    reduction.y1 - reduction.y2 * float(q_lo))


def eiv_flat_bayes_probability(
    model: EivModel,
    predicate: Callable[[np.ndarray], np.ndarray],
    budget: int = 100_000,
    rng: np.random.Generator | None = None,
) -> float:
    """Flat-prior Bayes marginal probability that phi = theta1/theta2
    satisfies the predicate.

    The flat-prior posterior of the shifted-exponential location pair is
    theta_i = y_i - E_i with E_i ~ Exp(lambda_i), truncated to theta_i > 0 by
    rejection (phi and xi are positive in this model).
    """
    rng = rng if rng is not None else np.random.default_rng()
    t1 = model.y1 - rng.exponential(1.0 / model.lambda1, budget)
    t2 = model.y2 - rng.exponential(1.0 / model.lambda2, budget)
    ok = (t1 > 0) & (t2 > 0)
    n_ok = int(np.count_nonzero(ok))
    if n_ok < budget * 1e-4:
        raise DegenerateDataError(
            f"flat-prior posterior acceptance rate {n_ok / budget:.2e} below 1e-4"
        )
    return float(np.mean(np.asarray(predicate(t1[ok] / t2[ok]), dtype=bool)))
