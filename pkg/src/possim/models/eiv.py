"""Exponential errors-in-variables model.

Observations y_i = theta_i + u_i with u_i ~ Exp(lambda_i) independent;
interest parameter phi = theta1/theta2 > 0, nuisance xi = theta2 eliminated
by marginalization: Y1 - phi*Y2 = U1 - phi*U2, whose distribution is
asymmetric Laplace.  With the triangular contour on the probability integral
transform, the marginal posterior contour is

    pi_y(phi) = 1 - |2 G_phi(y1 - phi y2) - 1|,

where G_phi is the CDF of U1 - phi U2, i.e. the asymmetric Laplace with
right-tail rate lambda1 and left-tail rate lambda2/phi.  (Deriving the law of
phi*U2 gives the left rate lambda2/phi; only this choice reproduces the
non-vanishing right tail limit 2 exp(-lambda2 y2), which Monte Carlo
confirms.)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..association import Association, PosteriorContour
from ..contours import AuxiliaryDistribution, build_triangular
from ..errors import ArgumentError, DomainError
from ..spaces import Interval


@dataclass(frozen=True)
class EivModel:
    lambda1: float
    lambda2: float
    y1: float
    y2: float

    def __post_init__(self):
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise ArgumentError("rates must be positive")
        if not (math.isfinite(self.y1) and math.isfinite(self.y2)):
            raise ArgumentError("observations must be finite")


def asymmetric_laplace_cdf(r1: float, r2: float, x):
    """CDF of X1 - X2 with X1 ~ Exp(r1), X2 ~ Exp(r2) independent."""
    if r1 <= 0 or r2 <= 0:
        raise ArgumentError("rates must be positive")
    x = np.asarray(x, dtype=float)
    pos = 1.0 - (r2 / (r1 + r2)) * np.exp(-r1 * np.maximum(x, 0.0))
    neg = (r1 / (r1 + r2)) * np.exp(r2 * np.minimum(x, 0.0))
    out = np.where(x >= 0, pos, neg)
    return out if out.shape else float(out)


def median_stat(model: EivModel, phi):
    """m(phi) = G_phi(y1 - phi*y2), in algebra stable for extreme phi."""
    phi = np.asarray(phi, dtype=float)
    if np.any(phi <= 0) or np.any(~np.isfinite(phi)):
        raise DomainError("phi must be positive and finite")
    l1, l2 = model.lambda1, model.lambda2
    x = model.y1 - phi * model.y2
    # r2/(r1+r2) = l2/(phi*l1 + l2) and r1/(r1+r2) = phi*l1/(phi*l1 + l2)
    denom = phi * l1 + l2
    pos = 1.0 - (l2 / denom) * np.exp(-l1 * np.maximum(x, 0.0))
    with np.errstate(over="ignore"):
        neg = (phi * l1 / denom) * np.exp((l2 / phi) * np.minimum(x, 0.0))
    out = np.where(x >= 0, pos, neg)
    return out if out.shape else float(out)


def tail_stats(model: EivModel) -> tuple[float, float]:
    """Limits of m(phi) as phi -> 0+ and phi -> +inf."""
    l1, l2 = model.lambda1, model.lambda2
    if model.y1 > 0:
        g0 = 1.0 - math.exp(-l1 * model.y1)
    else:
        g0 = 0.0
    if model.y2 > 0:
        ginf = math.exp(-l2 * model.y2)
    elif model.y2 < 0:
        ginf = 1.0
    else:
        ginf = 1.0
    return g0, ginf


def _contour_from_m(m):
    return 1.0 - np.abs(2.0 * np.asarray(m, dtype=float) - 1.0)


def eiv_contour_limits(model: EivModel) -> tuple[float, float]:
    g0, ginf = tail_stats(model)
    return float(_contour_from_m(g0)), float(_contour_from_m(ginf))


def _median_crossing(model: EivModel, grid_hint=None) -> float | None:
    """phi where m(phi) = 1/2; the contour peaks there (value 1)."""
    if grid_hint is not None:
        hint = np.asarray(grid_hint, dtype=float)
        ts = np.log(hint[hint > 0])
        ts = np.union1d(ts, np.linspace(-34.0, 34.0, 273))
    else:
        ts = np.linspace(-34.0, 34.0, 273)
    vals = median_stat(model, np.exp(ts)) - 0.5
    sign_change = np.flatnonzero(np.diff(np.sign(vals)) != 0)
    if sign_change.size == 0:
        return None
    # take the last crossing: the one leading into the right tail
    i = int(sign_change[-1])
    root = optimize.brentq(
        lambda t: float(median_stat(model, math.exp(t))) - 0.5,
        ts[i], ts[i + 1], xtol=1e-13,
    )
    return math.exp(root)


def uniform_aux() -> AuxiliaryDistribution:
    return AuxiliaryDistribution(
        support=Interval(0.0, 1.0),
        density=lambda u: np.ones_like(np.asarray(u, dtype=float)),
        cdf=lambda u: np.clip(np.asarray(u, dtype=float), 0.0, 1.0),
        sampler=lambda rng, size: rng.uniform(size=size),
        name="uniform(0,1)",
    )


def eiv_association(model: EivModel) -> Association:
    """Reduced marginal association: the auxiliary is V = G_phi(Y1 - phi Y2),
    uniform on (0,1).  The forward simulation needs the eliminated nuisance,
    so only the solver side is exposed."""
    return Association(
        aux=uniform_aux(),
        param_domain=Interval(0.0, math.inf),
        solve_u=lambda y, phi: median_stat(model, phi),
    )


def eiv_posterior_contour(model: EivModel, phi_grid_hint=None) -> PosteriorContour:
    """Marginal posterior contour for phi = theta1/theta2 on (0, inf).

    phi_grid_hint optionally widens the bracket search for the contour peak
    (the median crossing of G_phi); the closed-form evaluation ignores it.
    """

    def eval_fn(phi):
        return _contour_from_m(median_stat(model, phi))

    lo_lim, hi_lim = eiv_contour_limits(model)
    crossing = _median_crossing(model, grid_hint=phi_grid_hint)
    if crossing is not None:
        mode, shape = crossing, "unimodal"
    else:
        mode, shape = None, "general"
    return PosteriorContour(
        y=(model.y1, model.y2),
        eval=eval_fn,
        base=build_triangular(),
        assoc=eiv_association(model),
        param_domain=Interval(0.0, math.inf),
        mode_hint=mode,
        shape_hint=shape,
        tail_limits=(lo_lim, hi_lim),
    )


def simulate_data(rng: np.random.Generator, theta1: float, theta2: float,
                  lambda1: float, lambda2: float) -> tuple[float, float]:
    y1 = theta1 + rng.exponential(1.0 / lambda1)
    y2 = theta2 + rng.exponential(1.0 / lambda2)
    return float(y1), float(y2)
