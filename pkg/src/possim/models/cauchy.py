"""Cauchy location model: one observation y = theta + u, u standard Cauchy.

Everything is closed form: the auxiliary CDF via arctangent, the
maximum-specificity contour 2{1 - F(|u|)}, and the posterior contour
2{1 - F(|y - theta|)}.
"""
from __future__ import annotations

import numpy as np

from ..association import Association, PosteriorContour
from ..contours import AuxiliaryDistribution, PossibilityContour
from ..spaces import Interval, REAL_LINE


def cauchy_cdf(x):
    x = np.asarray(x, dtype=float)
    return 0.5 + np.arctan(x) / np.pi


def cauchy_quantile(p):
    p = np.asarray(p, dtype=float)
    return np.tan(np.pi * (p - 0.5))


def cauchy_density(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (np.pi * (1.0 + x * x))


def cauchy_aux() -> AuxiliaryDistribution:
    return AuxiliaryDistribution(
        support=REAL_LINE,
        density=cauchy_density,
        cdf=cauchy_cdf,
        sampler=lambda rng, size: rng.standard_cauchy(size),
        mode=0.0,
        symmetric_about=0.0,
        name="standard-cauchy",
    )


def cauchy_contour() -> PossibilityContour:
    """Maximum-specificity contour of the standard Cauchy: 2{1 - F(|u|)}."""

    def func(u):
        u = np.asarray(u, dtype=float)
        return np.clip(2.0 * (1.0 - cauchy_cdf(np.abs(u))), 0.0, 1.0)

    return PossibilityContour(REAL_LINE, func, mode_hint=0.0, shape_hint="unimodal")


def cauchy_association() -> Association:
    return Association(
        aux=cauchy_aux(),
        param_domain=REAL_LINE,
        solve_u=lambda y, theta: y - np.asarray(theta, dtype=float),
        solve_theta=lambda y, u: y - np.asarray(u, dtype=float),
        simulate=lambda theta, u: float(theta + u),
    )


def cauchy_posterior_contour(y: float) -> PosteriorContour:
    """Posterior contour theta -> 2{1 - F(|y - theta|)}, peaked at theta = y."""
    y = float(y)

    def eval_fn(theta):
        theta = np.asarray(theta, dtype=float)
        return np.clip(2.0 * (1.0 - cauchy_cdf(np.abs(y - theta))), 0.0, 1.0)

    return PosteriorContour(
        y=y,
        eval=eval_fn,
        base=cauchy_contour(),
        assoc=cauchy_association(),
        param_domain=REAL_LINE,
        mode_hint=y,
        shape_hint="unimodal",
        tail_limits=(0.0, 0.0),
    )


def cauchy_interval(y: float, alpha: float) -> Interval:
    """Closed-form plausibility interval y +- F^{-1}(1 - alpha/2)."""
    half = float(cauchy_quantile(1.0 - alpha / 2.0))
    return Interval(y - half, y + half)


def simulate_data(rng: np.random.Generator, theta: float) -> float:
    return float(theta + rng.standard_cauchy())
