"""Worked models, addressable by name for the harness and the CLI.

Each adapter knows how to simulate data at a true parameter, build the
posterior possibility contour for observed data, and report the scalar
feature inference targets (theta itself, or phi = theta1/theta2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..association import PosteriorContour
from ..errors import ConfigurationError
from . import cauchy as _cauchy
from . import curved_normal as _curved
from . import eiv as _eiv
from .cauchy import (
    cauchy_association,
    cauchy_aux,
    cauchy_cdf,
    cauchy_contour,
    cauchy_interval,
    cauchy_posterior_contour,
    cauchy_quantile,
)
from .curved_normal import (
    ConditionalVDensity,
    CurvedNormalModel,
    CurvedNormalReduction,
    curved_normal_association,
    curved_normal_conditional_density,
    curved_normal_posterior_contour,
    curved_normal_reduce,
    eta_observed,
    v_solution,
)
from .eiv import (
    EivModel,
    asymmetric_laplace_cdf,
    eiv_association,
    eiv_contour_limits,
    eiv_posterior_contour,
    median_stat,
    uniform_aux,
)


@dataclass(frozen=True)
class CauchyLocationAdapter:
    name: str = "cauchy"

    def simulate(self, rng: np.random.Generator, truth: float) -> float:
        return _cauchy.simulate_data(rng, truth)

    def posterior(self, data: float) -> PosteriorContour:
        return cauchy_posterior_contour(data)

    def truth_feature(self, truth) -> float:
        return float(truth)

    def contour_at_truth(self, data: float, truth) -> float:
        return float(self.posterior(data).eval(np.asarray([truth]))[0])


@dataclass(frozen=True)
class CurvedNormalAdapter:
    n: int = 10
    sign_theta: int = 1
    name: str = "curved-normal"

    @property
    def model(self) -> CurvedNormalModel:
        return CurvedNormalModel(n=self.n, sign_theta=self.sign_theta)

    def simulate(self, rng: np.random.Generator, truth: float) -> CurvedNormalReduction:
        return _curved.simulate_data(rng, truth, self.n)

    def posterior(self, data: CurvedNormalReduction) -> PosteriorContour:
        return curved_normal_posterior_contour(self.model, data)

    def truth_feature(self, truth) -> float:
        return float(truth)

    def contour_at_truth(self, data: CurvedNormalReduction, truth) -> float:
        fh = curved_normal_conditional_density(self.model, data.h)
        return float(fh.contour(np.asarray([v_solution(data, truth)]))[0])


@dataclass(frozen=True)
class ExpEivAdapter:
    lambda1: float = 5.0
    lambda2: float = 5.0
    name: str = "exp-eiv"

    def simulate(self, rng: np.random.Generator, truth) -> tuple[float, float]:
        theta1, theta2 = truth
        return _eiv.simulate_data(rng, theta1, theta2, self.lambda1, self.lambda2)

    def to_model(self, data) -> EivModel:
        y1, y2 = data
        return EivModel(lambda1=self.lambda1, lambda2=self.lambda2, y1=y1, y2=y2)

    def posterior(self, data) -> PosteriorContour:
        return eiv_posterior_contour(self.to_model(data))

    def truth_feature(self, truth) -> float:
        theta1, theta2 = truth
        return float(theta1) / float(theta2)

    def contour_at_truth(self, data, truth) -> float:
        m = median_stat(self.to_model(data), self.truth_feature(truth))
        return float(1.0 - abs(2.0 * m - 1.0))


MODEL_NAMES = ("cauchy", "curved-normal", "exp-eiv")


def make_model(name: str, **params):
    """Construct a model adapter from its CLI name and parameters."""
    if name == "cauchy":
        return CauchyLocationAdapter()
    if name == "curved-normal":
        return CurvedNormalAdapter(n=int(params.get("n", 10)),
                                   sign_theta=int(params.get("sign_theta", 1)))
    if name == "exp-eiv":
        return ExpEivAdapter(lambda1=float(params.get("lambda1", 5.0)),
                             lambda2=float(params.get("lambda2", 5.0)))
    raise ConfigurationError(f"unknown model {name!r}; known: {MODEL_NAMES}")
