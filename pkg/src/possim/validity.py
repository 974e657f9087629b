"""Monte Carlo harness: empirical validity curves, coverage studies, and
false-confidence comparisons.

Reproducibility contract: replicate r of a plan with master seed s uses the
generator seeded by SeedSequence(s, spawn_key=(r,)), so results are
bit-identical for a given (plan, seed) regardless of how replicates are
chunked across workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .association import (
    plausibility_region,
    posterior_necessity,
    posterior_possibility,
)
from .baselines import curved_normal_fiducial_interval, eiv_flat_bayes_probability
from .contours import dkw_band
from .errors import ArgumentError, ConfigurationError
from .models import make_model
from .spaces import Interval, IntervalUnion, as_interval_union

STATISTICS = ("contour_at_truth", "necessity_of_assertion", "possibility_of_assertion")


@dataclass(frozen=True)
class ReplicationPlan:
    model: str
    truth: object                      # scalar theta, or (theta1, theta2) for exp-eiv
    reps: int
    master_seed: int
    params: dict = field(default_factory=dict)
    alpha_grid: tuple = tuple(np.linspace(0.0, 1.0, 1001))
    dkw_delta: float = 0.01

    def __post_init__(self):
        if self.reps < 1:
            raise ArgumentError("replication count must be >= 1")
        grid = np.asarray(self.alpha_grid, dtype=float)
        if np.any(np.diff(grid) < 0) or grid.min() < 0 or grid.max() > 1:
            raise ArgumentError("alpha grid must be sorted within [0,1]")


@dataclass(frozen=True)
class ValidityReport:
    alpha_grid: np.ndarray
    cdf: np.ndarray
    band: float
    dkw_delta: float
    passed: bool
    raw: np.ndarray
    statistic: str
    direction: str = "below"  # which side of the diagonal validity requires

    @property
    def max_excess(self) -> float:
        """Worst violation of the validity direction (negative = margin)."""
        if self.direction == "below":
            return float(np.max(self.cdf - self.alpha_grid))
        return float(np.max(self.alpha_grid - self.cdf))


@dataclass(frozen=True)
class CoverageResult:
    method: str
    level: float
    coverage: float
    mean_length: float
    unbounded_count: int
    mc_se: float
    reps: int
    seed: int


@dataclass(frozen=True)
class FalseConfidenceTable:
    alpha_grid: np.ndarray
    cdfs: dict  # assigner name -> CDF values on the grid
    raw: dict   # assigner name -> per-replicate values


def replicate_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def _chunks(reps: int, workers: int):
    size = max(1, math.ceil(reps / (workers * 4)))
    return [(a, min(a + size, reps)) for a in range(0, reps, size)]


def _map_replicates(worker: Callable, payload: tuple, reps: int, workers: int) -> list:
    if workers <= 1:
        return worker(payload, 0, reps)
    out: list = []
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futures = [ex.submit(worker, payload, a, b) for a, b in _chunks(reps, workers)]
        for f in futures:  # submission order == replicate order
            out.extend(f.result())
    return out


def _ecdf_on_grid(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    return np.searchsorted(np.sort(values), grid, side="right") / values.size


# --- validity curves -------------------------------------------------------


def _validity_worker(payload, start, stop):
    plan, statistic, assertion = payload
    adapter = make_model(plan.model, **plan.params)
    assertion = as_interval_union(assertion) if assertion is not None else None
    out = []
    for r in range(start, stop):
        rng = replicate_rng(plan.master_seed, r)
        data = adapter.simulate(rng, plan.truth)
        if statistic == "contour_at_truth":
            out.append(adapter.contour_at_truth(data, plan.truth))
        else:
            postc = adapter.posterior(data)
            if statistic == "necessity_of_assertion":
                out.append(posterior_necessity(postc, assertion))
            else:
                out.append(posterior_possibility(postc, assertion))
    return out


def validity_cdf(
    plan: ReplicationPlan,
    statistic: str = "contour_at_truth",
    assertion=None,
    workers: int = 1,
) -> ValidityReport:
    """Empirical CDF of a validity statistic across replications.

    The validity direction depends on the statistic: possibility of a true
    assertion (and the contour at the truth) is stochastically no smaller
    than Unif(0,1), so its CDF must stay on or below the diagonal; necessity
    of a false assertion is stochastically no larger, so its CDF must stay
    on or above.  The DKW band at the plan's delta absorbs simulation noise.
    """
    if statistic not in STATISTICS:
        raise ConfigurationError(f"unknown statistic {statistic!r}; known: {STATISTICS}")
    if statistic != "contour_at_truth" and assertion is None:
        raise ConfigurationError(f"statistic {statistic} requires an assertion")
    assertion_t = None
    if assertion is not None:
        A = as_interval_union(assertion)
        assertion_t = tuple((p.lo, p.hi) for p in A.parts)
    values = np.asarray(
        _map_replicates(_validity_worker, (plan, statistic, assertion_t), plan.reps, workers),
        dtype=float,
    )
    grid = np.asarray(plan.alpha_grid, dtype=float)
    cdf = _ecdf_on_grid(values, grid)
    band = dkw_band(plan.reps, plan.dkw_delta)
    direction = "above" if statistic == "necessity_of_assertion" else "below"
    if direction == "below":
        passed = bool(np.all(cdf <= grid + band))
    else:
        passed = bool(np.all(cdf >= grid - band))
    return ValidityReport(alpha_grid=grid, cdf=cdf, band=band,
                          dkw_delta=plan.dkw_delta, passed=passed,
                          raw=values, statistic=statistic, direction=direction)


# --- coverage study --------------------------------------------------------


def _coverage_worker(payload, start, stop):
    plan, level, method, fid_budget = payload
    adapter = make_model(plan.model, **plan.params)
    alpha = 1.0 - level
    out = []
    for r in range(start, stop):
        rng = replicate_rng(plan.master_seed, r)
        data = adapter.simulate(rng, plan.truth)
        target = adapter.truth_feature(plan.truth)
        if method == "im":
            region = plausibility_region(adapter.posterior(data), alpha)
            covered = region.contains(target)
            length = region.length()
        elif method == "fiducial":
            if plan.model != "curved-normal":
                raise ConfigurationError("fiducial intervals are defined for curved-normal")
            iv = curved_normal_fiducial_interval(adapter.model, data, level,
                                                 budget=fid_budget, rng=rng)
            covered = iv.lo < target < iv.hi
            length = iv.hi - iv.lo if iv.is_bounded else math.inf
        else:
            raise ConfigurationError(f"unknown method {method!r}")
        out.append((bool(covered), float(length)))
    return out


def coverage_study(
    plan: ReplicationPlan,
    level: float,
    method: str = "im",
    fid_budget: int = 10_000,
    workers: int = 1,
) -> CoverageResult:
    """Region coverage and mean length over replications.

    Unbounded regions are excluded from the mean length and counted
    separately; the binomial standard error accompanies the coverage.
    """
    if not 0.0 < level < 1.0:
        raise ArgumentError(f"level must be in (0,1), got {level}")
    rows = _map_replicates(_coverage_worker, (plan, level, method, fid_budget),
                           plan.reps, workers)
    covered = np.array([c for c, _ in rows], dtype=bool)
    lengths = np.array([l for _, l in rows], dtype=float)
    bounded = np.isfinite(lengths)
    p = float(np.mean(covered))
    mc_se = math.sqrt(p * (1.0 - p) / plan.reps)
    return CoverageResult(
        method=method,
        level=level,
        coverage=p,
        mean_length=float(np.mean(lengths[bounded])) if np.any(bounded) else math.inf,
        unbounded_count=int(np.count_nonzero(~bounded)),
        mc_se=mc_se,
        reps=plan.reps,
        seed=plan.master_seed,
    )


# --- false-confidence comparison ------------------------------------------


@dataclass(frozen=True)
class ImNecessityAssigner:
    """Posterior necessity of the assertion: the IM side of the comparison."""

    name: str = "im-necessity"

    def __call__(self, rng, adapter, data, assertion) -> float:
        return posterior_necessity(adapter.posterior(data), assertion)


@dataclass(frozen=True)
class FlatBayesAssigner:
    """Flat-prior Bayes posterior probability of the assertion (exp-eiv)."""

    budget: int = 4000
    name: str = "flat-bayes"

    def __call__(self, rng, adapter, data, assertion) -> float:
        A = as_interval_union(assertion)

        def pred(phi):
            phi = np.asarray(phi, dtype=float)
            out = np.zeros(phi.shape, dtype=bool)
            for part in A.parts:
                out |= (phi >= part.lo) & (phi <= part.hi)
            return out

        return eiv_flat_bayes_probability(adapter.to_model(data), pred,
                                          budget=self.budget, rng=rng)


@dataclass(frozen=True)
class ConstantAssigner:
    value: float
    name: str = "constant"

    def __call__(self, rng, adapter, data, assertion) -> float:
        return self.value


def _false_confidence_worker(payload, start, stop):
    plan, assertion_t, assigners = payload
    adapter = make_model(plan.model, **plan.params)
    assertion = IntervalUnion.of(*[Interval(a, b) for a, b in assertion_t])
    out = []
    for r in range(start, stop):
        rng = replicate_rng(plan.master_seed, r)
        data = adapter.simulate(rng, plan.truth)
        out.append(tuple(a(rng, adapter, data, assertion) for a in assigners))
    return out


def false_confidence_curves(
    plan: ReplicationPlan,
    assertion,
    assigners: Sequence,
    workers: int = 1,
) -> FalseConfidenceTable:
    """One simulation pass; every assigner is evaluated on each replicate and
    its empirical CDF reported on the plan's alpha grid."""
    A = as_interval_union(assertion)
    assertion_t = tuple((p.lo, p.hi) for p in A.parts)
    rows = _map_replicates(_false_confidence_worker,
                           (plan, assertion_t, tuple(assigners)),
                           plan.reps, workers)
    grid = np.asarray(plan.alpha_grid, dtype=float)
    raw = {}
    cdfs = {}
    for j, a in enumerate(assigners):
        vals = np.array([row[j] for row in rows], dtype=float)
        raw[a.name] = vals
        cdfs[a.name] = _ecdf_on_grid(vals, grid)
    return FalseConfidenceTable(alpha_grid=grid, cdfs=cdfs, raw=raw)
