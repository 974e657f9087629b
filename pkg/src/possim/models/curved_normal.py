"""Curved normal model: n i.i.d. observations from N(theta, theta^2).

The sample reduces to (mean y1, sd y2). With sign(theta) assumed known, the
statistic h = y1/y2 is an observed feature of the auxiliary pair
(U1, U2) ~ (N(0,1/n), sqrt(Chisq(n-1)/(n-1))), so inference conditions on it:
the scalar auxiliary V = U1/U2 given eta(U) = h has a known density f_h, and
the posterior contour evaluates the f_h-ranked contour at v = (y1-theta)/y2.

The conditional density is tabulated on a 4096-point grid after the
substitution v = h - sign * e^s, which maps the support onto the real s-line
and resolves the essential singularity at v = h.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from ..association import Association, PosteriorContour
from ..contours import AuxiliaryDistribution
from ..errors import ArgumentError, DegenerateDataError, NumericError
from ..spaces import Interval

GRID_SIZE = 4096
_LOG_TAIL_DROP = 45.0  # tabulation extends until log-integrand falls this far
_MAX_S = 700.0         # expansion cap; beyond this the integral is divergent


@dataclass(frozen=True)
class CurvedNormalModel:
    n: int
    sign_theta: int = 1

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ArgumentError(f"sample size must be an integer >= 2, got {self.n}")
        if self.sign_theta not in (-1, 1):
            raise ArgumentError("sign_theta must be -1 or +1")


@dataclass(frozen=True)
class CurvedNormalReduction:
    y1: float
    y2: float
    h: float

    def __post_init__(self):
        if self.y2 <= 0:
            raise DegenerateDataError("sample standard deviation must be positive")
        if abs(self.h - self.y1 / self.y2) > 1e-12 * max(1.0, abs(self.h)):
            raise ArgumentError("h must equal y1/y2")


def curved_normal_reduce(sample) -> CurvedNormalReduction:
    """Minimal sufficient reduction: mean, sd (divisor n-1), and their ratio."""
    x = np.asarray(sample, dtype=float)
    if x.size < 2:
        raise ArgumentError("need at least two observations")
    y1 = float(np.mean(x))
    y2 = float(np.std(x, ddof=1))
    if y2 <= 0.0:
        raise DegenerateDataError("constant sample: zero standard deviation")
    return CurvedNormalReduction(y1=y1, y2=y2, h=y1 / y2)


class ConditionalVDensity:
    """The conditional density f_h of V = U1/U2 given eta(U) = h.

    Exposes density/cdf/ppf/sampler plus the ranked contour
    pi_h(v) = P{f_h(V) < f_h(v)} and its level inversion, all backed by one
    normalized tabulation.  Support is {v : sign/(h - v) > 0}.
    """

    def __init__(self, n: int, h: float, sign: int = 1):
        if sign not in (-1, 1):
            raise ArgumentError("sign must be -1 or +1")
        self.n = int(n)
        self.h = float(h)
        self.sign = int(sign)
        self._build()

    # log f_h up to the normalizing constant, in s-coordinates (v = h - sign e^s)
    def _log_unnorm_s(self, s):
        n, h, sign = self.n, self.h, self.sign
        e = np.exp(-np.asarray(s, dtype=float))
        ratio = sign * h * e - 1.0
        return -(n / 2.0) * ratio**2 - ((n - 1) / 2.0) * e**2 - (n - 1) * np.asarray(s)

    def log_density(self, v):
        """Normalized log f_h(v); -inf off the support."""
        v = np.asarray(v, dtype=float)
        w = self.sign * (self.h - v)
        out = np.full(v.shape, -np.inf)
        ok = w > 0
        if np.any(ok):
            s = np.log(w[ok])
            out[ok] = self._log_unnorm_s(s) - self._log_z
        return out

    def _build(self):
        s_lo, s_hi = -3.0, 8.0
        converged = False
        while not converged:
            probe = np.linspace(s_lo, s_hi, 257)
            li = self._log_unnorm_s(probe) + probe  # + jacobian
            m = float(np.max(li))
            if not math.isfinite(m):
                raise NumericError("conditional density is not finite")
            converged = True
            if li[0] > m - _LOG_TAIL_DROP:
                s_lo -= 1.5
                converged = False
            if li[-1] > m - _LOG_TAIL_DROP:
                s_hi += 3.0
                converged = False
            if s_hi > _MAX_S or s_lo < -_MAX_S:
                raise NumericError(
                    "normalization integral is non-finite for this sample size"
                )
        s = np.linspace(s_lo, s_hi, GRID_SIZE)
        log_int = self._log_unnorm_s(s) + s
        peak = float(np.max(log_int))
        # adaptive quadrature for the normalizing constant, rel. tol 1e-10
        val, _err = integrate.quad(
            lambda t: math.exp(float(self._log_unnorm_s(t)) + t - peak),
            s_lo, s_hi, epsabs=0.0, epsrel=1e-10, limit=300,
        )
        if not math.isfinite(val) or val <= 0:
            raise NumericError("normalization integral is non-finite")
        self._log_z = peak + math.log(val)

        integrand = np.exp(log_int - self._log_z)
        ds = s[1] - s[0]
        cell = ds * 0.5 * (integrand[1:] + integrand[:-1])
        cdf_s = np.concatenate([[0.0], np.cumsum(cell)])
        self._trapz_total = float(cdf_s[-1])
        cdf_s /= cdf_s[-1]

        v = self.h - self.sign * np.exp(s)
        if self.sign > 0:
            # v decreases in s; store ascending in v
            self._v = v[::-1]
            self._cdf = 1.0 - cdf_s[::-1]
            self._logf = (self._log_unnorm_s(s) - self._log_z)[::-1]
            self._cell = cell[::-1]
        else:
            self._v = v
            self._cdf = cdf_s
            self._logf = self._log_unnorm_s(s) - self._log_z
            self._cell = cell

        # mass strictly below each density level (general-shape fallback)
        rep = 0.5 * (self._logf[1:] + self._logf[:-1])
        order = np.argsort(rep)
        self._level_sorted = rep[order]
        self._mass_below = np.concatenate([[0.0], np.cumsum(self._cell[order])])
        total = self._mass_below[-1]
        self._mass_below /= total

        i_mode = int(np.argmax(self._logf))
        a = self._v[max(i_mode - 1, 0)]
        b = self._v[min(i_mode + 1, GRID_SIZE - 1)]
        res = optimize.minimize_scalar(
            lambda x: -float(self.log_density(np.asarray([x]))[0]),
            bounds=(min(a, b), max(a, b)), method="bounded",
            options={"xatol": 1e-12},
        )
        self.mode = float(res.x)
        diffs = np.diff(self._logf)
        self.unimodal = bool(np.all(diffs[:i_mode] >= -1e-12) and
                             np.all(diffs[i_mode:] <= 1e-12)) if 0 < i_mode < GRID_SIZE - 1 else False
        if self.unimodal:
            node_pi = self._unimodal_node_contour(i_mode)
            # pin the polished mode into the table so the contour attains 1
            j = int(np.searchsorted(self._v, self.mode))
            self._pi_v = np.insert(self._v, j, self.mode)
            self._pi_nodes = np.insert(node_pi, j, 1.0)

    def _unimodal_node_contour(self, i_mode: int) -> np.ndarray:
        """pi at every grid node: tail mass outside the matching level pair.

        For node v on the left branch, the same-density point b on the right
        branch is found by monotone interpolation of log f; then
        pi = F(v) + 1 - F(b).  Node-exact to second order in the grid step
        away from the peak; the peak-adjacent nodes (where the level map is
        quadratic and interpolation degrades) get exact crossings by
        root-finding on the closed-form log-density.
        """
        lf, v, F = self._logf, self._v, self._cdf
        lf_left, v_left, F_left = lf[: i_mode + 1], v[: i_mode + 1], F[: i_mode + 1]
        lf_right, v_right, F_right = lf[i_mode:], v[i_mode:], F[i_mode:]
        # right branch has lf descending in v: reverse for ascending interp
        F_at_right_match = np.interp(lf_left, lf_right[::-1], F_right[::-1])
        pi_left = F_left + 1.0 - F_at_right_match
        F_at_left_match = np.interp(lf_right, lf_left, F_left)
        pi_right = F_at_left_match + 1.0 - F_right
        pi = np.concatenate([pi_left[:-1], pi_right])

        lf_mode = float(self.log_density(np.asarray([self.mode]))[0])
        for j in range(max(0, i_mode - 8), min(GRID_SIZE, i_mode + 9)):
            if lf[j] >= lf_mode:
                pi[j] = 1.0
                continue
            other = self._exact_crossing(lf[j], from_left=(v[j] >= self.mode))
            a, b = (v[j], other) if v[j] <= other else (other, v[j])
            pi[j] = np.interp(a, v, F) + 1.0 - np.interp(b, v, F)
        return np.clip(pi, 0.0, 1.0)

    def _exact_crossing(self, level: float, from_left: bool) -> float:
        """The point on the given side of the mode where log f equals level."""
        def g(x):
            return float(self.log_density(np.asarray([x]))[0]) - level

        sup = self.support
        edge_pad = 1e-12 * max(1.0, abs(self.h))
        floor = sup.lo + edge_pad if math.isfinite(sup.lo) else -math.inf
        ceil = sup.hi - edge_pad if math.isfinite(sup.hi) else math.inf
        step = 1e-6 * max(1.0, abs(self.mode))
        lo, hi = (None, None)
        if from_left:
            hi = self.mode
            for _ in range(200):
                x = max(self.mode - step, floor)
                if g(x) <= 0:
                    lo = x
                    break
                step *= 2.0
        else:
            lo = self.mode
            for _ in range(200):
                x = min(self.mode + step, ceil)
                if g(x) <= 0:
                    hi = x
                    break
                step *= 2.0
        if lo is None or hi is None:
            raise NumericError("could not bracket a density level crossing")
        return float(optimize.brentq(g, lo, hi, xtol=1e-14))

    @property
    def support(self) -> Interval:
        return Interval(-math.inf, self.h) if self.sign > 0 else Interval(self.h, math.inf)

    @property
    def normalization_defect(self) -> float:
        """|trapezoid mass - 1| of the quad-normalized density."""
        return abs(self._trapz_total - 1.0)

    def density(self, v):
        return np.exp(self.log_density(v))

    def cdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.interp(v, self._v, self._cdf, left=0.0 if self.sign > 0 else 0.0,
                         right=1.0)

    def ppf(self, q):
        q = np.asarray(q, dtype=float)
        return np.interp(q, self._cdf, self._v)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.ppf(rng.uniform(size=size))

    def contour(self, v):
        """pi_h(v) = P{f_h(V) < f_h(v)}.

        Unimodal instances interpolate the node-exact level-pair values;
        otherwise the sub-level-set mass decomposition on the grid applies.
        """
        v = np.asarray(v, dtype=float)
        if self.unimodal:
            return np.interp(v, self._pi_v, self._pi_nodes, left=0.0, right=0.0)
        lf = self.log_density(v)
        idx = np.searchsorted(self._level_sorted, lf, side="left")
        return self._mass_below[idx]

    def as_aux(self) -> AuxiliaryDistribution:
        return AuxiliaryDistribution(
            support=self.support,
            density=self.density,
            cdf=self.cdf,
            sampler=self.sample,
            mode=self.mode,
            name=f"curved-normal-conditional(n={self.n}, h={self.h:g})",
        )


@lru_cache(maxsize=128)
def _cached_density(n: int, h: float, sign: int) -> ConditionalVDensity:
    return ConditionalVDensity(n, h, sign)


def curved_normal_conditional_density(model: CurvedNormalModel, h: float) -> ConditionalVDensity:
    return _cached_density(model.n, float(h), model.sign_theta)


def v_solution(reduction: CurvedNormalReduction, theta):
    """v_{y,theta} = (y1 - theta)/y2."""
    return (reduction.y1 - np.asarray(theta, dtype=float)) / reduction.y2


def eta_observed(model: CurvedNormalModel, reduction: CurvedNormalReduction, theta):
    """eta evaluated at the auxiliary solution u_{y,theta}; equals h for every
    theta with the assumed sign."""
    theta = np.asarray(theta, dtype=float)
    u1 = (reduction.y1 - theta) / np.abs(theta)
    u2 = reduction.y2 / np.abs(theta)
    return (model.sign_theta + u1) / u2


def curved_normal_association(model: CurvedNormalModel, reduction: CurvedNormalReduction) -> Association:
    fh = curved_normal_conditional_density(model, reduction.h)
    y2 = reduction.y2

    def simulate(theta, v):
        y1 = float(theta + y2 * np.asarray(v, dtype=float))
        return CurvedNormalReduction(y1=y1, y2=y2, h=y1 / y2)

    return Association(
        aux=fh.as_aux(),
        param_domain=Interval(0.0, math.inf) if model.sign_theta > 0 else Interval(-math.inf, 0.0),
        solve_u=lambda y, theta: v_solution(y, theta),
        solve_theta=lambda y, v: y.y1 - y.y2 * np.asarray(v, dtype=float),
        simulate=simulate,
    )


def curved_normal_posterior_contour(
    model: CurvedNormalModel, reduction: CurvedNormalReduction
) -> PosteriorContour:
    """Conditional-IM posterior contour: theta -> pi_h((y1 - theta)/y2)."""
    fh = curved_normal_conditional_density(model, reduction.h)
    y1, y2 = reduction.y1, reduction.y2

    def eval_fn(theta):
        theta = np.asarray(theta, dtype=float)
        return fh.contour((y1 - theta) / y2)

    theta_mode = y1 - y2 * fh.mode
    return PosteriorContour(
        y=reduction,
        eval=eval_fn,
        base=None,
        assoc=curved_normal_association(model, reduction),
        param_domain=Interval(0.0, math.inf) if model.sign_theta > 0 else Interval(-math.inf, 0.0),
        mode_hint=theta_mode,
        shape_hint="unimodal" if fh.unimodal else "general",
        tail_limits=(0.0, 0.0),
    )


def simulate_data(rng: np.random.Generator, theta: float, n: int) -> CurvedNormalReduction:
    sample = rng.normal(theta, abs(theta), n)
    return curved_normal_reduce(sample)
