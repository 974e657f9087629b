"""Command-line front end.

Every dataset-emitting subcommand writes atomically (temp file + rename),
prints a one-line summary record, and mirrors its CSV as JSON-lines.  Exit
statuses: 0 success, 2 usage errors, 3 numeric/domain failures.

    possim contour --model cauchy --y 0 --grid -20:20:0.05
    possim region --model exp-eiv --lambda1 5 --lambda2 5 --y1 1.40 --y2 0.50 --alpha 0.10
    possim validate --model cauchy --theta 0 --reps 5000 --seed 1
    possim coverage --model curved-normal --n 10 --theta 2 --reps 1000 --level 0.95 --method im
    possim false-confidence --theta1 1 --theta2 0.1 --a-upper 9 --reps 1000
    possim equivalence --model cauchy --y 0 --grid -4:4:0.08 --budget 100000
    possim baseline fiducial --model cauchy --y 0 --grid -20:20:0.5
    possim baseline bayes --y1 1.40 --y2 0.50 --a-upper 9 --budget 1000000
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .association import hypothesis_test, plausibility_region
from .baselines import eiv_flat_bayes_probability, fiducial_contour
from .contours import build_triangular
from .datasets import SCHEMAS, Schema, emit_dataset
from .errors import ArgumentError, PossimError
from .models import (
    cauchy_association,
    cauchy_aux,
    cauchy_contour,
    curved_normal_conditional_density,
    make_model,
    uniform_aux,
)
from .models.curved_normal import CurvedNormalModel, CurvedNormalReduction
from .models.eiv import EivModel
from .randomsets import NestedRandomSetSampler, hitting_curve
from .spaces import Interval, IntervalUnion
from .validity import (
    FlatBayesAssigner,
    ImNecessityAssigner,
    ReplicationPlan,
    coverage_study,
    false_confidence_curves,
    validity_cdf,
)

TEST_SCHEMA = Schema("hypothesis_test",
                     ("model", "a_lower", "a_upper", "alpha", "attained", "decision"),
                     inf_ok=frozenset({"a_lower", "a_upper"}))
BAYES_SCHEMA = Schema("bayes",
                      ("model", "a_lower", "a_upper", "budget", "seed", "probability"),
                      inf_ok=frozenset({"a_lower", "a_upper"}))


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(tok) for tok in text.split(":"))
    except ValueError as exc:
        raise ArgumentError(f"grid must be lo:hi:step, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise ArgumentError(f"bad grid {text!r}")
    return np.arange(lo, hi + step / 2, step)


def _default_seed() -> int:
    return int(os.environ.get("POSSIM_SEED", "0"))


def _add_model_flags(p: argparse.ArgumentParser, models=("cauchy", "curved-normal", "exp-eiv")):
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--y", type=float, help="observed value (cauchy)")
    p.add_argument("--n", type=int, default=10, help="sample size (curved-normal)")
    p.add_argument("--sign", type=int, default=1, choices=(-1, 1),
                   help="known sign of theta (curved-normal)")
    p.add_argument("--y1", type=float, help="first observed statistic")
    p.add_argument("--y2", type=float, help="second observed statistic")
    p.add_argument("--lambda1", type=float, default=5.0, help="rate of U1 (exp-eiv)")
    p.add_argument("--lambda2", type=float, default=5.0, help="rate of U2 (exp-eiv)")


def _require(args, names):
    for n in names:
        if getattr(args, n, None) is None:
            raise ArgumentError(f"--{n.replace('_', '')} is required for model {args.model}")


def _posterior_from_args(args):
    if args.model == "cauchy":
        _require(args, ["y"])
        return make_model("cauchy").posterior(args.y)
    if args.model == "curved-normal":
        _require(args, ["y1", "y2"])
        red = CurvedNormalReduction(y1=args.y1, y2=args.y2, h=args.y1 / args.y2)
        return make_model("curved-normal", n=args.n, sign_theta=args.sign).posterior(red)
    _require(args, ["y1", "y2"])
    return make_model("exp-eiv", lambda1=args.lambda1, lambda2=args.lambda2).posterior(
        (args.y1, args.y2))


def _assertion_from_args(args, domain: Interval) -> IntervalUnion:
    lo = args.a_lower if args.a_lower is not None else -math.inf
    hi = args.a_upper if args.a_upper is not None else math.inf
    return IntervalUnion.of(Interval(max(lo, domain.lo), min(hi, domain.hi)))


def _emit(args, schema, rows, default_name):
    out = args.out if args.out else f"{default_name}.csv"
    paths = emit_dataset(out, schema, rows, fmt=args.format)
    return paths


# --- subcommand handlers ----------------------------------------------------


def _cmd_contour(args) -> int:
    postc = _posterior_from_args(args)
    grid = _parse_grid(args.grid)
    vals = np.asarray(postc.eval(grid), dtype=float)
    rows = [{"theta": float(t), "pi": float(p)} for t, p in zip(grid, vals)]
    paths = _emit(args, SCHEMAS["contour"], rows, "possim-contour")
    print(f"contour model={args.model} rows={len(rows)} out={paths[0]}")
    return 0


def _cmd_region(args) -> int:
    postc = _posterior_from_args(args)
    region = plausibility_region(postc, args.alpha)
    if region.is_empty:
        lo = hi = math.nan  # rejected by the schema; cannot happen for these models
    else:
        lo, hi = region.intervals.parts[0].lo, region.intervals.parts[-1].hi
    rows = [{"model": args.model, "alpha": args.alpha, "lower": lo, "upper": hi}]
    paths = _emit(args, SCHEMAS["region"], rows, "possim-region")
    print(f"region model={args.model} alpha={args.alpha:g} "
          f"lower={lo:.6g} upper={hi:.6g} out={paths[0]}")
    return 0


def _cmd_test(args) -> int:
    postc = _posterior_from_args(args)
    A = _assertion_from_args(args, postc.param_domain)
    decision = hypothesis_test(postc, A, args.alpha)
    verdict = "reject" if decision.reject else "retain"
    if args.out:
        rows = [{"model": args.model, "a_lower": A.parts[0].lo, "a_upper": A.parts[-1].hi,
                 "alpha": args.alpha, "attained": decision.attained, "decision": verdict}]
        emit_dataset(args.out, TEST_SCHEMA, rows, fmt=args.format)
    print(f"test model={args.model} alpha={args.alpha:g} "
          f"attained={decision.attained:.6g} decision={verdict}")
    return 0


def _truth_from_args(args):
    if args.model == "exp-eiv":
        _require(args, ["theta1", "theta2"])
        return (args.theta1, args.theta2)
    _require(args, ["theta"])
    return args.theta


def _plan_from_args(args) -> ReplicationPlan:
    params = {}
    if args.model == "curved-normal":
        params = {"n": args.n, "sign_theta": args.sign}
    elif args.model == "exp-eiv":
        params = {"lambda1": args.lambda1, "lambda2": args.lambda2}
    return ReplicationPlan(model=args.model, truth=_truth_from_args(args),
                           reps=args.reps, master_seed=args.seed, params=params,
                           dkw_delta=args.delta)


def _cmd_validate(args) -> int:
    plan = _plan_from_args(args)
    assertion = None
    if args.statistic != "contour_at_truth":
        domain = Interval(0.0, math.inf) if args.model == "exp-eiv" else Interval(-math.inf, math.inf)
        assertion = _assertion_from_args(args, domain)
    report = validity_cdf(plan, statistic=args.statistic, assertion=assertion,
                          workers=args.workers)
    rows = [{"alpha": float(a), "cdf": float(c), "band": report.band}
            for a, c in zip(report.alpha_grid, report.cdf)]
    paths = _emit(args, SCHEMAS["validity"], rows, "possim-validity")
    print(f"validate model={args.model} statistic={args.statistic} reps={plan.reps} "
          f"seed={plan.master_seed} pass={report.passed} "
          f"max_excess={report.max_excess:.6g} band={report.band:.6g} out={paths[0]}")
    return 0


def _cmd_coverage(args) -> int:
    plan = _plan_from_args(args)
    res = coverage_study(plan, level=args.level, method=args.method,
                         fid_budget=args.fid_budget, workers=args.workers)
    rows = [{"method": res.method, "level": res.level, "coverage": res.coverage,
             "mean_length": res.mean_length, "unbounded_count": res.unbounded_count,
             "mc_se": res.mc_se, "reps": res.reps, "seed": res.seed}]
    paths = _emit(args, SCHEMAS["coverage"], rows, "possim-coverage")
    print(f"coverage model={args.model} method={res.method} level={res.level:g} "
          f"coverage={res.coverage:.4f} mean_length={res.mean_length:.4f} "
          f"unbounded={res.unbounded_count} out={paths[0]}")
    return 0


def _cmd_false_confidence(args) -> int:
    args.model = "exp-eiv"
    plan = _plan_from_args(args)
    assertion = _assertion_from_args(args, Interval(0.0, math.inf))
    assigners = (ImNecessityAssigner(), FlatBayesAssigner(budget=args.bayes_budget))
    table = false_confidence_curves(plan, assertion, assigners, workers=args.workers)
    rows = []
    for name in table.cdfs:
        rows.extend({"alpha": float(a), "assigner": name, "cdf": float(c)}
                    for a, c in zip(table.alpha_grid, table.cdfs[name]))
    paths = _emit(args, SCHEMAS["false_confidence"], rows, "possim-false-confidence")
    print(f"false-confidence reps={plan.reps} seed={plan.master_seed} "
          f"assigners={','.join(table.cdfs)} out={paths[0]}")
    return 0


def _equivalence_ingredients(args):
    if args.model == "cauchy":
        return NestedRandomSetSampler(cauchy_aux()), cauchy_contour().func
    if args.model == "curved-normal":
        _require(args, ["y1", "y2"])
        model = CurvedNormalModel(n=args.n, sign_theta=args.sign)
        fh = curved_normal_conditional_density(model, args.y1 / args.y2)
        return NestedRandomSetSampler(fh.as_aux()), fh.contour
    tri = build_triangular()
    return NestedRandomSetSampler(uniform_aux(), level=tri.func), tri.func


def _cmd_equivalence(args) -> int:
    sampler, contour_fn = _equivalence_ingredients(args)
    grid = _parse_grid(args.grid)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    hit = hitting_curve(sampler, grid, budget=args.budget, rng=rng)
    pi = np.asarray(contour_fn(grid), dtype=float)
    se = np.sqrt(np.clip(pi * (1 - pi), 0.0, None) / args.budget)
    rows = [{"u": float(u), "hitting": float(hv), "contour": float(cv), "mc_se": float(s)}
            for u, hv, cv, s in zip(grid, hit, pi, se)]
    paths = _emit(args, SCHEMAS["equivalence"], rows, "possim-equivalence")
    worst = float(np.max(np.abs(hit - pi)))
    print(f"equivalence model={args.model} budget={args.budget} seed={args.seed} "
          f"max_abs_diff={worst:.6g} out={paths[0]}")
    return 0


def _cmd_baseline_fiducial(args) -> int:
    if args.model != "cauchy":
        raise ArgumentError("fiducial baseline contour is exposed for the cauchy model")
    _require(args, ["y"])
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    contour = fiducial_contour(cauchy_association(), args.y, budget=args.budget, rng=rng)
    grid = _parse_grid(args.grid)
    vals = np.asarray(contour.func(grid), dtype=float)
    rows = [{"theta": float(t), "pi": float(p)} for t, p in zip(grid, vals)]
    paths = _emit(args, SCHEMAS["contour"], rows, "possim-baseline-fiducial")
    print(f"baseline-fiducial model={args.model} budget={args.budget} "
          f"rows={len(rows)} out={paths[0]}")
    return 0


def _cmd_baseline_bayes(args) -> int:
    model = EivModel(lambda1=args.lambda1, lambda2=args.lambda2, y1=args.y1, y2=args.y2)
    A = _assertion_from_args(args, Interval(0.0, math.inf))
    lo, hi = A.parts[0].lo, A.parts[-1].hi
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    prob = eiv_flat_bayes_probability(
        model, lambda phi: (phi >= lo) & (phi <= hi), budget=args.budget, rng=rng)
    if args.out:
        rows = [{"model": "exp-eiv", "a_lower": lo, "a_upper": hi,
                 "budget": args.budget, "seed": args.seed, "probability": prob}]
        emit_dataset(args.out, BAYES_SCHEMA, rows, fmt=args.format)
    print(f"baseline-bayes a=[{lo:g},{hi:g}] budget={args.budget} seed={args.seed} "
          f"probability={prob:.6f}")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="possim",
                                     description="possibilistic inferential models")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_out(p):
        p.add_argument("--out", help="output path (default derived from the subcommand)")
        p.add_argument("--format", choices=("csv", "json-lines"), default="csv")
        p.add_argument("--seed", type=int, default=_default_seed())

    p = sub.add_parser("contour", help="posterior possibility contour on a grid")
    _add_model_flags(p)
    p.add_argument("--grid", required=True, help="lo:hi:step over the parameter")
    common_out(p)
    p.set_defaults(fn=_cmd_contour)

    p = sub.add_parser("region", help="plausibility region at a level alpha")
    _add_model_flags(p)
    p.add_argument("--alpha", type=float, required=True)
    common_out(p)
    p.set_defaults(fn=_cmd_region)

    p = sub.add_parser("test", help="possibilistic hypothesis test of an interval assertion")
    _add_model_flags(p)
    p.add_argument("--a-lower", type=float, default=None)
    p.add_argument("--a-upper", type=float, default=None)
    p.add_argument("--alpha", type=float, required=True)
    common_out(p)
    p.set_defaults(fn=_cmd_test)

    p = sub.add_parser("validate", help="empirical validity curve across replications")
    _add_model_flags(p)
    p.add_argument("--theta", type=float, help="true parameter (cauchy, curved-normal)")
    p.add_argument("--theta1", type=float, help="true theta1 (exp-eiv)")
    p.add_argument("--theta2", type=float, help="true theta2 (exp-eiv)")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--statistic", default="contour_at_truth",
                   choices=("contour_at_truth", "necessity_of_assertion",
                            "possibility_of_assertion"))
    p.add_argument("--a-lower", type=float, default=None)
    p.add_argument("--a-upper", type=float, default=None)
    p.add_argument("--delta", type=float, default=0.01, help="DKW confidence delta")
    p.add_argument("--workers", type=int, default=1)
    common_out(p)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("coverage", help="coverage/length study of regions or intervals")
    _add_model_flags(p)
    p.add_argument("--theta", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--method", choices=("im", "fiducial"), default="im")
    p.add_argument("--fid-budget", type=int, default=10_000)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--workers", type=int, default=1)
    common_out(p)
    p.set_defaults(fn=_cmd_coverage)

    p = sub.add_parser("false-confidence",
                       help="CDFs of belief assignments to an assertion (exp-eiv)")
    p.add_argument("--lambda1", type=float, default=5.0)
    p.add_argument("--lambda2", type=float, default=5.0)
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)
    p.add_argument("--a-lower", type=float, default=None)
    p.add_argument("--a-upper", type=float, default=None)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--bayes-budget", type=int, default=4000)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--workers", type=int, default=1)
    common_out(p)
    p.set_defaults(fn=_cmd_false_confidence, model="exp-eiv", n=10, sign=1)

    p = sub.add_parser("equivalence",
                       help="hitting probabilities of the nested random set vs the contour")
    _add_model_flags(p)
    p.add_argument("--grid", required=True, help="lo:hi:step over the auxiliary variable")
    p.add_argument("--budget", type=int, default=100_000)
    common_out(p)
    p.set_defaults(fn=_cmd_equivalence)

    p = sub.add_parser("baseline", help="comparison methods")
    bsub = p.add_subparsers(dest="baseline", required=True)

    pb = bsub.add_parser("fiducial", help="possibilized fiducial contour")
    _add_model_flags(pb)
    pb.add_argument("--grid", required=True)
    pb.add_argument("--budget", type=int, default=100_000)
    common_out(pb)
    pb.set_defaults(fn=_cmd_baseline_fiducial)

    pb = bsub.add_parser("bayes", help="flat-prior Bayes marginal probability (exp-eiv)")
    pb.add_argument("--lambda1", type=float, default=5.0)
    pb.add_argument("--lambda2", type=float, default=5.0)
    pb.add_argument("--y1", type=float, required=True)
    pb.add_argument("--y2", type=float, required=True)
    pb.add_argument("--a-lower", type=float, default=None)
    pb.add_argument("--a-upper", type=float, default=None)
    pb.add_argument("--budget", type=int, default=1_000_000)
    common_out(pb)
    pb.set_defaults(fn=_cmd_baseline_bayes)

    return parser


def _merge_grid_values(argv: list[str]) -> list[str]:
    """Join '--grid lo:hi:step' into '--grid=...' so grids starting with a
    negative number are not mistaken for option flags."""
    out = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--grid" and i + 1 < len(argv):
            out.append(f"--grid={argv[i + 1]}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_grid_values(list(argv)))
    try:
        return args.fn(args)
    except PossimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
