"""Command-line frontend.

Subcommands: ``design`` (required instance count), ``power`` (power of a
fixed-size experiment, single value or curve with highlights), ``reps``
(adaptive sampling of one instance), ``run`` (full experiment) and
``resume`` (continue an interrupted run from its checkpoint journal).

Exit codes: 0 completed, 2 usage or configuration error, 3 runner
failure, 4 statistical-assumption violation.  The statistical outcome of
a test never affects the exit code.

Environment: ``PAIRCOMP_WORKERS`` overrides the default worker count and
``PAIRCOMP_SEED`` the master seed; explicit flags beat both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import ALT_NAMES, TEST_NAMES, ExperimentConfig, load_config
from .design import (ComparisonDesign, calc_instances, calc_power,
                     curve_highlights, power_curve)
from .errors import (AssumptionViolationError, ConfigError,
                     ExperimentAbortedError, PaircompError, RunnerError)
from .experiment import run_experiment
from .reporting import (fmt, render_size_result, render_summary,
                        write_power_curve, write_qq_points, write_report_json,
                        write_results_table, write_values)
from .runners import make_runner
from .sampler import calc_nreps
from .seeding import INSTANCE_STREAM, derive_seed

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNNER = 3
EXIT_ASSUMPTION = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paircomp",
        description="Design and run statistically sound comparisons of two "
                    "stochastic algorithms on a problem class.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="required number of instances for a design")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--power", type=float, required=True)
    p.add_argument("--d", type=float, help="standardized minimally relevant effect size")
    p.add_argument("--delta", type=float, help="raw effect size (needs --sigma-bound)")
    p.add_argument("--sigma-bound", type=float,
                   help="upper bound for the total SD of the paired differences")
    p.add_argument("--alternative", choices=sorted(ALT_NAMES), default="two-sided")
    p.add_argument("--test", choices=sorted(TEST_NAMES), default="t")
    p.add_argument("--out", type=Path, help="write a JSON record here")

    p = sub.add_parser("power", help="power of a fixed-size experiment")
    p.add_argument("--n", type=int, required=True, help="number of instances")
    p.add_argument("--d", type=float, help="single effect size")
    p.add_argument("--d-range", help="curve range as LO:HI")
    p.add_argument("--points", type=int, default=300, help="curve points")
    p.add_argument("--highlights", help="comma-separated power levels to invert")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alternative", choices=sorted(ALT_NAMES), default="two-sided")
    p.add_argument("--test", choices=sorted(TEST_NAMES), default="t",
                   help="test family (power is always computed on the "
                        "paired-t basis)")
    p.add_argument("--curve-out", type=Path, help="write curve records here")
    p.add_argument("--out", type=Path, help="write a JSON record here")

    p = sub.add_parser("reps", help="adaptively sample both algorithms on one instance")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--instance", required=True, help="instance id from the pool")
    p.add_argument("--seed", type=int, help="override the derived instance seed")

    for name, extra in (("run", "run a full experiment"),
                        ("resume", "resume an interrupted experiment")):
        p = sub.add_parser(name, help=extra)
        p.add_argument("--config", type=Path, required=True)
        p.add_argument("--output-dir", type=Path, help="override the config's output_dir")
        p.add_argument("--workers", type=int, help="worker pool size")
        p.add_argument("--seed", type=int, help="override the master seed")
    return parser


def _cmd_design(args) -> int:
    kwargs = dict(alpha=args.alpha, power_target=args.power,
                  alternative=ALT_NAMES[args.alternative],
                  test_family=TEST_NAMES[args.test])
    if args.d is not None and args.delta is not None:
        raise ConfigError("give either --d or --delta, not both")
    if args.d is not None:
        design = ComparisonDesign(mres_d=args.d, **kwargs)
    elif args.delta is not None:
        if args.sigma_bound is None:
            raise ConfigError("--delta requires --sigma-bound")
        design = ComparisonDesign.from_delta(args.delta, args.sigma_bound, **kwargs)
    else:
        raise ConfigError("an effect size is required: --d, or --delta with "
                          "--sigma-bound")
    result = calc_instances(design)
    print(render_size_result(result))
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps({
            "n_instances": result.n_instances,
            "achieved_power": result.achieved_power,
            "test_family": result.test_family.value,
            "ncp_at_n": result.ncp_at_n,
        }, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_power(args) -> int:
    alternative = ALT_NAMES[args.alternative]
    if (args.d is None) == (args.d_range is None):
        raise ConfigError("give exactly one of --d or --d-range")
    if args.d is not None:
        design = ComparisonDesign(alpha=args.alpha, power_target=0.5,
                                  mres_d=args.d, alternative=alternative)
        power = calc_power(args.n, args.d, design)
        print(f"power: {power:.7g}")
        if args.out:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            args.out.write_text(json.dumps(
                {"n": args.n, "d": args.d, "power": power}, sort_keys=True) + "\n")
        return EXIT_OK

    try:
        lo_s, hi_s = args.d_range.split(":", 1)
        d_range = (float(lo_s), float(hi_s))
    except ValueError:
        raise ConfigError(f"--d-range must look like LO:HI, got {args.d_range!r}") from None
    curve = power_curve(args.n, args.alpha, alternative, d_range, args.points)
    print(f"curve points: {len(curve)}")
    if args.curve_out:
        write_power_curve(args.curve_out, curve)
        print(f"curve records written to {args.curve_out}")
    else:
        for d, p in curve:
            print(f"{d!r},{p!r}")
    if args.highlights:
        try:
            levels = [float(tok) for tok in args.highlights.split(",") if tok]
        except ValueError:
            raise ConfigError(f"--highlights must be comma-separated numbers, "
                              f"got {args.highlights!r}") from None
        for level, d in curve_highlights(curve, levels):
            if d is None:
                print(f"power {fmt(level)} not reached on this range")
            else:
                print(f"power {fmt(level)} reached at d = {fmt(d)}")
    return EXIT_OK


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    plan = cfg.plan
    workers = getattr(args, "workers", None)
    if workers is None and os.environ.get("PAIRCOMP_WORKERS"):
        workers = int(os.environ["PAIRCOMP_WORKERS"])
    seed = getattr(args, "seed", None)
    if seed is None and os.environ.get("PAIRCOMP_SEED"):
        seed = int(os.environ["PAIRCOMP_SEED"])
    if workers is not None:
        plan = replace(plan, workers=workers)
    if seed is not None:
        plan = replace(plan, master_seed=seed)
    out = getattr(args, "output_dir", None) or cfg.output_dir
    return ExperimentConfig(plan=plan, output_dir=out, source=cfg.source)


def _cmd_reps(args) -> int:
    cfg = load_config(args.config)
    plan = cfg.plan
    index = next((i for i, inst in enumerate(plan.instance_pool)
                  if inst.id == args.instance), None)
    if index is None:
        raise ConfigError(f"instance {args.instance!r} is not in the pool "
                          f"({len(plan.instance_pool)} instance(s))")
    instance = plan.instance_pool[index]
    seed = args.seed if args.seed is not None else derive_seed(
        plan.master_seed, INSTANCE_STREAM, index)
    runner1, runner2 = (make_runner(s) for s in plan.algorithms)
    outcome = calc_nreps(runner1, runner2, instance, plan.sampling, seed)
    d = outcome.diff
    print(f"instance: {d.instance_id}")
    print(f"n1: {d.n1}")
    print(f"n2: {d.n2}")
    print(f"phi: {fmt(d.phi_hat)}")
    print(f"se: {fmt(d.se_hat)}")
    print(f"se method: {d.se_method.value}")
    print(f"budget exhausted: {str(d.budget_exhausted).lower()}")
    for event in outcome.events:
        print(f"note: {event}")
    return EXIT_OK


def _cmd_run(args, resume: bool) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    plan = cfg.plan
    out_dir = cfg.output_dir
    if out_dir is None:
        raise ConfigError("an output directory is required: set 'output_dir' in "
                          "the config or pass --output-dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / "checkpoint.jsonl"
    if resume and not checkpoint.exists():
        raise ConfigError(f"nothing to resume: {checkpoint} does not exist")

    report, diagnostics = run_experiment(plan, checkpoint_path=checkpoint,
                                         resume=resume)

    size_result = calc_instances(plan.design)
    write_results_table(out_dir / "results.csv", report.per_instance)
    write_report_json(out_dir / "report.json", report)
    write_qq_points(out_dir / "qq.csv", diagnostics.qq_points)
    write_values(out_dir / "boot_sdm.csv", diagnostics.boot_sdm, "mean")
    write_qq_points(out_dir / "boot_sdm_qq.csv", diagnostics.boot_sdm_qq)
    summary = render_summary(report, size_result, len(plan.instance_pool))
    (out_dir / "summary.txt").write_text(summary)
    print(summary, end="")
    print(f"results table: {out_dir / 'results.csv'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "design":
            return _cmd_design(args)
        if args.command == "power":
            return _cmd_power(args)
        if args.command == "reps":
            return _cmd_reps(args)
        if args.command == "run":
            return _cmd_run(args, resume=False)
        if args.command == "resume":
            return _cmd_run(args, resume=True)
        parser.error(f"unknown command {args.command!r}")
    except ExperimentAbortedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.cause
        if isinstance(cause, AssumptionViolationError):
            return EXIT_ASSUMPTION
        if isinstance(cause, RunnerError):
            return EXIT_RUNNER
        return EXIT_USAGE if isinstance(cause, (ConfigError, ValueError)) else EXIT_RUNNER
    except AssumptionViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except RunnerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNNER
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PaircompError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNNER


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
