"""Command-line interface: ``python -m src <command> ...``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path

from .boosting import (
    BoostConfig,
    BoostTrajectory,
    run_boost,
    write_trajectory_csv,
    write_wide_csv,
)
from .config import get_settings
from .errors import ConstructionError, InputError
from .simulation import load_scenarios, run_scenario, write_records_csv, write_table_csv
from .smoothers import (
    KERNEL_FAMILIES,
    DesignSample,
    LinearSmoother,
    SmootherSpec,
    build_smoother,
    read_sample_csv,
    write_fitted_csv,
)
from .smoothers.core import SMOOTHER_KINDS
from .spectral import analyze
from .stopping import StoppingRule, rescore_trajectory_csv, select, write_scores_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSTRUCTION = 3

RULE_CHOICES = ("aic", "aic-literal", "aicc", "gcv", "cv", "loocv", "split")


def _sidecar(out: Path, suffix: str, extension: str) -> Path:
    return out.with_name(f"{out.stem}_{suffix}{extension}")


def _smoother_spec(args: argparse.Namespace) -> SmootherSpec:
    if args.smoother == "kernel":
        return SmootherSpec.for_kernel(args.kernel, args.bandwidth)
    if args.smoother == "knn":
        return SmootherSpec.for_knn(args.neighbors)
    if args.smoother == "spline":
        return SmootherSpec.for_spline(args.lam)
    return SmootherSpec.for_bin(args.bins)


def _boost_config(args: argparse.Namespace) -> BoostConfig:
    return BoostConfig(max_iterations=args.max_iter, mu=args.mu, variant=args.variant)


def _stopping_rule(args: argparse.Namespace, n: int) -> StoppingRule:
    rule = args.rule
    if rule == "aic-literal":
        return StoppingRule.aic_literal()
    if rule == "loocv":
        return StoppingRule.loocv()
    if rule == "cv":
        if args.folds < 2:
            raise InputError(f"--folds must be >= 2, got {args.folds}")
        return StoppingRule.cv(fold_size=math.ceil(n / args.folds), seed=args.seed)
    if rule == "split":
        return StoppingRule.data_split(args.split_fraction, seed=args.seed)
    return StoppingRule(rule)


def _jobs(args: argparse.Namespace) -> int:
    return get_settings().jobs if args.jobs is None else args.jobs


def _warn_divergence(k: int, ratio: float) -> None:
    print(f"warning: diverged k={k} residual_ratio={ratio:.6g}", file=sys.stderr)


def _write_json(path: Path, payload: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(payload + "\n", encoding="utf-8")


def cmd_fit(args: argparse.Namespace) -> int:
    sample = read_sample_csv(args.data)
    smoother = build_smoother(sample, _smoother_spec(args))
    out = write_fitted_csv(sample, smoother.fit(), args.out)
    print(out)
    return EXIT_OK


def _boost(
    args: argparse.Namespace,
) -> tuple[DesignSample, LinearSmoother, BoostTrajectory]:
    sample = read_sample_csv(args.data)
    smoother = build_smoother(sample, _smoother_spec(args))
    config = _boost_config(args)
    trajectory = run_boost(smoother, sample.y, config)
    if trajectory.diverged:
        _warn_divergence(trajectory.diverged_at, trajectory.divergence_ratio)
    return sample, smoother, trajectory


def cmd_boost(args: argparse.Namespace) -> int:
    sample, smoother, trajectory = _boost(args)
    out = write_trajectory_csv(trajectory, args.out)
    print(out)
    if args.wide:
        print(write_wide_csv(trajectory, sample, _sidecar(out, "wide", ".csv")))
    if args.rule:
        rule = _stopping_rule(args, sample.n)
        result = select(trajectory, smoother, sample.y, rule, jobs=_jobs(args))
        fitted = trajectory.fitted_at(result.selected_k)
        selection_path = _sidecar(out, "selection", ".json")
        _write_json(selection_path, result.to_model(fitted).model_dump_json(indent=2))
        print(selection_path)
        print(write_fitted_csv(sample, fitted, _sidecar(out, "fitted", ".csv")))
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    sample = read_sample_csv(args.data)
    smoother = build_smoother(sample, _smoother_spec(args))
    report = analyze(smoother, mu=args.mu, variant=args.variant)
    out = Path(args.out)
    _write_json(out, report.to_model().model_dump_json(indent=2))
    print(f"{report.classification} max_singular={report.max_singular:.6g}")
    return EXIT_OK


def cmd_select(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if args.trajectory:
        sample = read_sample_csv(args.data)
        rule = _stopping_rule(args, sample.n)
        result = rescore_trajectory_csv(args.trajectory, sample.n, rule)
        fitted = None
    else:
        sample, smoother, trajectory = _boost(args)
        rule = _stopping_rule(args, sample.n)
        result = select(trajectory, smoother, sample.y, rule, jobs=_jobs(args))
        fitted = trajectory.fitted_at(result.selected_k)
    _write_json(out, result.to_model(fitted).model_dump_json(indent=2))
    write_scores_csv({rule.label: result}, _sidecar(out, "scores", ".csv"))
    print(f"{rule.label} selected k={result.selected_k}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    scenarios = load_scenarios(args.scenario)
    if args.replications is not None:
        if args.replications < 1:
            raise InputError("--replications must be >= 1")
        scenarios = [replace(s, replications=args.replications) for s in scenarios]
    summaries = [run_scenario(scenario, jobs=args.jobs) for scenario in scenarios]
    out = write_table_csv(summaries, args.out)
    print(out)
    print(write_records_csv(summaries, _sidecar(out, "records", ".csv")))
    return EXIT_OK


def _add_smoother_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("data", type=Path, help="CSV with an x,y header")
    parser.add_argument("--smoother", choices=SMOOTHER_KINDS, default="kernel")
    parser.add_argument("--kernel", choices=KERNEL_FAMILIES, default="gaussian")
    parser.add_argument("--bandwidth", type=float, default=0.2)
    parser.add_argument("--neighbors", type=int, default=10)
    parser.add_argument("--lambda", dest="lam", type=float, default=0.2)
    parser.add_argument("--bins", type=int, default=10)


def _add_boost_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mu", type=float, default=1.0)
    parser.add_argument("--max-iter", dest="max_iter", type=int, default=1000)
    parser.add_argument("--variant", choices=("plain", "symmetrized"), default="plain")


def _add_rule_flags(parser: argparse.ArgumentParser, *, required: bool) -> None:
    parser.add_argument("--rule", choices=RULE_CHOICES, required=required)
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument(
        "--split-fraction", dest="split_fraction", type=float, default=0.5
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasboost",
        description="Iterated bias correction of linear smoothers.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser("fit", help="fit the pilot smoother (k=1)")
    _add_smoother_flags(fit)
    fit.add_argument("--out", type=Path, default=Path("fitted.csv"))
    fit.set_defaults(handler=cmd_fit)

    boost = commands.add_parser("boost", help="run the boosting recursion")
    _add_smoother_flags(boost)
    _add_boost_flags(boost)
    _add_rule_flags(boost, required=False)
    boost.add_argument("--wide", action="store_true", help="also write fitted values")
    boost.add_argument("--out", type=Path, default=Path("trajectory.csv"))
    boost.set_defaults(handler=cmd_boost)

    spectrum = commands.add_parser("spectrum", help="spectral diagnostics")
    _add_smoother_flags(spectrum)
    _add_boost_flags(spectrum)
    spectrum.add_argument("--out", type=Path, default=Path("report.json"))
    spectrum.set_defaults(handler=cmd_spectrum)

    sel = commands.add_parser("select", help="choose the stopping iteration")
    _add_smoother_flags(sel)
    _add_boost_flags(sel)
    _add_rule_flags(sel, required=True)
    sel.add_argument("--trajectory", type=Path, help="re-score an exported trajectory")
    sel.add_argument("--out", type=Path, default=Path("selection.json"))
    sel.set_defaults(handler=cmd_select)

    simulate = commands.add_parser("simulate", help="run a Monte-Carlo scenario")
    simulate.add_argument("scenario", type=Path, help="scenario JSON file")
    simulate.add_argument("--replications", type=int, default=None)
    simulate.add_argument("--jobs", type=int, default=None)
    simulate.add_argument("--out", type=Path, default=Path("table.csv"))
    simulate.set_defaults(handler=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        get_settings().configure_logging()
        logger.debug("running %s", args.command)
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
