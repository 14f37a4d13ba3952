"""Monte-Carlo harness: boost, stop, compare with an oracle, aggregate."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat

import numpy as np

from ..boosting.engine import BoostConfig, BoostTrajectory, predict_many, run_boost
from ..config import get_settings
from ..errors import BiasBoostError, KernelSupportError
from ..smoothers.core import (
    DesignSample,
    LinearSmoother,
    SmootherSpec,
    build_smoother,
    solve_parameter_for_df,
)
from ..stopping.rules import plugin_scores
from ..stopping.selection import argmin_k, select
from .functions import true_function
from .scenario import PilotFamily, Replication, SimScenario, generate_replication

logger = logging.getLogger(__name__)

COMPARISON_GRID_SIZE = 25


@dataclass(frozen=True)
class ReplicationRecord:
    replication: int
    pilot_index: int
    pilot: str
    parameter: float
    rule: str
    k_hat: int | None
    k_opt: int | None
    sse_k_hat: float
    sse_k_opt: float
    mse_k_hat: float
    mse_k_opt: float
    diverged: bool
    failure: str | None = None

    @property
    def log_ratio(self) -> float:
        """``log(k_hat / k_opt)`` for density plots of the stopping error."""
        if self.k_hat is None or self.k_opt is None:
            return math.nan
        return math.log(self.k_hat / self.k_opt)


@dataclass(frozen=True)
class ReplicationResult:
    index: int
    records: tuple[ReplicationRecord, ...]
    comparison_mse: float = math.nan
    comparison_parameter: float = math.nan
    failure: str | None = None


@dataclass(frozen=True)
class CellSummary:
    pilot_index: int
    pilot: str
    rule: str
    median_k_hat: float
    median_mse: float
    median_k_opt: float
    median_mse_opt: float
    failures: int


@dataclass(frozen=True, eq=False)
class SimSummary:
    scenario: SimScenario
    cells: tuple[CellSummary, ...]
    median_comparison_mse: float
    failure_count: int
    results: tuple[ReplicationResult, ...]

    def cell(self, pilot_index: int, rule: str) -> CellSummary:
        for cell in self.cells:
            if cell.pilot_index == pilot_index and cell.rule == rule:
                return cell
        raise KeyError((pilot_index, rule))

    def records(self) -> list[ReplicationRecord]:
        return [record for result in self.results for record in result.records]


def oracle_k_opt(
    trajectory: BoostTrajectory,
    true_values_at_design: np.ndarray,
    tie_tol: float | None = None,
) -> int:
    """Checkpoint minimising the design-point SSE; ties go to the smaller k."""
    m = np.asarray(true_values_at_design, dtype=float)
    sse = np.sum((trajectory.fitted - m[None, :]) ** 2, axis=1)
    return argmin_k(trajectory.checkpoints, sse, tie_tol)


def grid_mse(
    predict: Callable[[np.ndarray], np.ndarray],
    function_id: str,
    grid_size: int = 100,
) -> float:
    """Mean squared error of ``predict`` over a regular grid of ``[0, 1]``."""
    grid = np.linspace(0.0, 1.0, grid_size)
    return _mse_on(predict, grid, true_function(function_id, grid))


def _mse_on(
    predict: Callable[[np.ndarray], np.ndarray], grid: np.ndarray, truth: np.ndarray
) -> float:
    diff = truth - np.asarray(predict(grid), dtype=float)
    return float(np.mean(diff * diff))


def _comparison_specs(
    sample: DesignSample, family: PilotFamily, kernel: str
) -> list[SmootherSpec]:
    """Candidate parameters spanning ``tr(S)`` from about 2 up to n/2."""
    n = sample.n
    if family in ("spline", "kernel"):
        # a spline never gets below 2 degrees of freedom
        low_df = 2.05 if family == "spline" else 2.0
        rough = solve_parameter_for_df(sample, family, n / 2, kernel=kernel)
        smooth = solve_parameter_for_df(sample, family, low_df, kernel=kernel)
        params = np.geomspace(rough.parameter, smooth.parameter, COMPARISON_GRID_SIZE)
        if family == "spline":
            return [SmootherSpec.for_spline(p) for p in params]
        return [SmootherSpec.for_kernel(kernel, p) for p in params]
    dfs = np.linspace(2.0, n / 2, COMPARISON_GRID_SIZE)
    if family == "knn":
        ks = sorted({int(np.clip(round(n / df), 1, n)) for df in dfs})
        return [SmootherSpec.for_knn(k) for k in ks]
    bins = sorted({int(np.clip(round(df), 1, n)) for df in dfs})
    return [SmootherSpec.for_bin(b) for b in bins]


def tune_comparison(
    sample: DesignSample, family: PilotFamily, kernel: str = "gaussian"
) -> LinearSmoother:
    """Classically tuned single smoother: AICc for kernels, GCV otherwise."""
    criterion = "aicc" if family == "kernel" else "gcv"
    specs = _comparison_specs(sample, family, kernel)
    smoothers = [build_smoother(sample, spec) for spec in specs]
    norms = np.array([np.linalg.norm(sample.y - s.fit()) for s in smoothers])
    traces = np.array([s.trace() for s in smoothers])
    scores = plugin_scores(norms, traces, sample.n, criterion)
    best = argmin_k(range(len(smoothers)), scores)
    return smoothers[best]


def _safe_grid_mse(
    predict: Callable[[np.ndarray], np.ndarray],
    rep: Replication,
    scenario: SimScenario,
    what: str,
) -> float:
    try:
        return _mse_on(predict, rep.grid, rep.m_grid)
    except KernelSupportError as exc:
        logger.warning("%s: grid MSE missing for %s: %s", scenario.label, what, exc)
        return math.nan


def _pilot_records(
    scenario: SimScenario,
    index: int,
    pilot_index: int,
    rep: Replication,
) -> list[ReplicationRecord]:
    rep_sample, m_design = rep.sample, rep.m_design
    pilot = scenario.pilots[pilot_index - 1]
    spec = pilot.resolve(rep_sample)
    smoother = build_smoother(rep_sample, spec)
    config = BoostConfig(
        max_iterations=pilot.max_iterations,
        mu=scenario.mu,
        variant=scenario.variant,
        track_trace=any(rule.is_plugin for rule in scenario.rules),
    )
    trajectory = run_boost(smoother, rep_sample.y, config)
    k_opt = oracle_k_opt(trajectory, m_design)

    def sse(k: int) -> float:
        diff = trajectory.fitted_at(k) - m_design
        return float(diff @ diff)

    def mse(k: int) -> float:
        return _safe_grid_mse(
            lambda g: predict_many(trajectory, smoother, g, k),
            rep,
            scenario,
            f"{pilot.label} k={k}",
        )

    mse_opt = mse(k_opt)
    records = []
    for rule in scenario.rules:
        common = dict(
            replication=index,
            pilot_index=pilot_index,
            pilot=pilot.label,
            parameter=spec.parameter,
            rule=rule.label,
            k_opt=k_opt,
            sse_k_opt=sse(k_opt),
            mse_k_opt=mse_opt,
            diverged=trajectory.diverged,
        )
        try:
            chosen = select(trajectory, smoother, rep_sample.y, rule, config=config)
        except BiasBoostError as exc:
            logger.warning(
                "%s rep %d: %s/%s failed: %s",
                scenario.label,
                index,
                pilot.label,
                rule.label,
                exc,
            )
            records.append(
                ReplicationRecord(
                    k_hat=None,
                    sse_k_hat=math.nan,
                    mse_k_hat=math.nan,
                    failure=str(exc),
                    **common,
                )
            )
            continue
        k_hat = chosen.selected_k
        records.append(
            ReplicationRecord(
                k_hat=k_hat,
                sse_k_hat=sse(k_hat),
                mse_k_hat=mse(k_hat),
                **common,
            )
        )
    return records


def run_replication(scenario: SimScenario, index: int) -> ReplicationResult:
    """All pilots and rules on one generated data set; failures are captured."""
    try:
        rep = generate_replication(scenario, index)
        records: list[ReplicationRecord] = []
        for pilot_index in range(1, len(scenario.pilots) + 1):
            records.extend(_pilot_records(scenario, index, pilot_index, rep))
        comparison_mse = comparison_parameter = math.nan
        if scenario.comparison:
            first = scenario.pilots[0]
            tuned = tune_comparison(rep.sample, first.family, first.kernel)
            comparison_parameter = tuned.spec.parameter
            comparison_mse = _safe_grid_mse(
                lambda g: tuned.weights_matrix(g) @ rep.sample.y,
                rep,
                scenario,
                tuned.spec.label,
            )
        return ReplicationResult(
            index=index,
            records=tuple(records),
            comparison_mse=comparison_mse,
            comparison_parameter=comparison_parameter,
        )
    except Exception as exc:
        logger.exception("%s: replication %d failed", scenario.label, index)
        return ReplicationResult(index=index, records=(), failure=str(exc))


def _median(values: Sequence[float]) -> float:
    finite = [v for v in values if v is not None and math.isfinite(v)]
    return float(np.median(finite)) if finite else math.nan


def summarize(
    scenario: SimScenario, results: Sequence[ReplicationResult]
) -> SimSummary:
    results = tuple(sorted(results, key=lambda r: r.index))
    records = [record for result in results for record in result.records]
    failed_reps = sum(result.failure is not None for result in results)
    cells = []
    for pilot_index, pilot in enumerate(scenario.pilots, 1):
        for rule in scenario.rules:
            mine = [
                r
                for r in records
                if r.pilot_index == pilot_index and r.rule == rule.label
            ]
            ok = [r for r in mine if r.failure is None]
            cells.append(
                CellSummary(
                    pilot_index=pilot_index,
                    pilot=pilot.label,
                    rule=rule.label,
                    median_k_hat=_median([r.k_hat for r in ok]),
                    median_mse=_median([r.mse_k_hat for r in ok]),
                    median_k_opt=_median([r.k_opt for r in mine]),
                    median_mse_opt=_median([r.mse_k_opt for r in mine]),
                    failures=len(mine) - len(ok) + failed_reps,
                )
            )
    failures = failed_reps + sum(r.failure is not None for r in records)
    return SimSummary(
        scenario=scenario,
        cells=tuple(cells),
        median_comparison_mse=_median([r.comparison_mse for r in results]),
        failure_count=failures,
        results=results,
    )


def run_scenario(scenario: SimScenario, jobs: int | None = None) -> SimSummary:
    """Run every replication and aggregate medians per (pilot, rule)."""
    jobs = get_settings().jobs if jobs is None else jobs
    indices = range(scenario.replications)
    logger.info(
        "running %s: %d replications, %d pilots, %d rules, jobs=%d",
        scenario.label,
        scenario.replications,
        len(scenario.pilots),
        len(scenario.rules),
        jobs,
    )
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_replication, repeat(scenario), indices))
    else:
        results = [run_replication(scenario, i) for i in indices]
    summary = summarize(scenario, results)
    logger.info("finished %s with %d failure(s)", scenario.label, summary.failure_count)
    return summary


@dataclass(frozen=True)
class StoppingTendency:
    mean_mse_late: float
    mean_mse_early: float
    late: int
    early: int


def late_vs_early(summary: SimSummary, pilot_index: int, rule: str) -> StoppingTendency:
    """Mean grid MSE over replications stopping after vs before ``k_opt``."""
    late, early = [], []
    for record in summary.records():
        if record.pilot_index != pilot_index or record.rule != rule:
            continue
        if record.k_hat is None or not math.isfinite(record.mse_k_hat):
            continue
        if record.k_hat > record.k_opt:
            late.append(record.mse_k_hat)
        elif record.k_hat < record.k_opt:
            early.append(record.mse_k_hat)
    return StoppingTendency(
        mean_mse_late=float(np.mean(late)) if late else math.nan,
        mean_mse_early=float(np.mean(early)) if early else math.nan,
        late=len(late),
        early=len(early),
    )
