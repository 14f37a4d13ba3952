"""End-to-end checks over many seeds; the heavier ones are marked ``slow``."""

from __future__ import annotations

import math

import numpy as np
import pytest
from src.boosting import BoostConfig, closed_form_fit, run_boost
from src.simulation import SimScenario, default_pilots, late_vs_early, run_scenario
from src.smoothers import DesignSample, KernelSpec, SmootherSpec, build_smoother
from src.spectral import analyze, principal_minor_witness
from src.stopping import StoppingRule, select
from src.stopping.rules import GCV_INTERPOLATION

SEEDS = range(20)


def _uniform_design(n: int, seed: int) -> DesignSample:
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, n)
    return DesignSample(x, np.sin(5.0 * np.pi * x) + rng.normal(0.0, 0.4, n))


@pytest.mark.parametrize("seed", SEEDS)
def test_recursion_equals_closed_form_on_random_fixtures(seed: int) -> None:
    sample = _uniform_design(30, 100 + seed)
    rng = np.random.default_rng(seed)
    specs = [
        SmootherSpec.for_kernel("gaussian", float(rng.uniform(0.05, 0.3))),
        SmootherSpec.for_spline(float(10.0 ** rng.uniform(-5, -1))),
    ]
    for spec in specs:
        smoother = build_smoother(sample, spec)
        trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=50))
        for k in range(1, 51):
            expected = closed_form_fit(smoother, sample.y, k)
            gap = np.linalg.norm(trajectory.fitted_at(k) - expected)
            assert gap <= 1e-9 * np.linalg.norm(expected)


@pytest.mark.slow
def test_gaussian_kernel_boosting_contracts() -> None:
    sample = _uniform_design(50, 0)
    smoother = build_smoother(sample, SmootherSpec.for_kernel("gaussian", 0.2))
    report = analyze(smoother)
    assert report.max_singular <= 1.0 + 1e-8
    assert report.classification in {"convergent", "boundary"}

    _, d_sqrt = smoother.symmetric_form()
    dense = BoostConfig(max_iterations=10_000, checkpoints=tuple(range(1, 10_001)))
    trajectory = run_boost(smoother, sample.y, dense)
    residuals = (sample.y[None, :] - trajectory.fitted) / d_sqrt[None, :]
    weighted = np.linalg.norm(residuals, axis=1)
    assert np.all(np.diff(weighted) < 0)

    long_run = run_boost(smoother, sample.y, BoostConfig(max_iterations=1_000_000))
    assert not long_run.diverged
    assert long_run.residual_norm_at(1_000_000) <= long_run.residual_norm_at(10_000)


@pytest.mark.parametrize("seed", SEEDS)
def test_knn_smoother_diverges(seed: int) -> None:
    sample = _uniform_design(50, seed)
    smoother = build_smoother(sample, SmootherSpec.for_knn(10))
    assert analyze(smoother).max_singular > 1.0
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=2000))
    assert trajectory.diverged


def test_epanechnikov_witnesses_across_seeds() -> None:
    hits = 0
    for seed in SEEDS:
        sample = _uniform_design(50, seed)
        smoother = build_smoother(sample, SmootherSpec.for_kernel("epanechnikov", 0.15))
        witness = principal_minor_witness(sample, KernelSpec("epanechnikov", 0.15))
        if witness is not None and analyze(smoother).max_singular > 1.0:
            hits += 1
    assert hits >= 19


@pytest.mark.parametrize("mu", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("seed", range(5))
def test_damped_step_identity(mu: float, seed: int) -> None:
    sample = _uniform_design(30, 200 + seed)
    for spec in (SmootherSpec.for_spline(1e-3), SmootherSpec.for_knn(4)):
        smoother = build_smoother(sample, spec)
        step = np.eye(sample.n) - mu * smoother.matrix
        for k in (1, 3, 8):
            current = sample.y - np.linalg.matrix_power(step, k) @ sample.y
            extended = current + mu * smoother.fit(sample.y - current)
            expected = sample.y - np.linalg.matrix_power(step, k + 1) @ sample.y
            gap = np.linalg.norm(extended - expected)
            assert gap <= 1e-9 * max(np.linalg.norm(expected), 1.0)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize(
    "spec",
    [SmootherSpec.for_knn(10), SmootherSpec.for_kernel("epanechnikov", 0.15)],
    ids=lambda spec: spec.label,
)
def test_symmetrized_variant_is_stable(seed: int, spec: SmootherSpec) -> None:
    sample = _uniform_design(50, seed)
    smoother = build_smoother(sample, spec)
    report = analyze(smoother, variant="symmetrized")
    eigs = 1.0 - report.symmetric_equivalent_eigenvalues
    assert eigs.min() >= -1.0 - 1e-8
    assert eigs.max() <= 1.0 + 1e-8
    config = BoostConfig(max_iterations=10_000, variant="symmetrized")
    assert not run_boost(smoother, sample.y, config).diverged


def _table_scenario(family: str) -> SimScenario:
    return SimScenario(
        function_id="m1",
        n=50,
        error_law="gaussian",
        pilots=default_pilots(family),
        rules=(StoppingRule.gcv(),),
        replications=50,
        base_seed=2024,
    )


@pytest.fixture(scope="module")
def spline_summary():
    return run_scenario(_table_scenario("spline"))


@pytest.mark.slow
def test_spline_pilots_order_and_beat_tuned_spline(spline_summary) -> None:
    cells = [spline_summary.cell(i, "gcv") for i in (1, 2, 3)]
    k_hats = [cell.median_k_hat for cell in cells]
    assert k_hats[0] > k_hats[1] > k_hats[2]
    for cell in cells:
        assert cell.median_mse <= 1.05 * spline_summary.median_comparison_mse


@pytest.mark.slow
def test_kernel_pilots_beat_aicc_tuned_kernel() -> None:
    summary = run_scenario(_table_scenario("kernel"))
    baseline = summary.median_comparison_mse
    cells = [summary.cell(i, "gcv") for i in (1, 2, 3)]
    assert all(cell.median_mse < baseline for cell in cells)
    assert cells[0].median_mse <= 0.9 * baseline


@pytest.mark.slow
def test_stopping_late_is_no_worse_than_stopping_early(spline_summary) -> None:
    tendency = late_vs_early(spline_summary, 1, "gcv")
    if min(tendency.late, tendency.early) < 5:
        pytest.skip("too few replications on one side of the oracle")
    assert tendency.mean_mse_late <= tendency.mean_mse_early


@pytest.mark.slow
def test_every_stopping_rule_runs_on_a_realistic_fit() -> None:
    sample = _uniform_design(50, 7)
    smoother = build_smoother(sample, SmootherSpec.for_kernel("gaussian", 0.05))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=2000))
    for rule in (StoppingRule.aic(), StoppingRule.aic_literal(), StoppingRule.gcv()):
        result = select(trajectory, smoother, sample.y, rule)
        assert result.selected_k in trajectory.checkpoints
        if rule.kind == "gcv":
            ratio = trajectory.trace_at(result.selected_k) / sample.n
            assert ratio < GCV_INTERPOLATION
    loo = select(trajectory, smoother, sample.y, StoppingRule.loocv())
    assert loo.selected_k in trajectory.checkpoints
    assert math.isfinite(loo.scores[loo.selected_k])
