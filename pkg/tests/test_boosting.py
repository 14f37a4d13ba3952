from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
from src.boosting import (
    BoostConfig,
    boosted_matrix,
    boosted_trace,
    closed_form_fit,
    default_checkpoints,
    exact_bias_variance,
    predict_at,
    predict_many,
    read_trajectory_csv,
    run_boost,
    write_trajectory_csv,
    write_wide_csv,
)
from src.errors import DivergenceDetected, InputError, TraceUnavailableError
from src.smoothers import DesignSample, SmootherSpec, build_smoother

SampleFactory = Callable[..., DesignSample]


def _relative_gap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def test_default_checkpoints_are_dense_then_geometric() -> None:
    ks = default_checkpoints(1000, dense_until=10, growth=1.5)
    assert ks[:10] == tuple(range(1, 11))
    assert ks[-1] == 1000
    assert all(b > a for a, b in zip(ks, ks[1:]))
    assert default_checkpoints(5, dense_until=200) == (1, 2, 3, 4, 5)


def test_boost_config_validation() -> None:
    with pytest.raises(InputError):
        BoostConfig(mu=0.0)
    with pytest.raises(InputError):
        BoostConfig(mu=1.5)
    with pytest.raises(InputError):
        BoostConfig(max_iterations=0)
    with pytest.raises(InputError):
        BoostConfig(variant="doubled")
    config = BoostConfig(max_iterations=7, checkpoints=(3, 1))
    assert config.resolved_checkpoints() == (1, 3, 7)


def test_first_iteration_is_the_pilot_fit(make_sample: SampleFactory) -> None:
    sample = make_sample()
    smoother = build_smoother(sample, SmootherSpec.for_kernel("gaussian", 0.2))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=3))
    np.testing.assert_allclose(trajectory.fitted_at(1), smoother.fit(), atol=1e-14)


def test_projection_smoother_is_a_fixed_point(make_sample: SampleFactory) -> None:
    sample = make_sample()
    smoother = build_smoother(sample, SmootherSpec.for_bin(10))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=100))
    first = trajectory.fitted_at(1)
    deviation = np.abs(trajectory.fitted - first[None, :]).max()
    assert deviation <= 1e-12
    np.testing.assert_allclose(
        trajectory.residual_norms, trajectory.residual_norms[0], rtol=1e-12
    )


@pytest.mark.parametrize(
    "spec",
    [
        SmootherSpec.for_kernel("gaussian", 0.2),
        SmootherSpec.for_kernel("triangular", 0.2),
        SmootherSpec.for_spline(0.01),
    ],
    ids=lambda spec: spec.label,
)
def test_recursion_matches_closed_form(
    make_sample: SampleFactory, spec: SmootherSpec
) -> None:
    sample = make_sample(n=30, seed=11)
    smoother = build_smoother(sample, spec)
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=50))
    for k in (1, 2, 7, 20, 50):
        expected = closed_form_fit(smoother, sample.y, k)
        assert _relative_gap(trajectory.fitted_at(k), expected) <= 1e-9


@pytest.mark.parametrize("mu", [0.1, 0.5, 0.9])
def test_damped_step_extends_the_closed_form(
    make_sample: SampleFactory, mu: float
) -> None:
    sample = make_sample(n=30, seed=12)
    smoother = build_smoother(sample, SmootherSpec.for_kernel("gaussian", 0.15))
    for k in (1, 4, 15):
        current = closed_form_fit(smoother, sample.y, k, mu=mu)
        stepped = current + mu * smoother.fit(sample.y - current)
        expected = closed_form_fit(smoother, sample.y, k + 1, mu=mu)
        assert _relative_gap(stepped, expected) <= 1e-9


def test_trajectory_is_a_convex_combination_of_steps(
    make_sample: SampleFactory,
) -> None:
    sample = make_sample(n=25, seed=13)
    smoother = build_smoother(sample, SmootherSpec.for_spline(0.05))
    mu = 0.5
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=20, mu=mu))
    for k in range(1, 20):
        previous = trajectory.fitted_at(k)
        bias = smoother.fit(sample.y - previous)
        combined = (1.0 - mu) * previous + mu * (previous + bias)
        np.testing.assert_allclose(trajectory.fitted_at(k + 1), combined, atol=1e-10)


def test_well_conditioned_kernel_converges_to_the_data(
    grid_sample: DesignSample,
) -> None:
    smoother = build_smoother(grid_sample, SmootherSpec.for_kernel("gaussian", 0.05))
    trajectory = run_boost(smoother, grid_sample.y, BoostConfig(max_iterations=2000))
    assert not trajectory.diverged

    _, d_sqrt = smoother.symmetric_form()
    dense = [k for k in trajectory.checkpoints if k <= 500]
    weighted = [
        np.linalg.norm((grid_sample.y - trajectory.fitted_at(k)) / d_sqrt)
        for k in dense
    ]
    assert np.all(np.diff(weighted) < 0)

    final = trajectory.fitted_at(2000)
    assert np.linalg.norm(final - grid_sample.y) < 1e-6 * np.linalg.norm(grid_sample.y)


def test_spline_residual_and_bias_norms_decrease() -> None:
    x = np.linspace(0.0, 1.0, 40)
    noise = np.random.default_rng(1).normal(0.0, 0.3, x.size)
    sample = DesignSample(x, np.sin(5.0 * np.pi * x) + noise)
    smoother = build_smoother(sample, SmootherSpec.for_spline(1e-4))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=300))
    assert np.all(np.diff(trajectory.residual_norms) < 0)
    assert np.all(np.diff(trajectory.bias_norms) < 0)
    assert np.all(np.diff(trajectory.traces) >= -1e-9)


def test_knn_trips_the_divergence_guard(make_sample: SampleFactory) -> None:
    sample = make_sample(n=50, seed=0)
    smoother = build_smoother(sample, SmootherSpec.for_knn(10))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=2000))

    assert trajectory.diverged
    assert trajectory.diverged_at == trajectory.last_k + 1
    assert trajectory.divergence_ratio > 1e6
    assert trajectory.checkpoints[-1] <= trajectory.last_k
    assert np.all(trajectory.residual_norms <= 1e6 * trajectory.y_norm)


def test_divergence_can_raise(make_sample: SampleFactory) -> None:
    sample = make_sample(n=50, seed=0)
    smoother = build_smoother(sample, SmootherSpec.for_knn(10))
    config = BoostConfig(max_iterations=2000, raise_on_divergence=True)
    with pytest.raises(DivergenceDetected) as info:
        run_boost(smoother, sample.y, config)
    assert info.value.k >= 1
    assert info.value.ratio > 1e6


def test_symmetrized_spline_equals_plain_with_squared_operator(
    make_sample: SampleFactory,
) -> None:
    sample = make_sample(n=20, seed=15)
    smoother = build_smoother(sample, SmootherSpec.for_spline(0.01))
    trajectory = run_boost(
        smoother, sample.y, BoostConfig(max_iterations=10, variant="symmetrized")
    )
    s2 = smoother.matrix @ smoother.matrix
    expected = sample.y - np.linalg.matrix_power(np.eye(20) - s2, 10) @ sample.y
    np.testing.assert_allclose(trajectory.fitted_at(10), expected, atol=1e-10)


@pytest.mark.parametrize("variant", ["plain", "symmetrized"])
def test_prediction_at_design_points_reproduces_fit(
    make_sample: SampleFactory, variant: str
) -> None:
    sample = make_sample(n=30, seed=16)
    smoother = build_smoother(sample, SmootherSpec.for_kernel("gaussian", 0.1))
    trajectory = run_boost(
        smoother, sample.y, BoostConfig(max_iterations=25, mu=0.7, variant=variant)
    )
    for k in (1, 10, 25):
        predicted = predict_many(trajectory, smoother, sample.x, k)
        np.testing.assert_allclose(predicted, trajectory.fitted_at(k), atol=1e-10)
    assert predict_at(trajectory, smoother, float(sample.x[3]), 10) == pytest.approx(
        trajectory.fitted_at(10)[3], abs=1e-10
    )


def test_prediction_off_the_design_uses_boosted_coefficients(
    make_sample: SampleFactory,
) -> None:
    sample = make_sample(n=30, seed=17)
    smoother = build_smoother(sample, SmootherSpec.for_kernel("gaussian", 0.1))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=5))
    x0 = 0.4321
    step = np.eye(sample.n) - smoother.matrix
    coefficients = sum(np.linalg.matrix_power(step, j) @ sample.y for j in range(5))
    expected = float(smoother.weights_at(x0) @ coefficients)
    assert predict_at(trajectory, smoother, x0, 5) == pytest.approx(expected, rel=1e-6)


def test_trace_requires_a_tracked_trajectory(make_sample: SampleFactory) -> None:
    sample = make_sample(n=20)
    smoother = build_smoother(sample, SmootherSpec.for_spline(0.1))
    trajectory = run_boost(
        smoother, sample.y, BoostConfig(max_iterations=5, track_trace=False)
    )
    with pytest.raises(TraceUnavailableError):
        trajectory.trace_at(5)
    with pytest.raises(InputError):
        trajectory.fitted_at(6)


def test_traces_match_closed_form(make_sample: SampleFactory) -> None:
    sample = make_sample(n=30, seed=18)
    for spec in (SmootherSpec.for_spline(0.01), SmootherSpec.for_knn(4)):
        smoother = build_smoother(sample, spec)
        trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=12))
        for k in (1, 6, 12):
            assert trajectory.trace_at(k) == pytest.approx(
                boosted_trace(smoother, k), rel=1e-9
            )


def test_knn_trace_missing_beyond_dense_limit(
    monkeypatch: pytest.MonkeyPatch, make_sample: SampleFactory
) -> None:
    monkeypatch.setenv("BIASBOOST_TRACE_DENSE_LIMIT", "10")
    sample = make_sample(n=30)
    smoother = build_smoother(sample, SmootherSpec.for_knn(3))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=5))
    assert trajectory.traces is None


def test_exact_bias_variance_limits(grid_sample: DesignSample) -> None:
    smoother = build_smoother(grid_sample, SmootherSpec.for_kernel("gaussian", 0.05))
    m = np.cos(3.0 * grid_sample.x)

    bias_sq, variance = exact_bias_variance(smoother, m, 0.0, 3)
    assert variance == 0.0
    assert bias_sq > 0.0

    bias_sq, variance = exact_bias_variance(smoother, m, 0.25, 5000)
    assert bias_sq == pytest.approx(0.0, abs=1e-12)
    assert variance == pytest.approx(0.25 * grid_sample.n, rel=1e-6)


def test_exact_bias_variance_agrees_with_monte_carlo() -> None:
    x = np.array([0.0, 0.2, 0.45, 0.7, 1.0])
    m = np.sin(2.0 * np.pi * x)
    sigma = 0.5
    smoother = build_smoother(
        DesignSample(x, m), SmootherSpec.for_kernel("gaussian", 0.3)
    )
    rng = np.random.default_rng(2024)
    draws = m[None, :] + rng.normal(0.0, sigma, (100_000, 5))

    for k in (1, 5, 20):
        bias_sq, variance = exact_bias_variance(smoother, m, sigma**2, k)
        residual = draws.copy()
        for _ in range(k):
            residual -= residual @ smoother.matrix.T
        fits = draws - residual
        mean_fit = boosted_matrix(smoother, k) @ m

        # bias: the Monte-Carlo mean fit sits on S_k m, coordinate by coordinate
        mc_mean = fits.mean(axis=0)
        mean_se = fits.std(axis=0, ddof=1) / np.sqrt(fits.shape[0])
        assert np.all(np.abs(mc_mean - mean_fit) <= 4 * mean_se)
        slack = np.linalg.norm(4 * mean_se)
        mc_bias_sq = float(np.sum((m - mc_mean) ** 2))
        assert abs(mc_bias_sq - bias_sq) <= slack * (2 * np.sqrt(bias_sq) + slack)

        spread = np.sum((fits - mean_fit[None, :]) ** 2, axis=1)
        se = spread.std(ddof=1) / np.sqrt(spread.size)
        assert abs(spread.mean() - variance) <= 4 * se


def test_trajectory_exports(tmp_path: Path, make_sample: SampleFactory) -> None:
    sample = make_sample(n=15, seed=19)
    smoother = build_smoother(sample, SmootherSpec.for_spline(0.05))
    trajectory = run_boost(smoother, sample.y, BoostConfig(max_iterations=8))

    rows = read_trajectory_csv(write_trajectory_csv(trajectory, tmp_path / "t.csv"))
    assert [row.k for row in rows] == list(trajectory.checkpoints)
    assert rows[-1].residual_norm == trajectory.residual_norm_at(8)
    assert rows[-1].trace == trajectory.trace_at(8)

    wide = write_wide_csv(trajectory, sample, tmp_path / "wide.csv")
    lines = wide.read_text(encoding="utf-8").splitlines()
    assert lines[0].split(",")[:3] == ["x", "fitted_1", "fitted_2"]
    assert len(lines) == sample.n + 1


def test_input_shape_is_checked(make_sample: SampleFactory) -> None:
    sample = make_sample(n=10)
    smoother = build_smoother(sample, SmootherSpec.for_bin(2))
    with pytest.raises(InputError):
        run_boost(smoother, np.ones(9))
    with pytest.raises(InputError):
        closed_form_fit(smoother, sample.y, 0)
