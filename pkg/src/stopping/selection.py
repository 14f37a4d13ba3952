"""Selecting the stopping iteration k over a trajectory's checkpoints."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..boosting.engine import BoostConfig, BoostTrajectory, run_boost
from ..config import get_settings
from ..errors import (
    ConstructionError,
    DegenerateCriterionError,
    InputError,
    TraceUnavailableError,
)
from ..models import SelectionModel, finite_or_none
from ..smoothers.core import DesignSample, LinearSmoother, SmootherSpec, build_smoother
from .rules import StoppingRule, plugin_scores, sigma_hat_sq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionResult:
    selected_k: int
    scores: dict[int, float]
    sigma_hat_sq_at_selected: float
    rule: StoppingRule
    excluded: tuple[int, ...] = field(default_factory=tuple)

    def to_model(self, fitted: np.ndarray | None = None) -> SelectionModel:
        return SelectionModel(
            rule=self.rule.label,
            selected_k=self.selected_k,
            sigma_hat_sq=self.sigma_hat_sq_at_selected,
            scores={k: finite_or_none(v) for k, v in self.scores.items()},
            excluded=list(self.excluded),
            fitted=None if fitted is None else [float(v) for v in fitted],
        )


def argmin_k(
    candidates: Sequence[int], scores: np.ndarray, tie_tol: float | None = None
) -> int:
    """Smallest k whose score lies within the relative tie band of the minimum."""
    tie_tol = get_settings().tie_tol if tie_tol is None else tie_tol
    scores = np.asarray(scores, dtype=float)
    finite = np.isfinite(scores)
    if not finite.any():
        raise DegenerateCriterionError("no candidate k has a finite score")
    best = float(np.min(scores[finite]))
    band = best + tie_tol * abs(best)
    for k, score in zip(candidates, scores, strict=True):
        if np.isfinite(score) and score <= band:
            return int(k)
    raise DegenerateCriterionError("argmin search failed")  # pragma: no cover


def result_from_scores(
    candidates: Sequence[int],
    scores: np.ndarray,
    residual_norms: np.ndarray,
    n: int,
    rule: StoppingRule,
    tie_tol: float | None = None,
) -> SelectionResult:
    """Assemble a :class:`SelectionResult`, logging excluded candidates."""
    scores = np.asarray(scores, dtype=float)
    excluded = tuple(
        int(k) for k, s in zip(candidates, scores, strict=True) if not np.isfinite(s)
    )
    if excluded:
        logger.warning(
            "%s: %d candidate(s) excluded for non-finite scores (first k=%d)",
            rule.label,
            len(excluded),
            excluded[0],
        )
    selected = argmin_k(candidates, scores, tie_tol)
    position = list(candidates).index(selected)
    sigma2 = sigma_hat_sq(np.asarray(residual_norms, dtype=float), n)
    return SelectionResult(
        selected_k=selected,
        scores={int(k): float(s) for k, s in zip(candidates, scores, strict=True)},
        sigma_hat_sq_at_selected=float(sigma2[position]),
        rule=rule,
        excluded=excluded,
    )


def make_folds(n: int, fold_size: int, seed: int | None) -> list[np.ndarray]:
    """Seeded partition of ``range(n)`` into chunks of ``fold_size``."""
    if fold_size == 1:
        order = np.arange(n)
    else:
        order = np.random.default_rng(seed).permutation(n)
    return [np.sort(order[i : i + fold_size]) for i in range(0, n, fold_size)]


def split_indices(n: int, test_fraction: float, seed: int | None) -> np.ndarray:
    """Held-out test indices for data splitting, size clamped to ``[1, n-3]``."""
    size = int(np.clip(round(test_fraction * n), 1, n - 3))
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=size, replace=False))


def _refit_predictions(
    sample: DesignSample,
    spec: SmootherSpec,
    config: BoostConfig,
    held_out: np.ndarray,
    ks: Sequence[int],
) -> np.ndarray:
    """Predictions at held-out x for every k in ``ks``; NaN past divergence."""
    held_out = np.asarray(held_out, dtype=int)
    if held_out.size == 0:
        train, query = sample, sample.x
    else:
        keep = np.setdiff1d(np.arange(sample.n), held_out)
        if keep.size < 3:
            raise InputError(f"fold leaves {keep.size} training points; need >= 3")
        train, query = sample.subset(keep), sample.x[held_out]

    smoother = build_smoother(train, spec)
    fold_config = replace(
        config,
        max_iterations=max(ks),
        checkpoints=tuple(ks),
        track_trace=False,
        raise_on_divergence=False,
    )
    trajectory = run_boost(smoother, train.y, fold_config)
    recorded = set(trajectory.checkpoints)
    weights = smoother.weights_matrix(query)
    if trajectory.variant == "symmetrized":
        weights = weights @ smoother.matrix.T
    out = np.full((len(ks), query.size), np.nan)
    for row, k in enumerate(ks):
        if k in recorded:
            out[row] = trajectory.mu * (weights @ trajectory.beta_at(k))
    return out


def cv_refit_predict(
    sample: DesignSample,
    spec: SmootherSpec,
    config: BoostConfig,
    held_out: np.ndarray,
    k: int,
) -> np.ndarray:
    """Refit on the complement of ``held_out`` and predict there at iteration k."""
    return _refit_predictions(sample, spec, config, held_out, [k])[0]


def cv_scores(
    sample: DesignSample,
    spec: SmootherSpec,
    config: BoostConfig,
    candidates: Sequence[int],
    folds: Sequence[np.ndarray],
    jobs: int = 1,
) -> np.ndarray:
    """Average held-out squared prediction error per candidate k."""

    def fold_error(held_out: np.ndarray) -> np.ndarray:
        try:
            preds = _refit_predictions(sample, spec, config, held_out, candidates)
        except ConstructionError as exc:
            logger.warning("fold refit failed (%d held out): %s", len(held_out), exc)
            raise
        errors = (preds - sample.y[held_out][None, :]) ** 2
        return np.where(np.isnan(errors), np.inf, errors).sum(axis=1)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_fold = list(pool.map(fold_error, folds))
    else:
        per_fold = [fold_error(fold) for fold in folds]
    total = np.sum(per_fold, axis=0)
    held = sum(len(fold) for fold in folds)
    return total / held


def select(
    trajectory: BoostTrajectory,
    smoother: LinearSmoother,
    y: np.ndarray,
    rule: StoppingRule,
    *,
    config: BoostConfig | None = None,
    jobs: int = 1,
    tie_tol: float | None = None,
) -> SelectionResult:
    """Score every recorded checkpoint with ``rule`` and return the argmin."""
    y = np.asarray(y, dtype=float)
    n = smoother.n
    candidates = list(trajectory.checkpoints)
    if not candidates:
        raise DegenerateCriterionError("trajectory has no recorded checkpoints")
    rule.validate_for(n)
    residual_norms = trajectory.residual_norms[np.array(candidates) - 1]

    if rule.is_plugin:
        if trajectory.traces is None:
            raise TraceUnavailableError(
                f"{rule.label} needs tr(S_k), which {smoother.spec.label} "
                f"does not provide at n={n}"
            )
        scores = plugin_scores(residual_norms, trajectory.traces, n, rule.kind)
    else:
        sample = DesignSample(smoother.sample.x, y)
        base = config or BoostConfig(
            max_iterations=max(candidates), mu=trajectory.mu, variant=trajectory.variant
        )
        if rule.kind == "cv":
            folds = make_folds(n, rule.fold_size, rule.seed)
        else:
            folds = [split_indices(n, rule.test_fraction, rule.seed)]
        scores = cv_scores(sample, smoother.spec, base, candidates, folds, jobs=jobs)

    result = result_from_scores(candidates, scores, residual_norms, n, rule, tie_tol)
    logger.info(
        "%s selected k=%d among %d candidates",
        rule.label,
        result.selected_k,
        len(candidates),
    )
    return result
