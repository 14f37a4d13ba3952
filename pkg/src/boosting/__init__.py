"""Iterated bias correction of linear smoothers."""

from .closed_form import (
    boosted_matrix,
    boosted_trace,
    closed_form_fit,
    exact_bias_variance,
)
from .engine import (
    BoostConfig,
    BoostTrajectory,
    default_checkpoints,
    effective_matrix,
    predict_at,
    predict_many,
    run_boost,
)
from .export import read_trajectory_csv, write_trajectory_csv, write_wide_csv

__all__ = [
    "BoostConfig",
    "BoostTrajectory",
    "boosted_matrix",
    "boosted_trace",
    "closed_form_fit",
    "default_checkpoints",
    "effective_matrix",
    "exact_bias_variance",
    "predict_at",
    "predict_many",
    "read_trajectory_csv",
    "run_boost",
    "write_trajectory_csv",
    "write_wide_csv",
]
