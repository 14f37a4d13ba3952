"""Data-driven stopping rules for the boosting recursion."""

from .export import rescore_trajectory_csv, write_scores_csv
from .rules import PLUGIN_KINDS, StoppingRule, plugin_scores, sigma_hat_sq
from .selection import (
    SelectionResult,
    argmin_k,
    cv_refit_predict,
    cv_scores,
    make_folds,
    select,
    split_indices,
)

__all__ = [
    "PLUGIN_KINDS",
    "SelectionResult",
    "StoppingRule",
    "argmin_k",
    "cv_refit_predict",
    "cv_scores",
    "make_folds",
    "plugin_scores",
    "rescore_trajectory_csv",
    "select",
    "sigma_hat_sq",
    "split_indices",
    "write_scores_csv",
]
