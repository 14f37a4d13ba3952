"""Top-level package for iterated bias correction of linear smoothers."""

from .boosting import BoostConfig, closed_form_fit, predict_at, run_boost
from .smoothers import DesignSample, SmootherSpec, build_smoother, weights_at
from .spectral import analyze, principal_minor_witness
from .stopping import StoppingRule, select

__all__ = [
    "BoostConfig",
    "DesignSample",
    "SmootherSpec",
    "StoppingRule",
    "analyze",
    "build_smoother",
    "closed_form_fit",
    "predict_at",
    "principal_minor_witness",
    "run_boost",
    "select",
    "weights_at",
]
