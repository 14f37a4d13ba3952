"""Spectral classification of smoothers under boosting."""

from .analysis import (
    MinorWitness,
    SpectrumReport,
    analyze,
    classify,
    principal_minor_witness,
)

__all__ = [
    "MinorWitness",
    "SpectrumReport",
    "analyze",
    "classify",
    "principal_minor_witness",
]
