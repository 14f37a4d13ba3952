"""Pydantic models shared by the CLI and JSON artefacts."""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Classification = Literal["convergent", "divergent", "boundary"]


def finite_or_none(value: float) -> float | None:
    """JSON has no infinities; non-finite scores are written as null."""
    return float(value) if math.isfinite(value) else None


class WitnessModel(BaseModel):
    indices: list[int]
    determinant: float
    points: list[float]


class SpectrumReportModel(BaseModel):
    smoother: str
    mu: float
    variant: Literal["plain", "symmetrized"]
    max_singular: float = Field(..., alias="maxSingular")
    euclidean_max_singular: float = Field(..., alias="euclideanMaxSingular")
    spectral_radius: float = Field(..., alias="spectralRadius")
    classification: Classification
    singular_values: list[float] = Field(..., alias="singularValues")
    symmetric_equivalent_eigenvalues: list[float] | None = Field(
        None, alias="symmetricEquivalentEigenvalues"
    )
    witness: WitnessModel | None = None

    model_config = ConfigDict(populate_by_name=True)


class SelectionModel(BaseModel):
    rule: str
    selected_k: int = Field(..., alias="selectedK")
    sigma_hat_sq: float = Field(..., alias="sigmaHatSq")
    scores: dict[int, float | None]
    excluded: list[int] = Field(default_factory=list)
    fitted: list[float] | None = None

    model_config = ConfigDict(populate_by_name=True)


class PilotModel(BaseModel):
    family: Literal["kernel", "knn", "spline", "bin"]
    kernel: Literal["gaussian", "epanechnikov", "uniform", "triangular"] = "gaussian"
    target_df: float | None = Field(None, alias="targetDf", gt=1.0)
    parameter: float | None = Field(None, gt=0.0)
    max_iterations: int | None = Field(None, alias="maxIterations", ge=1)

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def _one_tuning_source(self) -> PilotModel:
        if (self.target_df is None) == (self.parameter is None):
            raise ValueError("pilot needs exactly one of targetDf / parameter")
        return self


class RuleModel(BaseModel):
    kind: Literal["aic", "aic_literal", "aicc", "gcv", "cv", "data_split"]
    fold_size: int | None = Field(None, alias="foldSize", ge=1)
    test_fraction: float | None = Field(None, alias="testFraction", gt=0.0, lt=1.0)
    seed: int | None = None

    model_config = ConfigDict(populate_by_name=True)


class ScenarioModel(BaseModel):
    function_id: Literal["m1", "m2", "m3"] = Field(..., alias="functionId")
    n: int = Field(..., ge=3)
    error_law: list[Literal["gaussian", "student5"]] = Field(
        default_factory=lambda: ["gaussian"], alias="errorLaw"
    )
    pilots: list[PilotModel] = Field(..., min_length=1)
    rules: list[RuleModel] = Field(
        default_factory=lambda: [RuleModel(kind="gcv")], min_length=1
    )
    replications: int = Field(100, ge=1)
    base_seed: int = Field(0, alias="baseSeed", ge=0)
    grid_size: int = Field(100, alias="gridSize", ge=2)
    mu: float = Field(1.0, gt=0.0, le=1.0)
    variant: Literal["plain", "symmetrized"] = "plain"
    comparison: bool = True

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("error_law", mode="before")
    @classmethod
    def _wrap_single_law(cls, value: object) -> object:
        if isinstance(value, str):
            return [value]
        return value
