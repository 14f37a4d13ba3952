"""Scenario definitions and replication data generation."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import ValidationError
from scipy import stats

from ..boosting.engine import Variant
from ..errors import InputError
from ..models import PilotModel, RuleModel, ScenarioModel
from ..smoothers.core import DesignSample, SmootherSpec, solve_parameter_for_df
from ..stopping.rules import StoppingRule
from .functions import FUNCTION_IDS, noise_sd, true_function

logger = logging.getLogger(__name__)

ErrorLaw = Literal["gaussian", "student5"]
ERROR_LAWS: tuple[ErrorLaw, ...] = ("gaussian", "student5")
PilotFamily = Literal["kernel", "knn", "spline", "bin"]

DEFAULT_TARGET_DFS = (2.5, 5.0, 10.0)
SMOOTHEST_SPLINE_ITERATIONS = 20_000
DEFAULT_ITERATIONS = 2_000


@dataclass(frozen=True)
class PilotConfig:
    """A pilot smoother, tuned either by target ``tr(S)`` or an explicit parameter."""

    family: PilotFamily
    kernel: str = "gaussian"
    target_df: float | None = None
    parameter: float | None = None
    max_iterations: int = DEFAULT_ITERATIONS

    def __post_init__(self) -> None:
        if (self.target_df is None) == (self.parameter is None):
            raise InputError("pilot needs exactly one of target_df / parameter")

    @property
    def label(self) -> str:
        family = f"kernel-{self.kernel}" if self.family == "kernel" else self.family
        if self.target_df is not None:
            return f"{family}(df={self.target_df:g})"
        return f"{family}(p={self.parameter:g})"

    def resolve(self, sample: DesignSample) -> SmootherSpec:
        if self.target_df is not None:
            return solve_parameter_for_df(
                sample, self.family, self.target_df, kernel=self.kernel
            )
        if self.family == "kernel":
            return SmootherSpec.for_kernel(self.kernel, self.parameter)
        if self.family == "knn":
            return SmootherSpec.for_knn(int(self.parameter))
        if self.family == "spline":
            return SmootherSpec.for_spline(self.parameter)
        return SmootherSpec.for_bin(int(self.parameter))


def default_pilots(
    family: PilotFamily, kernel: str = "gaussian"
) -> tuple[PilotConfig, ...]:
    """Smoothest to roughest pilots at target df 2.5, 5 and 10."""
    pilots = []
    for i, df in enumerate(DEFAULT_TARGET_DFS):
        iterations = DEFAULT_ITERATIONS
        if family == "spline" and i == 0:
            iterations = SMOOTHEST_SPLINE_ITERATIONS
        pilots.append(
            PilotConfig(
                family=family,
                kernel=kernel,
                target_df=df,
                max_iterations=iterations,
            )
        )
    return tuple(pilots)


@dataclass(frozen=True)
class SimScenario:
    function_id: str
    n: int
    error_law: ErrorLaw
    pilots: tuple[PilotConfig, ...]
    rules: tuple[StoppingRule, ...] = (StoppingRule("gcv"),)
    replications: int = 100
    base_seed: int = 0
    grid_size: int = 100
    mu: float = 1.0
    variant: Variant = "plain"
    comparison: bool = True

    def __post_init__(self) -> None:
        if self.function_id not in FUNCTION_IDS:
            raise InputError(f"unknown function {self.function_id!r}")
        if self.error_law not in ERROR_LAWS:
            raise InputError(f"unknown error law {self.error_law!r}")
        if self.n < 3:
            raise InputError(f"n must be >= 3, got {self.n}")
        if self.replications < 1:
            raise InputError("replications must be >= 1")
        if self.base_seed < 0:
            raise InputError("base_seed must be non-negative")
        if not self.pilots:
            raise InputError("scenario needs at least one pilot")
        if not self.rules:
            raise InputError("scenario needs at least one stopping rule")

    @property
    def label(self) -> str:
        return f"{self.function_id}/n={self.n}/{self.error_law}"


@dataclass(frozen=True, eq=False)
class Replication:
    index: int
    sample: DesignSample
    m_design: np.ndarray
    grid: np.ndarray
    m_grid: np.ndarray
    sigma: float


def _noise(
    law: ErrorLaw, sigma: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    if law == "gaussian":
        return rng.normal(0.0, sigma, size)
    # t5 has variance 5/3
    scale = sigma / np.sqrt(5.0 / 3.0)
    return stats.t(df=5).rvs(size=size, random_state=rng) * scale


def generate_replication(scenario: SimScenario, replication_index: int) -> Replication:
    """Deterministic data for one replication, seeded by ``(base_seed, index)``."""
    rng = np.random.default_rng([scenario.base_seed, replication_index])
    x = rng.uniform(0.0, 1.0, scenario.n)
    m_design = true_function(scenario.function_id, x)
    sigma = noise_sd(scenario.function_id)
    y = m_design + _noise(scenario.error_law, sigma, scenario.n, rng)
    grid = np.linspace(0.0, 1.0, scenario.grid_size)
    return Replication(
        index=replication_index,
        sample=DesignSample(x, y),
        m_design=m_design,
        grid=grid,
        m_grid=true_function(scenario.function_id, grid),
        sigma=sigma,
    )


def _pilot_from_model(model: PilotModel) -> PilotConfig:
    iterations = model.max_iterations or DEFAULT_ITERATIONS
    return PilotConfig(
        family=model.family,
        kernel=model.kernel,
        target_df=model.target_df,
        parameter=model.parameter,
        max_iterations=iterations,
    )


def _rule_from_model(model: RuleModel) -> StoppingRule:
    if model.kind == "cv":
        return StoppingRule.cv(model.fold_size or 1, model.seed or 0)
    if model.kind == "data_split":
        return StoppingRule.data_split(model.test_fraction or 0.5, model.seed or 0)
    return StoppingRule(model.kind)


def scenarios_from_model(model: ScenarioModel) -> list[SimScenario]:
    """One :class:`SimScenario` per listed error law."""
    pilots = tuple(_pilot_from_model(p) for p in model.pilots)
    rules = tuple(_rule_from_model(r) for r in model.rules)
    return [
        SimScenario(
            function_id=model.function_id,
            n=model.n,
            error_law=law,
            pilots=pilots,
            rules=rules,
            replications=model.replications,
            base_seed=model.base_seed,
            grid_size=model.grid_size,
            mu=model.mu,
            variant=model.variant,
            comparison=model.comparison,
        )
        for law in model.error_law
    ]


def load_scenarios(path: Path | str) -> list[SimScenario]:
    """Parse a scenario JSON file."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    try:
        model = ScenarioModel.model_validate(payload)
    except ValidationError as exc:
        raise InputError(f"{path} is not a valid scenario: {exc}") from exc
    return scenarios_from_model(model)
