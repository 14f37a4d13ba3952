"""Stopping rules and the plug-in criteria they score with."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import InputError

logger = logging.getLogger(__name__)

RuleKind = Literal["aic", "aic_literal", "aicc", "gcv", "cv", "data_split"]
PLUGIN_KINDS: frozenset[str] = frozenset({"aic", "aic_literal", "aicc", "gcv"})
RULE_KINDS: tuple[RuleKind, ...] = (
    "aic",
    "aic_literal",
    "aicc",
    "gcv",
    "cv",
    "data_split",
)

# tr(S_k)/n at or beyond this is treated as interpolation by GCV
GCV_INTERPOLATION = 1.0 - 1e-9


@dataclass(frozen=True)
class StoppingRule:
    kind: RuleKind
    fold_size: int | None = None
    test_fraction: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in RULE_KINDS:
            raise InputError(f"unknown stopping rule {self.kind!r}")
        if self.kind == "cv":
            if self.fold_size is None or self.fold_size < 1:
                raise InputError(f"cv needs fold_size >= 1, got {self.fold_size}")
        if self.kind == "data_split":
            fraction = self.test_fraction
            if fraction is None or not 0.0 < fraction < 1.0:
                raise InputError(
                    f"data_split fraction must lie in (0, 1), got {fraction}"
                )

    @classmethod
    def aic(cls) -> StoppingRule:
        return cls("aic")

    @classmethod
    def aic_literal(cls) -> StoppingRule:
        return cls("aic_literal")

    @classmethod
    def aicc(cls) -> StoppingRule:
        return cls("aicc")

    @classmethod
    def gcv(cls) -> StoppingRule:
        return cls("gcv")

    @classmethod
    def cv(cls, fold_size: int = 1, seed: int = 0) -> StoppingRule:
        return cls("cv", fold_size=fold_size, seed=seed)

    @classmethod
    def loocv(cls) -> StoppingRule:
        return cls("cv", fold_size=1, seed=0)

    @classmethod
    def data_split(cls, test_fraction: float = 0.5, seed: int = 0) -> StoppingRule:
        return cls("data_split", test_fraction=test_fraction, seed=seed)

    @property
    def is_plugin(self) -> bool:
        return self.kind in PLUGIN_KINDS

    @property
    def label(self) -> str:
        if self.kind == "cv":
            return "loocv" if self.fold_size == 1 else f"cv{self.fold_size}"
        if self.kind == "data_split":
            return f"split{self.test_fraction:g}"
        return self.kind

    def validate_for(self, n: int) -> None:
        if self.kind == "cv" and (self.fold_size > n / 2 or n - self.fold_size < 3):
            raise InputError(
                f"fold size {self.fold_size} too large for n={n} "
                "(needs L <= n/2 and n - L >= 3)"
            )


def sigma_hat_sq(residual_norms: np.ndarray, n: int) -> np.ndarray:
    """Plug-in residual variance ``|y - m_k|^2 / n``."""
    return np.asarray(residual_norms, dtype=float) ** 2 / n


def plugin_scores(
    residual_norms: np.ndarray, traces: np.ndarray, n: int, kind: str
) -> np.ndarray:
    """Criterion values per candidate; non-finite marks an excluded candidate."""
    if kind not in PLUGIN_KINDS:
        raise InputError(f"{kind!r} is not a plug-in criterion")
    sigma2 = sigma_hat_sq(residual_norms, n)
    tr = np.asarray(traces, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_sigma2 = np.log(sigma2)
        if kind == "aic":
            return log_sigma2 + 2.0 * tr / n
        if kind == "aic_literal":
            return sigma2 + 2.0 * tr / n
        if kind == "gcv":
            ratio = tr / n
            scores = log_sigma2 - 2.0 * np.log1p(-np.minimum(ratio, GCV_INTERPOLATION))
            interpolating = (ratio >= GCV_INTERPOLATION) | (sigma2 <= 0)
            return np.where(interpolating, np.inf, scores)
        denominator = n - tr - 2.0
        scores = log_sigma2 + 1.0 + 2.0 * (tr + 1.0) / denominator
        return np.where(denominator > 0, scores, np.nan)
