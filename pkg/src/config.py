"""Configuration helpers for the boosting library and CLI."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConfigurationError

_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


def _as_float(name: str, *, default: float, positive: bool = True) -> float:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = float(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{name} is not a number: {raw!r}") from exc
    if positive and not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")
    return value


def _as_int(name: str, *, default: int, minimum: int = 1) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{name} is not an integer: {raw!r}") from exc
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    """Runtime defaults; explicit arguments always win over these."""

    divergence_guard: float
    dense_checkpoints: int
    checkpoint_growth: float
    trace_dense_limit: int
    boundary_tol: float
    tie_tol: float
    jobs: int
    log_level: str

    def configure_logging(self) -> None:
        """Install a stderr handler at the configured level."""
        logging.basicConfig(
            level=getattr(logging, self.log_level),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Load settings once per process."""
    growth = _as_float("BIASBOOST_CHECKPOINT_GROWTH", default=1.1)
    if growth <= 1.0:
        raise ConfigurationError(
            f"BIASBOOST_CHECKPOINT_GROWTH must exceed 1, got {growth}"
        )

    log_level = os.environ.get("BIASBOOST_LOG_LEVEL", "INFO").strip().upper()
    if log_level not in _LOG_LEVELS:
        raise ConfigurationError(f"BIASBOOST_LOG_LEVEL is not a level: {log_level}")

    return Settings(
        divergence_guard=_as_float("BIASBOOST_DIVERGENCE_GUARD", default=1e6),
        dense_checkpoints=_as_int("BIASBOOST_DENSE_CHECKPOINTS", default=200),
        checkpoint_growth=growth,
        trace_dense_limit=_as_int("BIASBOOST_TRACE_DENSE_LIMIT", default=200),
        boundary_tol=_as_float("BIASBOOST_BOUNDARY_TOL", default=1e-8),
        tie_tol=_as_float("BIASBOOST_TIE_TOL", default=1e-12),
        jobs=_as_int("BIASBOOST_JOBS", default=1),
        log_level=log_level,
    )
