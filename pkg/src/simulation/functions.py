"""Regression functions of the Monte-Carlo study."""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

import numpy as np

from ..errors import InputError

FunctionId = Literal["m1", "m2", "m3"]
FUNCTION_IDS: tuple[FunctionId, ...] = ("m1", "m2", "m3")

RANGE_GRID_POINTS = 10_000


def _m1(x: np.ndarray) -> np.ndarray:
    return np.sin(5.0 * np.pi * x)


def _m2(x: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(x, [1.0, -48.0, 218.0, -315.0, 145.0])


def _m3(x: np.ndarray) -> np.ndarray:
    shifted = x - 1.0 / 3.0
    return np.where(shifted < 0, np.exp(shifted), np.exp(-2.0 * shifted))


_FUNCTIONS = {"m1": _m1, "m2": _m2, "m3": _m3}


def true_function(function_id: str, x: np.ndarray | float) -> np.ndarray:
    """Evaluate ``m(x)`` on ``[0, 1]``."""
    try:
        fn = _FUNCTIONS[function_id]
    except KeyError as exc:
        raise InputError(
            f"unknown function {function_id!r}; expected {FUNCTION_IDS}"
        ) from exc
    return fn(np.asarray(x, dtype=float))


@lru_cache(maxsize=None)
def function_range(function_id: str, grid_points: int = RANGE_GRID_POINTS) -> float:
    """``max m - min m`` over a fine regular grid of ``[0, 1]``."""
    values = true_function(function_id, np.linspace(0.0, 1.0, grid_points))
    return float(values.max() - values.min())


def noise_sd(function_id: str) -> float:
    """Error standard deviation ``0.2 * R_g``."""
    return 0.2 * function_range(function_id)
