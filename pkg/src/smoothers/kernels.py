"""Kernel profiles used by the Nadaraya-Watson smoother."""

from __future__ import annotations

from typing import Literal

import numpy as np

from ..errors import InputError

KernelFamily = Literal["gaussian", "epanechnikov", "uniform", "triangular"]
KERNEL_FAMILIES: tuple[KernelFamily, ...] = (
    "gaussian",
    "epanechnikov",
    "uniform",
    "triangular",
)

# Gram matrices of these families are positive semi-definite on every design.
_POSITIVE_DEFINITE = {
    "gaussian": True,
    "triangular": True,
    "epanechnikov": False,
    "uniform": False,
}

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _check_family(family: str) -> None:
    if family not in _POSITIVE_DEFINITE:
        raise InputError(
            f"unknown kernel family {family!r}; expected one of {KERNEL_FAMILIES}"
        )


def kernel_value(family: str, u: np.ndarray | float) -> np.ndarray:
    """Evaluate the unit-bandwidth kernel ``K(u)`` element-wise."""
    _check_family(family)
    u = np.asarray(u, dtype=float)
    if family == "gaussian":
        return _INV_SQRT_2PI * np.exp(-0.5 * u * u)
    inside = np.abs(u) <= 1.0
    if family == "epanechnikov":
        return np.where(inside, 0.75 * (1.0 - u * u), 0.0)
    if family == "uniform":
        return np.where(inside, 0.5, 0.0)
    return np.where(inside, 1.0 - np.abs(u), 0.0)


def scaled_kernel(family: str, t: np.ndarray | float, bandwidth: float) -> np.ndarray:
    """Return ``K_h(t) = K(t / h) / h``."""
    if not bandwidth > 0:
        raise InputError(f"bandwidth must be positive, got {bandwidth}")
    return kernel_value(family, np.asarray(t, dtype=float) / bandwidth) / bandwidth


def kernel_is_positive_definite(family: str) -> bool:
    _check_family(family)
    return _POSITIVE_DEFINITE[family]
