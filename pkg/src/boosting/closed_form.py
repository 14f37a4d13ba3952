"""Closed-form boosted smoother ``S_k = I - (I - mu S_eff)^k``."""

from __future__ import annotations

import numpy as np
from scipy import linalg

from ..errors import InputError
from ..smoothers.core import LinearSmoother
from .engine import Variant, effective_matrix


def _eigen_system(
    smoother: LinearSmoother, variant: Variant
) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
    """``(eigenvalues, eigenvectors, d_sqrt)`` of the symmetric-equivalent operator."""
    if variant == "symmetrized":
        values, vectors = linalg.eigh(effective_matrix(smoother, variant))
        return values, vectors, np.ones(smoother.n)
    form = smoother.symmetric_form()
    if form is None:
        return None
    sym, d_sqrt = form
    values, vectors = linalg.eigh(sym)
    return values, vectors, d_sqrt


def _shrinkage(values: np.ndarray, k: int, mu: float) -> np.ndarray:
    return 1.0 - (1.0 - mu * values) ** k


def _check_k(k: int) -> None:
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")


def closed_form_fit(
    smoother: LinearSmoother,
    y: np.ndarray,
    k: int,
    mu: float = 1.0,
    variant: Variant = "plain",
) -> np.ndarray:
    """Apply ``I - (I - mu S_eff)^k`` to ``y`` without running the recursion."""
    _check_k(k)
    y = np.asarray(y, dtype=float)
    if y.shape != (smoother.n,):
        raise InputError(f"y has shape {y.shape}, expected ({smoother.n},)")

    system = _eigen_system(smoother, variant)
    if system is not None:
        values, vectors, d_sqrt = system
        coords = vectors.T @ (y / d_sqrt)
        return d_sqrt * (vectors @ (_shrinkage(values, k, mu) * coords))

    s_eff = effective_matrix(smoother, variant)
    residual = y.copy()
    for _ in range(k):
        residual = residual - mu * (s_eff @ residual)
    return y - residual


def boosted_matrix(
    smoother: LinearSmoother, k: int, mu: float = 1.0, variant: Variant = "plain"
) -> np.ndarray:
    """Dense ``S_k``; fine at the sample sizes this library targets."""
    _check_k(k)
    system = _eigen_system(smoother, variant)
    if system is not None:
        values, vectors, d_sqrt = system
        core = (vectors * _shrinkage(values, k, mu)) @ vectors.T
        return d_sqrt[:, None] * core / d_sqrt[None, :]
    n = smoother.n
    step = np.eye(n) - mu * effective_matrix(smoother, variant)
    return np.eye(n) - np.linalg.matrix_power(step, k)


def boosted_trace(
    smoother: LinearSmoother, k: int, mu: float = 1.0, variant: Variant = "plain"
) -> float:
    """Effective degrees of freedom ``tr(S_k)``."""
    _check_k(k)
    system = _eigen_system(smoother, variant)
    if system is not None:
        return float(np.sum(_shrinkage(system[0], k, mu)))
    return float(np.trace(boosted_matrix(smoother, k, mu, variant)))


def exact_bias_variance(
    smoother: LinearSmoother,
    m_true: np.ndarray,
    sigma2: float,
    k: int,
    mu: float = 1.0,
    variant: Variant = "plain",
) -> tuple[float, float]:
    """Squared bias ``|(I - S_k) m|^2`` and variance ``sigma2 * tr(S_k S_k^T)``."""
    m_true = np.asarray(m_true, dtype=float)
    if m_true.shape != (smoother.n,):
        raise InputError(f"m_true has shape {m_true.shape}, expected ({smoother.n},)")
    if sigma2 < 0:
        raise InputError(f"sigma2 must be >= 0, got {sigma2}")
    s_k = boosted_matrix(smoother, k, mu, variant)
    bias = m_true - s_k @ m_true
    return float(bias @ bias), float(sigma2 * np.sum(s_k * s_k))
