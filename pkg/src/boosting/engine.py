"""Iterative bias correction (L2 boosting) of a linear smoother.

Each step smooths the current residuals and adds the damped correction to
the fit::

    b_k = S_eff R_{k-1},   m_k = m_{k-1} + mu * b_k,   R_k = R_{k-1} - mu * b_k

with ``R_0 = y``.  The coefficient vector ``beta_k = sum_{j<k} R_j`` satisfies
``m_k = mu * S_eff beta_k``, which is what out-of-sample prediction uses.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import linalg

from ..config import get_settings
from ..errors import DivergenceDetected, InputError, TraceUnavailableError
from ..smoothers.core import LinearSmoother

logger = logging.getLogger(__name__)

Variant = Literal["plain", "symmetrized"]
VARIANTS: tuple[Variant, ...] = ("plain", "symmetrized")


def default_checkpoints(
    max_iterations: int,
    dense_until: int | None = None,
    growth: float | None = None,
) -> tuple[int, ...]:
    """Every k up to ``dense_until``, then ``k -> ceil(growth * k)``, ending at M."""
    settings = get_settings()
    dense_until = settings.dense_checkpoints if dense_until is None else dense_until
    growth = settings.checkpoint_growth if growth is None else growth
    if max_iterations < 1:
        raise InputError(f"max_iterations must be >= 1, got {max_iterations}")

    ks = list(range(1, min(max_iterations, max(dense_until, 1)) + 1))
    k = ks[-1]
    while k < max_iterations:
        k = min(max(k + 1, math.ceil(k * growth)), max_iterations)
        ks.append(k)
    return tuple(ks)


@dataclass(frozen=True)
class BoostConfig:
    max_iterations: int = 1000
    mu: float = 1.0
    variant: Variant = "plain"
    divergence_guard: float | None = None
    checkpoints: tuple[int, ...] | None = None
    track_trace: bool = True
    raise_on_divergence: bool = False

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise InputError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 < self.mu <= 1.0:
            raise InputError(f"mu must lie in (0, 1], got {self.mu}")
        if self.variant not in VARIANTS:
            raise InputError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.divergence_guard is not None and not self.divergence_guard > 0:
            raise InputError("divergence_guard must be positive")
        if self.checkpoints is not None:
            ordered = tuple(sorted(set(self.checkpoints)))
            object.__setattr__(self, "checkpoints", ordered)

    @property
    def guard(self) -> float:
        if self.divergence_guard is None:
            return get_settings().divergence_guard
        return self.divergence_guard

    def resolved_checkpoints(self) -> tuple[int, ...]:
        if self.checkpoints is None:
            return default_checkpoints(self.max_iterations)
        ks = {k for k in self.checkpoints if 1 <= k <= self.max_iterations}
        ks.add(self.max_iterations)
        return tuple(sorted(ks))


@dataclass(frozen=True, eq=False)
class BoostTrajectory:
    """State of the recursion at the recorded checkpoints.

    ``residual_norms[k-1]`` and ``bias_norms[k-1]`` cover every completed k;
    ``betas``, ``fitted`` and ``traces`` are indexed like ``checkpoints``.
    """

    checkpoints: tuple[int, ...]
    betas: np.ndarray
    fitted: np.ndarray
    traces: np.ndarray | None
    residual_norms: np.ndarray
    bias_norms: np.ndarray
    mu: float
    variant: Variant
    y_norm: float
    diverged: bool = False
    diverged_at: int | None = None
    divergence_ratio: float | None = None
    _positions: dict[int, int] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        positions = {k: i for i, k in enumerate(self.checkpoints)}
        object.__setattr__(self, "_positions", positions)

    @property
    def last_k(self) -> int:
        return int(self.residual_norms.size)

    def _index(self, k: int) -> int:
        try:
            return self._positions[k]
        except KeyError as exc:
            raise InputError(f"k={k} is not a recorded checkpoint") from exc

    def fitted_at(self, k: int) -> np.ndarray:
        return self.fitted[self._index(k)]

    def beta_at(self, k: int) -> np.ndarray:
        return self.betas[self._index(k)]

    def trace_at(self, k: int) -> float:
        if self.traces is None:
            raise TraceUnavailableError("trajectory was recorded without tr(S_k)")
        return float(self.traces[self._index(k)])

    def residual_norm_at(self, k: int) -> float:
        return float(self.residual_norms[k - 1])

    def bias_norm_at(self, k: int) -> float:
        return float(self.bias_norms[k - 1])


def effective_matrix(smoother: LinearSmoother, variant: Variant) -> np.ndarray:
    """``S`` for the plain recursion, ``S S^T`` for the symmetrized one."""
    if variant == "symmetrized":
        s = smoother.matrix
        product = s @ s.T
        return 0.5 * (product + product.T)
    return smoother.matrix


def effective_eigenvalues(
    smoother: LinearSmoother, variant: Variant
) -> np.ndarray | None:
    """Eigenvalues of ``S_eff`` when it is similar to a symmetric matrix."""
    if variant == "symmetrized":
        return linalg.eigvalsh(effective_matrix(smoother, variant))
    form = smoother.symmetric_form()
    if form is None:
        return None
    return linalg.eigvalsh(form[0])


class _TraceTracker:
    """Produces ``tr(I - (I - mu S_eff)^k)`` at requested k."""

    def __init__(
        self, smoother: LinearSmoother, s_eff: np.ndarray, config: BoostConfig
    ):
        self._mu = config.mu
        self._eigs = effective_eigenvalues(smoother, config.variant)
        self._power: np.ndarray | None = None
        self._s_eff = s_eff
        self.available = self._eigs is not None
        if not self.available and smoother.n <= get_settings().trace_dense_limit:
            self._power = np.eye(smoother.n)
            self.available = True

    def step(self) -> None:
        if self._power is not None:
            self._power -= self._mu * (self._s_eff @ self._power)

    def value(self, k: int) -> float:
        if self._eigs is not None:
            return float(np.sum(1.0 - (1.0 - self._mu * self._eigs) ** k))
        return float(self._power.shape[0] - np.trace(self._power))


def run_boost(
    smoother: LinearSmoother, y: np.ndarray, config: BoostConfig | None = None
) -> BoostTrajectory:
    """Run the bias-correction recursion for k = 1..M."""
    config = config or BoostConfig()
    y = np.asarray(y, dtype=float)
    if y.shape != (smoother.n,):
        raise InputError(f"y has shape {y.shape}, expected ({smoother.n},)")
    if not np.all(np.isfinite(y)):
        raise InputError("y contains non-finite values")

    mu = config.mu
    guard = config.guard
    s_eff = effective_matrix(smoother, config.variant)
    checkpoints = config.resolved_checkpoints()
    wanted = set(checkpoints)
    tracker = _TraceTracker(smoother, s_eff, config) if config.track_trace else None
    if tracker is not None and not tracker.available:
        logger.info(
            "tr(S_k) unavailable for %s with n=%d", smoother.spec.label, smoother.n
        )
        tracker = None

    m = config.max_iterations
    residual_norms = np.empty(m)
    bias_norms = np.empty(m)
    betas: list[np.ndarray] = []
    fits: list[np.ndarray] = []
    traces: list[float] = []
    recorded: list[int] = []

    y_norm = float(linalg.norm(y))
    beta = y.copy()
    residual = y.copy()
    fitted = np.zeros_like(y)
    diverged_at: int | None = None
    divergence_ratio: float | None = None
    completed = 0

    for k in range(1, m + 1):
        correction = s_eff @ residual
        fitted += mu * correction
        residual -= mu * correction
        r_norm = float(linalg.norm(residual))
        if not np.isfinite(r_norm) or r_norm > guard * y_norm:
            diverged_at = k
            ratio = r_norm / y_norm if y_norm > 0 else float("inf")
            divergence_ratio = ratio
            logger.warning(
                "boosting %s diverged at k=%d (|R_k|/|y|=%.3e)",
                smoother.spec.label,
                k,
                ratio,
            )
            if config.raise_on_divergence:
                raise DivergenceDetected(k, ratio)
            break

        residual_norms[k - 1] = r_norm
        bias_norms[k - 1] = float(linalg.norm(correction))
        if tracker is not None:
            tracker.step()
        if k in wanted:
            recorded.append(k)
            betas.append(beta.copy())
            fits.append(fitted.copy())
            if tracker is not None:
                traces.append(tracker.value(k))
        beta += residual
        completed = k

    n = smoother.n
    return BoostTrajectory(
        checkpoints=tuple(recorded),
        betas=np.array(betas).reshape(len(recorded), n),
        fitted=np.array(fits).reshape(len(recorded), n),
        traces=np.array(traces) if tracker is not None else None,
        residual_norms=residual_norms[:completed].copy(),
        bias_norms=bias_norms[:completed].copy(),
        mu=mu,
        variant=config.variant,
        y_norm=y_norm,
        diverged=diverged_at is not None,
        diverged_at=diverged_at,
        divergence_ratio=divergence_ratio,
    )


def _query_weights(
    trajectory: BoostTrajectory, smoother: LinearSmoother, xs: np.ndarray
) -> np.ndarray:
    weights = smoother.weights_matrix(xs)
    if trajectory.variant == "symmetrized":
        weights = weights @ smoother.matrix.T
    return weights


def predict_many(
    trajectory: BoostTrajectory, smoother: LinearSmoother, xs: np.ndarray, k: int
) -> np.ndarray:
    """``m_k(x) = mu * S_eff(x)^T beta_k`` for each query point."""
    weights = _query_weights(trajectory, smoother, xs)
    return trajectory.mu * (weights @ trajectory.beta_at(k))


def predict_at(
    trajectory: BoostTrajectory, smoother: LinearSmoother, x: float, k: int
) -> float:
    return float(predict_many(trajectory, smoother, np.array([x]), k)[0])
