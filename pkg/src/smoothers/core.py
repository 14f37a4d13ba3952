"""Linear smoothers as explicit smoothing matrices."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import optimize

from ..errors import InputError, KernelSupportError
from .kernels import KERNEL_FAMILIES, scaled_kernel
from .spline import (
    SplineWeightRule,
    penalty_eigenvalues,
    spline_matrix,
    spline_trace,
)

logger = logging.getLogger(__name__)

SmootherKind = Literal["kernel", "knn", "spline", "bin"]
SMOOTHER_KINDS: tuple[SmootherKind, ...] = ("kernel", "knn", "spline", "bin")

WeightRule = Callable[[np.ndarray], np.ndarray]


def _frozen_vector(values: object, name: str) -> np.ndarray:
    try:
        array = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} is not numeric") from exc
    if array.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InputError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DesignSample:
    """Univariate regression sample ``(X_i, Y_i)``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = _frozen_vector(self.x, "x")
        y = _frozen_vector(self.y, "y")
        if x.size != y.size:
            raise InputError(f"x and y lengths differ ({x.size} != {y.size})")
        if x.size < 3:
            raise InputError(f"a sample needs at least 3 observations, got {x.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.x.size)

    def subset(self, indices: np.ndarray) -> DesignSample:
        indices = np.asarray(indices, dtype=int)
        return DesignSample(self.x[indices], self.y[indices])

    def with_response(self, y: np.ndarray) -> DesignSample:
        return DesignSample(self.x, y)


@dataclass(frozen=True)
class KernelSpec:
    family: str
    bandwidth: float

    def __post_init__(self) -> None:
        if self.family not in KERNEL_FAMILIES:
            raise InputError(
                f"unknown kernel family {self.family!r}; expected {KERNEL_FAMILIES}"
            )
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise InputError(f"bandwidth must be positive, got {self.bandwidth}")


@dataclass(frozen=True)
class SmootherSpec:
    """Which smoother to build and its tuning parameter."""

    kind: SmootherKind
    kernel: KernelSpec | None = None
    neighbors: int | None = None
    lam: float | None = None
    num_bins: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in SMOOTHER_KINDS:
            raise InputError(f"unknown smoother kind {self.kind!r}")
        if self.kind == "kernel" and self.kernel is None:
            raise InputError("kernel smoother needs a KernelSpec")
        if self.kind == "knn" and (self.neighbors is None or self.neighbors < 1):
            raise InputError(f"knn needs neighbors >= 1, got {self.neighbors}")
        if self.kind == "spline" and not (self.lam is not None and self.lam > 0):
            raise InputError(f"spline needs lambda > 0, got {self.lam}")
        if self.kind == "bin" and (self.num_bins is None or self.num_bins < 1):
            raise InputError(f"bin smoother needs num_bins >= 1, got {self.num_bins}")

    @classmethod
    def for_kernel(cls, family: str, bandwidth: float) -> SmootherSpec:
        return cls(kind="kernel", kernel=KernelSpec(family, float(bandwidth)))

    @classmethod
    def for_knn(cls, neighbors: int) -> SmootherSpec:
        return cls(kind="knn", neighbors=int(neighbors))

    @classmethod
    def for_spline(cls, lam: float) -> SmootherSpec:
        return cls(kind="spline", lam=float(lam))

    @classmethod
    def for_bin(cls, num_bins: int) -> SmootherSpec:
        return cls(kind="bin", num_bins=int(num_bins))

    @property
    def parameter(self) -> float:
        if self.kind == "kernel":
            return self.kernel.bandwidth
        if self.kind == "knn":
            return float(self.neighbors)
        if self.kind == "spline":
            return self.lam
        return float(self.num_bins)

    @property
    def label(self) -> str:
        if self.kind == "kernel":
            return f"kernel[{self.kernel.family},h={self.kernel.bandwidth:.6g}]"
        if self.kind == "knn":
            return f"knn[K={self.neighbors}]"
        if self.kind == "spline":
            return f"spline[lambda={self.lam:.6g}]"
        return f"bin[bins={self.num_bins}]"


@dataclass(frozen=True, eq=False)
class LinearSmoother:
    """Smoothing matrix ``S`` bound to the sample it was built from."""

    matrix: np.ndarray
    sample: DesignSample
    spec: SmootherSpec
    weight_rule: WeightRule = field(repr=False)
    symmetric: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.sample.n

    def weights_matrix(self, xs: np.ndarray) -> np.ndarray:
        """Weight rows ``S(x)`` for every query point, shape ``(len(xs), n)``."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        if not np.all(np.isfinite(xs)):
            raise InputError("query points must be finite")
        return self.weight_rule(xs)

    def weights_at(self, x: float) -> np.ndarray:
        return self.weights_matrix(np.array([x]))[0]

    def symmetric_form(self) -> tuple[np.ndarray, np.ndarray] | None:
        """``(A, d_sqrt)`` with ``S = diag(d_sqrt) A diag(d_sqrt)^-1``, A symmetric."""
        return self.symmetric

    def fit(self, y: np.ndarray | None = None) -> np.ndarray:
        y = self.sample.y if y is None else np.asarray(y, dtype=float)
        return self.matrix @ y

    def trace(self) -> float:
        return float(np.trace(self.matrix))


def weights_at(smoother: LinearSmoother, x: float) -> np.ndarray:
    return smoother.weights_at(x)


def _kernel_rule(sample: DesignSample, kernel: KernelSpec) -> WeightRule:
    def rule(xs: np.ndarray) -> np.ndarray:
        gram = scaled_kernel(
            kernel.family, xs[:, None] - sample.x[None, :], kernel.bandwidth
        )
        sums = gram.sum(axis=1)
        empty = np.flatnonzero(~(sums > 0))
        if empty.size:
            raise KernelSupportError(
                f"all {kernel.family} weights vanish at x={xs[empty[0]]:.6g} "
                f"(h={kernel.bandwidth:g})"
            )
        return gram / sums[:, None]

    return rule


def _knn_rule(sample: DesignSample, neighbors: int) -> WeightRule:
    def rule(xs: np.ndarray) -> np.ndarray:
        distance = np.abs(xs[:, None] - sample.x[None, :])
        # stable sort: equal distances keep ascending index order
        nearest = np.argsort(distance, axis=1, kind="stable")[:, :neighbors]
        weights = np.zeros_like(distance)
        np.put_along_axis(weights, nearest, 1.0 / neighbors, axis=1)
        return weights

    return rule


def _bin_rule(groups: list[np.ndarray], x: np.ndarray, n: int) -> WeightRule:
    lows = np.array([x[g].min() for g in groups])
    highs = np.array([x[g].max() for g in groups])
    cuts = 0.5 * (highs[:-1] + lows[1:])

    def rule(xs: np.ndarray) -> np.ndarray:
        which = np.searchsorted(cuts, xs, side="right")
        weights = np.zeros((xs.size, n))
        for row, b in enumerate(which):
            weights[row, groups[b]] = 1.0 / groups[b].size
        return weights

    return rule


def _build_kernel(sample: DesignSample, spec: SmootherSpec) -> LinearSmoother:
    kernel = spec.kernel
    gram = scaled_kernel(
        kernel.family, sample.x[:, None] - sample.x[None, :], kernel.bandwidth
    )
    sums = gram.sum(axis=1)
    if not np.all(sums > 0):
        raise KernelSupportError(
            f"a row of the {kernel.family} kernel matrix sums to zero "
            f"(h={kernel.bandwidth:g})"
        )
    d_sqrt = 1.0 / np.sqrt(sums)
    sym = d_sqrt[:, None] * gram * d_sqrt[None, :]
    sym = 0.5 * (sym + sym.T)
    matrix = gram / sums[:, None]
    return LinearSmoother(
        matrix=matrix,
        sample=sample,
        spec=spec,
        weight_rule=_kernel_rule(sample, kernel),
        symmetric=(sym, d_sqrt),
    )


def _build_knn(sample: DesignSample, spec: SmootherSpec) -> LinearSmoother:
    rule = _knn_rule(sample, spec.neighbors)
    return LinearSmoother(
        matrix=rule(sample.x), sample=sample, spec=spec, weight_rule=rule
    )


def _build_spline(sample: DesignSample, spec: SmootherSpec) -> LinearSmoother:
    matrix = spline_matrix(sample.x, spec.lam)
    return LinearSmoother(
        matrix=matrix,
        sample=sample,
        spec=spec,
        weight_rule=SplineWeightRule(sample.x, matrix),
        symmetric=(matrix, np.ones(sample.n)),
    )


def _bin_groups(x: np.ndarray, num_bins: int) -> list[np.ndarray]:
    """Equal-count bins over the sorted design; tied x values share a bin."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    sizes = [chunk.size for chunk in np.array_split(order, num_bins)]
    bounds: set[int] = set()
    for cut in np.cumsum(sizes)[:-1]:
        left = int(np.searchsorted(xs, xs[cut], side="left"))
        right = int(np.searchsorted(xs, xs[cut], side="right"))
        moved = left if cut - left <= right - cut else right
        if 0 < moved < xs.size:
            bounds.add(moved)
    groups = np.split(order, sorted(bounds))
    if len(groups) < num_bins:
        logger.debug("tied design values merged %d bins into %d", num_bins, len(groups))
    return groups


def _build_bin(sample: DesignSample, spec: SmootherSpec) -> LinearSmoother:
    groups = _bin_groups(sample.x, spec.num_bins)
    matrix = np.zeros((sample.n, sample.n))
    for group in groups:
        matrix[np.ix_(group, group)] = 1.0 / group.size
    return LinearSmoother(
        matrix=matrix,
        sample=sample,
        spec=spec,
        weight_rule=_bin_rule(groups, sample.x, sample.n),
        symmetric=(matrix, np.ones(sample.n)),
    )


_BUILDERS = {
    "kernel": _build_kernel,
    "knn": _build_knn,
    "spline": _build_spline,
    "bin": _build_bin,
}


def build_smoother(sample: DesignSample, spec: SmootherSpec) -> LinearSmoother:
    """Construct the smoothing matrix of ``spec`` on ``sample``."""
    if spec.kind == "knn" and spec.neighbors > sample.n:
        raise InputError(f"knn needs K <= n, got K={spec.neighbors} with n={sample.n}")
    if spec.kind == "bin" and spec.num_bins > sample.n:
        raise InputError(
            f"bin smoother needs num_bins <= n, got {spec.num_bins} with n={sample.n}"
        )
    smoother = _BUILDERS[spec.kind](sample, spec)
    smoother.matrix.setflags(write=False)
    logger.debug("built %s on n=%d (tr=%.4f)", spec.label, sample.n, smoother.trace())
    return smoother


def _kernel_trace(sample: DesignSample, family: str, bandwidth: float) -> float:
    gram = scaled_kernel(family, sample.x[:, None] - sample.x[None, :], bandwidth)
    return float(np.sum(np.diag(gram) / gram.sum(axis=1)))


def _solve_log(
    trace_of: Callable[[float], float], target: float, lo: float, hi: float
) -> float:
    f_lo = trace_of(np.exp(lo)) - target
    f_hi = trace_of(np.exp(hi)) - target
    if f_lo * f_hi > 0:
        raise InputError(
            f"target df {target:g} is outside the reachable range "
            f"[{min(f_lo, f_hi) + target:.4g}, {max(f_lo, f_hi) + target:.4g}]"
        )
    root = optimize.brentq(lambda t: trace_of(np.exp(t)) - target, lo, hi, xtol=1e-10)
    return float(np.exp(root))


def solve_parameter_for_df(
    sample: DesignSample,
    kind: SmootherKind,
    target_df: float,
    *,
    kernel: str = "gaussian",
) -> SmootherSpec:
    """Return the spec of ``kind`` whose ``tr(S)`` is closest to ``target_df``."""
    n = sample.n
    if not 1.0 < target_df < n:
        raise InputError(f"target df must lie in (1, {n}), got {target_df}")

    if kind == "knn":
        return SmootherSpec.for_knn(int(np.clip(round(n / target_df), 1, n)))
    if kind == "bin":
        return SmootherSpec.for_bin(int(np.clip(round(target_df), 1, n)))
    if kind == "spline":
        kappa = penalty_eigenvalues(sample.x)
        positive = kappa[kappa > 1e-12 * kappa.max()]
        lam = _solve_log(
            lambda lam: spline_trace(kappa, lam),
            target_df,
            np.log(1e-8 / positive.max()),
            np.log(1e8 / positive.min()),
        )
        return SmootherSpec.for_spline(lam)
    if kind == "kernel":
        gaps = np.diff(np.unique(sample.x))
        span = float(np.ptp(sample.x))
        lo = np.log(gaps.min() / 10.0) if gaps.size else np.log(1e-6)
        h = _solve_log(
            lambda h: _kernel_trace(sample, kernel, h),
            target_df,
            lo,
            np.log(100.0 * max(span, 1e-12)),
        )
        return SmootherSpec.for_kernel(kernel, h)
    raise InputError(f"unknown smoother kind {kind!r}")
