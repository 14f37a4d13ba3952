"""Spectral diagnostics predicting whether boosting converges or diverges.

The recursion multiplies residuals by ``I - mu S_eff``.  When ``S`` is similar
to a symmetric matrix ``A`` (kernel, spline and bin smoothers, and every
symmetrized smoother) the relevant singular values are those of ``I - mu A``,
i.e. ``|1 - mu lambda_j|``.  k-NN smoothers have no such form and are judged
by the Euclidean SVD of ``I - mu S``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import linalg

from ..boosting.engine import Variant, effective_eigenvalues, effective_matrix
from ..config import get_settings
from ..errors import InputError, NotApplicableError
from ..models import SpectrumReportModel, WitnessModel
from ..smoothers.core import DesignSample, KernelSpec, LinearSmoother
from ..smoothers.kernels import kernel_is_positive_definite, scaled_kernel

logger = logging.getLogger(__name__)

Classification = Literal["convergent", "divergent", "boundary"]


@dataclass(frozen=True)
class MinorWitness:
    """A 3x3 principal minor of the kernel Gram matrix with negative determinant."""

    indices: tuple[int, int, int]
    determinant: float
    points: tuple[float, float, float]

    def to_model(self) -> WitnessModel:
        return WitnessModel(
            indices=list(self.indices),
            determinant=self.determinant,
            points=list(self.points),
        )


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    singular_values: np.ndarray
    symmetric_equivalent_eigenvalues: np.ndarray | None
    max_singular: float
    euclidean_max_singular: float
    spectral_radius: float
    classification: Classification
    witness: MinorWitness | None
    mu: float
    variant: Variant
    smoother_label: str

    def to_model(self, top: int = 20) -> SpectrumReportModel:
        eigs = self.symmetric_equivalent_eigenvalues
        return SpectrumReportModel(
            smoother=self.smoother_label,
            mu=self.mu,
            variant=self.variant,
            max_singular=self.max_singular,
            euclidean_max_singular=self.euclidean_max_singular,
            spectral_radius=self.spectral_radius,
            classification=self.classification,
            singular_values=[float(v) for v in self.singular_values[:top]],
            symmetric_equivalent_eigenvalues=(
                None if eigs is None else [float(v) for v in eigs]
            ),
            witness=None if self.witness is None else self.witness.to_model(),
        )


def classify(max_singular: float, tol: float | None = None) -> Classification:
    tol = get_settings().boundary_tol if tol is None else tol
    if max_singular > 1.0 + tol:
        return "divergent"
    if abs(max_singular - 1.0) <= tol:
        return "boundary"
    return "convergent"


def analyze(
    smoother: LinearSmoother,
    mu: float = 1.0,
    variant: Variant = "plain",
    *,
    tol: float | None = None,
) -> SpectrumReport:
    """Singular values of ``I - mu S_eff`` and the resulting classification."""
    if not 0.0 < mu <= 1.0:
        raise InputError(f"mu must lie in (0, 1], got {mu}")
    n = smoother.n
    step = np.eye(n) - mu * effective_matrix(smoother, variant)
    euclidean = linalg.svdvals(step)

    eigs = effective_eigenvalues(smoother, variant)
    if eigs is not None:
        eigs = np.sort(eigs)[::-1]
        singular = np.sort(np.abs(1.0 - mu * eigs))[::-1]
        radius = float(singular[0])
    else:
        singular = euclidean
        radius = float(np.max(np.abs(linalg.eigvals(step))))

    max_singular = float(singular[0])
    witness = None
    spec = smoother.spec
    if (
        variant == "plain"
        and spec.kind == "kernel"
        and not kernel_is_positive_definite(spec.kernel.family)
    ):
        witness = principal_minor_witness(smoother.sample, spec.kernel)

    report = SpectrumReport(
        singular_values=singular,
        symmetric_equivalent_eigenvalues=eigs,
        max_singular=max_singular,
        euclidean_max_singular=float(euclidean[0]),
        spectral_radius=radius,
        classification=classify(max_singular, tol),
        witness=witness,
        mu=mu,
        variant=variant,
        smoother_label=spec.label,
    )
    logger.debug(
        "%s (%s, mu=%g): max singular %.6f -> %s",
        spec.label,
        variant,
        mu,
        max_singular,
        report.classification,
    )
    return report


def _minor(xs: np.ndarray, kernel: KernelSpec) -> float:
    gram = scaled_kernel(kernel.family, xs[:, None] - xs[None, :], kernel.bandwidth)
    return float(linalg.det(gram))


def _witness(
    order: np.ndarray, xs: np.ndarray, positions: tuple[int, int, int], det: float
) -> MinorWitness:
    originals = order[list(positions)]
    ranked = np.argsort(originals)
    return MinorWitness(
        indices=tuple(int(originals[i]) for i in ranked),
        determinant=det,
        points=tuple(float(xs[positions[i]]) for i in ranked),
    )


def principal_minor_witness(
    sample: DesignSample, kernel: KernelSpec
) -> MinorWitness | None:
    """First design triple whose Gram minor ``det(K_h[3])`` is negative."""
    family = kernel.family
    if kernel_is_positive_definite(family):
        raise NotApplicableError(
            f"{family} kernel is positive definite; no negative minor exists"
        )
    h = kernel.bandwidth
    order = np.argsort(sample.x, kind="stable")
    xs = sample.x[order]
    n = xs.size

    if family == "uniform":
        # both gaps inside the window, outer pair outside it
        for i in range(n - 2):
            far = int(np.searchsorted(xs, xs[i] + h, side="right"))
            if far >= n:
                break
            for j in range(i + 1, far):
                if xs[j] - xs[i] >= h:
                    break
                if xs[far] - xs[j] < h:
                    det = _minor(xs[[i, j, far]], kernel)
                    if det < 0:
                        return _witness(order, xs, (i, j, far), det)
        return None

    distinct = np.flatnonzero(np.r_[True, np.diff(xs) > 0])
    for a in range(distinct.size - 2):
        trio = (int(distinct[a]), int(distinct[a + 1]), int(distinct[a + 2]))
        if xs[trio[2]] - xs[trio[0]] >= h:
            continue
        det = _minor(xs[list(trio)], kernel)
        if det < 0:
            return _witness(order, xs, trio, det)
    return None
