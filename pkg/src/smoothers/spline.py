"""Cubic smoothing spline in Reinsch value-space form.

The penalised least-squares problem ``min |y - f|^2 + lam * int f''^2`` over
natural cubic splines with knots at every design point has the closed form
``f = (I + lam * Q R^{-1} Q^T)^{-1} y``, where ``Q`` (n x n-2) holds second
divided differences and ``R`` (n-2 x n-2) is the tridiagonal Gram matrix of
the B-spline second derivatives.  This is the same operator as
``N (N^T N + lam * Omega)^{-1} N^T``, built without forming the basis.

The operator is assembled from the Demmler-Reinsch eigenbasis of ``K`` with
the linear functions split off exactly: ``S`` reproduces them and its
spectrum lies in [0, 1].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.interpolate import CubicSpline

from ..errors import DegenerateDesignError

logger = logging.getLogger(__name__)


def _sorted_knots(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(x, kind="stable")
    knots = x[order]
    gaps = np.diff(knots)
    if np.any(gaps <= 0):
        dup = knots[1:][gaps <= 0][0]
        raise DegenerateDesignError(
            f"duplicate design value x={dup:.6g} makes the spline system singular"
        )
    return order, knots


def _second_differences(knots: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = knots.size
    h = np.diff(knots)
    inner = np.arange(n - 2)

    q = np.zeros((n, n - 2))
    q[inner, inner] = 1.0 / h[:-1]
    q[inner + 1, inner] = -1.0 / h[:-1] - 1.0 / h[1:]
    q[inner + 2, inner] = 1.0 / h[1:]

    r = np.diag((h[:-1] + h[1:]) / 3.0)
    if n > 3:
        off = h[1:-1] / 6.0
        r[inner[:-1], inner[:-1] + 1] = off
        r[inner[:-1] + 1, inner[:-1]] = off
    return q, r


@dataclass(frozen=True)
class DemmlerReinsch:
    """Orthonormal eigenbasis of the roughness penalty.

    ``basis`` columns are in the caller's ordering of ``x``; the first two
    span the linear functions and carry ``kappa == 0`` exactly.
    """

    basis: np.ndarray
    kappa: np.ndarray

    def operator(self, lam: float) -> np.ndarray:
        shrink = 1.0 / (1.0 + lam * self.kappa)
        s = (self.basis * shrink[None, :]) @ self.basis.T
        return 0.5 * (s + s.T)

    def trace(self, lam: float) -> float:
        return spline_trace(self.kappa, lam)


def demmler_reinsch(x: np.ndarray) -> DemmlerReinsch:
    """Eigen-decompose ``Q R^{-1} Q^T`` with the linear null space split off."""
    order, knots = _sorted_knots(np.asarray(x, dtype=float))
    n = knots.size
    design = np.column_stack([np.ones(n), knots - knots.mean()])
    frame, _ = linalg.qr(design)
    linear, complement = frame[:, :2], frame[:, 2:]

    kappa = np.zeros(n)
    rotated = np.empty((n, n))
    rotated[:, :2] = linear
    q, r = _second_differences(knots)
    try:
        chol = linalg.cholesky(r, lower=True)
    except linalg.LinAlgError as exc:
        raise DegenerateDesignError("spline Gram matrix is singular") from exc
    # K on the complement is G^T G; the SVD of G keeps small kappa accurate
    g = linalg.solve_triangular(chol, q.T @ complement, lower=True)
    _, sigma, vt = linalg.svd(g)
    kappa[2:] = sigma**2
    rotated[:, 2:] = complement @ vt.T

    basis = np.empty_like(rotated)
    basis[order] = rotated
    return DemmlerReinsch(basis=basis, kappa=kappa)


def spline_matrix(x: np.ndarray, lam: float) -> np.ndarray:
    """Dense smoothing-spline operator ``S(lam)`` in the original ordering."""
    return demmler_reinsch(x).operator(lam)


def penalty_eigenvalues(x: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``Q R^{-1} Q^T``; the first two are zero (linear fits)."""
    return demmler_reinsch(x).kappa


def spline_trace(kappa: np.ndarray, lam: float) -> float:
    return float(np.sum(1.0 / (1.0 + lam * kappa)))


class SplineWeightRule:
    """Out-of-sample weights: the natural interpolant of the rows of ``S``.

    Beyond the data range the natural spline continues linearly.
    """

    def __init__(self, x: np.ndarray, matrix: np.ndarray):
        order, knots = _sorted_knots(np.asarray(x, dtype=float))
        self._lo = knots[0]
        self._hi = knots[-1]
        self._interp = CubicSpline(knots, matrix[order], bc_type="natural", axis=0)
        self._slope = self._interp.derivative()

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        inside = np.clip(xs, self._lo, self._hi)
        weights = self._interp(inside)
        below = xs < self._lo
        above = xs > self._hi
        if below.any():
            weights[below] += (xs[below] - self._lo)[:, None] * self._slope(self._lo)
        if above.any():
            weights[above] += (xs[above] - self._hi)[:, None] * self._slope(self._hi)
        return weights
