"""Exception hierarchy shared by every package."""

from __future__ import annotations


class BiasBoostError(RuntimeError):
    """Base class for library failures."""


class InputError(BiasBoostError, ValueError):
    """Raised when input data, specs or configs are malformed."""


class ConfigurationError(InputError):
    """Raised when environment settings cannot be parsed."""


class ConstructionError(BiasBoostError):
    """Raised when a numerical object cannot be built or evaluated."""


class KernelSupportError(ConstructionError):
    """All kernel weights vanish for some evaluation point."""


class DegenerateDesignError(ConstructionError):
    """The design makes a smoothing system singular (e.g. duplicate x)."""


class TraceUnavailableError(ConstructionError):
    """A plug-in criterion needs tr(S_k) but the trajectory has none."""


class DegenerateCriterionError(ConstructionError):
    """No candidate iteration leaves a finite criterion value."""


class NotApplicableError(ConstructionError):
    """The requested diagnostic does not apply to this kernel family."""


class DivergenceDetected(BiasBoostError):
    """Residual norms crossed the divergence guard."""

    def __init__(self, k: int, ratio: float):
        super().__init__(f"boosting diverged at k={k} (|R_k|/|y|={ratio:.3e})")
        self.k = k
        self.ratio = ratio


__all__ = [
    "BiasBoostError",
    "ConfigurationError",
    "ConstructionError",
    "DegenerateCriterionError",
    "DegenerateDesignError",
    "DivergenceDetected",
    "InputError",
    "KernelSupportError",
    "NotApplicableError",
    "TraceUnavailableError",
]
