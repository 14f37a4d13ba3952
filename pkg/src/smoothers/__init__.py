"""Linear smoothers: kernel, k-NN, smoothing spline and bin averages."""

from .core import (
    DesignSample,
    KernelSpec,
    LinearSmoother,
    SmootherSpec,
    build_smoother,
    solve_parameter_for_df,
    weights_at,
)
from .io import read_sample_csv, sample_from_records, write_fitted_csv
from .kernels import (
    KERNEL_FAMILIES,
    kernel_is_positive_definite,
    kernel_value,
    scaled_kernel,
)

__all__ = [
    "KERNEL_FAMILIES",
    "DesignSample",
    "KernelSpec",
    "LinearSmoother",
    "SmootherSpec",
    "build_smoother",
    "kernel_is_positive_definite",
    "kernel_value",
    "read_sample_csv",
    "sample_from_records",
    "scaled_kernel",
    "solve_parameter_for_df",
    "weights_at",
    "write_fitted_csv",
]
