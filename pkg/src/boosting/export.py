"""CSV export of boosting trajectories."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InputError
from ..smoothers.core import DesignSample
from .engine import BoostTrajectory

TRAJECTORY_FIELDS = ["k", "residual_norm", "bias_norm", "trace"]


@dataclass(frozen=True)
class TrajectoryRow:
    k: int
    residual_norm: float
    bias_norm: float
    trace: float | None


def _num(value: float) -> str:
    # repr round-trips floats exactly
    return repr(float(value))


def write_trajectory_csv(trajectory: BoostTrajectory, path: Path | str) -> Path:
    """One row per checkpoint: ``k, residual_norm, bias_norm, trace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=TRAJECTORY_FIELDS)
        writer.writeheader()
        for i, k in enumerate(trajectory.checkpoints):
            writer.writerow(
                {
                    "k": k,
                    "residual_norm": _num(trajectory.residual_norm_at(k)),
                    "bias_norm": _num(trajectory.bias_norm_at(k)),
                    "trace": (
                        _num(trajectory.traces[i])
                        if trajectory.traces is not None
                        else ""
                    ),
                }
            )
    return path


def write_wide_csv(
    trajectory: BoostTrajectory, sample: DesignSample, path: Path | str
) -> Path:
    """``x`` then one ``fitted_<k>`` column per checkpoint, rows in sample order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [f"fitted_{k}" for k in trajectory.checkpoints]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", *columns])
        for i, x in enumerate(sample.x):
            writer.writerow([_num(x), *(_num(v) for v in trajectory.fitted[:, i])])
    return path


def read_trajectory_csv(path: Path | str) -> list[TrajectoryRow]:
    path = Path(path)
    rows: list[TrajectoryRow] = []
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            missing = set(TRAJECTORY_FIELDS) - set(reader.fieldnames or [])
            if missing:
                raise InputError(f"{path} lacks columns {sorted(missing)}")
            for line, record in enumerate(reader, 2):
                try:
                    trace = record["trace"].strip()
                    rows.append(
                        TrajectoryRow(
                            k=int(record["k"]),
                            residual_norm=float(record["residual_norm"]),
                            bias_norm=float(record["bias_norm"]),
                            trace=float(trace) if trace else None,
                        )
                    )
                except (TypeError, ValueError) as exc:
                    raise InputError(f"{path} line {line}: {exc}") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path} holds no trajectory rows")
    return rows


def trajectory_arrays(
    rows: list[TrajectoryRow],
) -> tuple[tuple[int, ...], np.ndarray, np.ndarray | None]:
    """``(ks, residual_norms, traces)`` from parsed rows; traces None if any blank."""
    ks = tuple(row.k for row in rows)
    norms = np.array([row.residual_norm for row in rows])
    if any(row.trace is None for row in rows):
        return ks, norms, None
    return ks, norms, np.array([row.trace for row in rows])
