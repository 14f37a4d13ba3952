"""CSV ingestion and export for design samples."""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Mapping
from pathlib import Path

import numpy as np

from ..errors import InputError
from .core import DesignSample

logger = logging.getLogger(__name__)


def normalize_row(record: Mapping[str, object], line: int) -> tuple[float, float]:
    """Coerce one raw CSV row into an ``(x, y)`` pair.

    Header names are matched case-insensitively after stripping whitespace.
    """

    fields = {str(key).strip().lower(): value for key, value in record.items() if key}
    values = []
    for name in ("x", "y"):
        raw = fields.get(name)
        if raw is None or not str(raw).strip():
            raise InputError(f"line {line}: missing value for column {name!r}")
        try:
            values.append(float(str(raw).strip()))
        except ValueError as exc:
            raise InputError(f"line {line}: {name}={raw!r} is not numeric") from exc
    return values[0], values[1]


def sample_from_records(records: Iterable[Mapping[str, object]]) -> DesignSample:
    pairs = [normalize_row(record, line) for line, record in enumerate(records, 2)]
    if not pairs:
        raise InputError("sample has no observations")
    xs, ys = zip(*pairs, strict=True)
    return DesignSample(np.array(xs), np.array(ys))


def read_sample_csv(path: Path | str) -> DesignSample:
    """Read a ``x,y`` CSV file into a validated :class:`DesignSample`."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8-sig") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None:
                raise InputError(f"{path} is empty")
            header = {name.strip().lower() for name in reader.fieldnames if name}
            if not {"x", "y"} <= header:
                raise InputError(
                    f"{path} needs an 'x,y' header, got {reader.fieldnames}"
                )
            sample = sample_from_records(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except (UnicodeDecodeError, csv.Error) as exc:
        raise InputError(f"{path} is not a UTF-8 CSV file: {exc}") from exc
    logger.debug("read %d observations from %s", sample.n, path)
    return sample


def write_sample_csv(sample: DesignSample, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=["x", "y"])
        writer.writeheader()
        for x, y in zip(sample.x, sample.y, strict=True):
            writer.writerow({"x": repr(float(x)), "y": repr(float(y))})
    return path


def write_fitted_csv(
    sample: DesignSample, fitted: np.ndarray, path: Path | str
) -> Path:
    """Write ``x, y, fitted`` columns, one row per observation."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=["x", "y", "fitted"])
        writer.writeheader()
        for x, y, f in zip(sample.x, sample.y, fitted, strict=True):
            writer.writerow(
                {"x": repr(float(x)), "y": repr(float(y)), "fitted": repr(float(f))}
            )
    return path
