"""CSV tables of simulation summaries."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from pathlib import Path

from .harness import SimSummary

RECORD_FIELDS = [
    "function_id",
    "n",
    "error_law",
    "replication",
    "pilot_index",
    "pilot",
    "parameter",
    "rule",
    "k_hat",
    "k_opt",
    "log_ratio",
    "sse_k_hat",
    "sse_k_opt",
    "mse_k_hat",
    "mse_k_opt",
    "diverged",
    "failure",
]


def _fmt(value: object) -> object:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def table_rows(summaries: Sequence[SimSummary]) -> list[dict[str, object]]:
    """One row per (error law, rule) with median k-hat and MSE per pilot."""
    rows = []
    for summary in summaries:
        scenario = summary.scenario
        for rule in scenario.rules:
            row: dict[str, object] = {
                "function_id": scenario.function_id,
                "n": scenario.n,
                "error_law": scenario.error_law,
                "rule": rule.label,
            }
            for i in range(1, len(scenario.pilots) + 1):
                cell = summary.cell(i, rule.label)
                row[f"k_hat_{i}"] = cell.median_k_hat
                row[f"mse_{i}"] = cell.median_mse
                row[f"k_opt_{i}"] = cell.median_k_opt
                row[f"mse_opt_{i}"] = cell.median_mse_opt
            row["comparison_mse"] = summary.median_comparison_mse
            row["failures"] = summary.failure_count
            rows.append(row)
    return rows


def write_table_csv(summaries: Sequence[SimSummary], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = table_rows(summaries)
    fieldnames: list[str] = []
    for row in rows:
        fieldnames.extend(key for key in row if key not in fieldnames)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _fmt(value) for key, value in row.items()})
    return path


def write_records_csv(summaries: Sequence[SimSummary], path: Path | str) -> Path:
    """Long format: one row per replication x pilot x rule."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=RECORD_FIELDS)
        writer.writeheader()
        for summary in summaries:
            scenario = summary.scenario
            for record in summary.records():
                writer.writerow(
                    {
                        "function_id": scenario.function_id,
                        "n": scenario.n,
                        "error_law": scenario.error_law,
                        "replication": record.replication,
                        "pilot_index": record.pilot_index,
                        "pilot": record.pilot,
                        "parameter": _fmt(record.parameter),
                        "rule": record.rule,
                        "k_hat": _fmt(record.k_hat),
                        "k_opt": _fmt(record.k_opt),
                        "log_ratio": _fmt(record.log_ratio),
                        "sse_k_hat": _fmt(record.sse_k_hat),
                        "sse_k_opt": _fmt(record.sse_k_opt),
                        "mse_k_hat": _fmt(record.mse_k_hat),
                        "mse_k_opt": _fmt(record.mse_k_opt),
                        "diverged": int(record.diverged),
                        "failure": record.failure or "",
                    }
                )
    return path
