"""Score tables and re-scoring of exported trajectories."""

from __future__ import annotations

import csv
from collections.abc import Mapping
from pathlib import Path

from ..boosting.export import read_trajectory_csv, trajectory_arrays
from ..errors import InputError, TraceUnavailableError
from .rules import StoppingRule, plugin_scores
from .selection import SelectionResult, result_from_scores


def write_scores_csv(results: Mapping[str, SelectionResult], path: Path | str) -> Path:
    """``k`` plus one criterion column per rule label; blanks where not scored."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = list(results)
    ks = sorted({k for result in results.values() for k in result.scores})
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=["k", *labels])
        writer.writeheader()
        for k in ks:
            row: dict[str, object] = {"k": k}
            for label in labels:
                score = results[label].scores.get(k)
                row[label] = "" if score is None else repr(score)
            writer.writerow(row)
    return path


def rescore_trajectory_csv(
    path: Path | str, n: int, rule: StoppingRule
) -> SelectionResult:
    """Recompute a plug-in selection from an exported trajectory CSV."""
    if not rule.is_plugin:
        raise InputError(f"{rule.label} needs the data, not just the trajectory")
    ks, norms, traces = trajectory_arrays(read_trajectory_csv(path))
    if traces is None:
        raise TraceUnavailableError(f"{path} carries no trace column values")
    scores = plugin_scores(norms, traces, n, rule.kind)
    return result_from_scores(ks, scores, norms, n, rule)
