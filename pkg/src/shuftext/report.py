"""Canonical report serialization: JSON artifacts and plot-ready CSVs.

Serialization is a pure function of the report: keys are sorted, floats are
fixed at 4 decimals (2 for the headline percentage fields), and line endings
are plain ``\\n``, so re-emitting the same report yields byte-identical
files. Figures are emitted as data, not images; any plotting tool can
consume the box-plot CSVs directly.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

TOOLKIT_VERSION = "0.1.0"

EXPERIMENTS = ("shuftext", "exp1", "exp2")

_DISPLAY_FIELDS = {
    "original_test_accuracy",
    "same_prediction_pct",
    "shuffled_test_accuracy",
    "overall_test_accuracy",
    "generic_sentence_accuracy",
}

_METRIC_COLUMNS = {
    "shuftext": (
        ("Original Test Accuracy", "original_test_accuracy"),
        ("Percentage of Same Prediction", "same_prediction_pct"),
    ),
    "exp1": (
        ("Original Test Accuracy", "original_test_accuracy"),
        ("Shuffled Test Accuracy", "shuffled_test_accuracy"),
        ("Overall Test Accuracy", "overall_test_accuracy"),
    ),
    "exp2": (
        ("Original Test Accuracy", "original_test_accuracy"),
        ("Generic Sentence Accuracy", "generic_sentence_accuracy"),
        ("Percentage of Same Prediction", "same_prediction_pct"),
    ),
}

BOXPLOT_COLUMNS = (
    "panel",
    "class_label",
    "n",
    "median",
    "q1",
    "q3",
    "lower_whisker",
    "upper_whisker",
    "n_outliers",
)


class ReportError(RuntimeError):
    """Raised when a report cannot be serialized or written."""


@dataclass(frozen=True)
class RunManifest:
    """Provenance block embedded in every report artifact."""

    toolkit_version: str
    seed: int
    dataset: str
    input_digests: dict[str, str]
    model: dict
    created_utc: str | None


def file_digest(path: str | Path) -> str:
    """SHA-256 hex digest of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def build_manifest(report, input_paths: dict[str, str | Path]) -> RunManifest:
    """Manifest for a finished run; digests cover every input file.

    The creation timestamp honors the SOURCE_DATE_EPOCH convention so that
    repeated runs with identical inputs produce byte-identical artifacts; it
    is null when the variable is unset.
    """
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    created = (
        datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
        if epoch
        else None
    )
    return RunManifest(
        toolkit_version=TOOLKIT_VERSION,
        seed=report.seed,
        dataset=report.dataset,
        input_digests={role: file_digest(path) for role, path in sorted(input_paths.items())},
        model=report.model,
        created_utc=created,
    )


def to_jsonable(value, key: str | None = None):
    """Plain JSON types with canonical float rounding."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return round(value, 2 if key in _DISPLAY_FIELDS else 4)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            f.name: to_jsonable(getattr(value, f.name), f.name)
            for f in dataclasses.fields(value)
        }
    if isinstance(value, dict):
        return {str(k): to_jsonable(v, str(k)) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v, key) for v in value]
    raise ReportError(f"cannot serialize value of type {type(value).__name__}")


def emit_json(report, path: str | Path) -> None:
    """Write the canonical JSON artifact for a report."""
    payload = to_jsonable(report)
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc


def _format_metric(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def summary_rows(reports: Sequence, experiment: str) -> list[list[str]]:
    """Header plus one row per report, matching the experiment's columns."""
    if experiment not in _METRIC_COLUMNS:
        raise ValueError(f"unknown experiment {experiment!r}")
    for report in reports:
        if report.experiment != experiment:
            raise ValueError(
                f"mixed experiment types: expected {experiment!r}, "
                f"got a {report.experiment!r} report"
            )
    columns = _METRIC_COLUMNS[experiment]
    rows = [["Model", "Dataset", *(name for name, _ in columns)]]
    for report in reports:
        rows.append(
            [
                report.model.get("kind", "?"),
                report.dataset,
                *(_format_metric(getattr(report, attr)) for _, attr in columns),
            ]
        )
    return rows


def _write_csv(rows: Sequence[Sequence[str]], path: str | Path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows)
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc


def emit_table_csv(reports: Sequence, experiment: str, path: str | Path) -> None:
    """One summary row per report; header only when the list is empty."""
    _write_csv(summary_rows(reports, experiment), path)


def _check_boxplot_chain(stats) -> None:
    chain = (0.0, stats.lower_whisker, stats.q1, stats.median, stats.q3, stats.upper_whisker, 1.0)
    if any(a > b for a, b in zip(chain, chain[1:])):
        raise ReportError(
            f"box-plot ordering violated for class {stats.class_label!r}: {stats}"
        )


def emit_boxplot_data(report, path: str | Path) -> None:
    """Plot-ready CSV: one row per (panel, predicted class)."""
    rows: list[list[str]] = [list(BOXPLOT_COLUMNS)]
    for panel, stats_list in report.boxplot_panels():
        for stats in stats_list:
            _check_boxplot_chain(stats)
            rows.append(
                [
                    panel,
                    stats.class_label,
                    str(stats.n),
                    f"{stats.median:.4f}",
                    f"{stats.q1:.4f}",
                    f"{stats.q3:.4f}",
                    f"{stats.lower_whisker:.4f}",
                    f"{stats.upper_whisker:.4f}",
                    str(stats.n_outliers),
                ]
            )
    _write_csv(rows, path)
