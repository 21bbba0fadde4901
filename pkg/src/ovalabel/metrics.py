"""Run reporting: per-iteration contribution, training durations, aggregates.

Emitted artifacts (all CSV, LF endings, UTF-8):

* report CSV, header
  ``dataset,samples,classes,model_contribution,train_minutes,total_minutes,balancing``
  with one data row. Percent and minutes use 2 decimals; balancing is
  ``true``/``false``.
* ``<stem>_iterations.csv``, header
  ``iteration,kind,batch_len,correct_by_model,corrected_by_user`` where kind
  is ``bootstrap`` (user labels everything) or ``bulk``.
* ``<stem>_trainings.csv``, header ``event,duration_seconds,classes`` with
  durations at 6 decimals and class labels sorted and joined by ``;``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

REPORT_COLUMNS = (
    "dataset",
    "samples",
    "classes",
    "model_contribution",
    "train_minutes",
    "total_minutes",
    "balancing",
)

ITERATION_COLUMNS = ("iteration", "kind", "batch_len", "correct_by_model", "corrected_by_user")
TRAINING_COLUMNS = ("event", "duration_seconds", "classes")


@dataclass
class IterationRecord:
    iteration: int
    batch_len: int
    correct_by_model: int
    corrected_by_user: int
    kind: str = "bulk"


@dataclass
class TrainingRecord:
    event_index: int
    duration_seconds: float
    classes_trained: set[str]


@dataclass
class Report:
    dataset_name: str
    sample_count: int
    class_count: int
    balancing: bool
    iteration_series: list[IterationRecord] = field(default_factory=list)
    training_series: list[TrainingRecord] = field(default_factory=list)
    model_contribution_percent: float = 0.0
    training_minutes: float = 0.0
    total_minutes: float = 0.0
    finalized: bool = False


def record_iteration(
    report: Report, batch_len: int, corrections_count: int, kind: str = "bulk"
) -> Report:
    """Append one iteration: the model labelled whatever the user did not correct."""
    if corrections_count < 0 or corrections_count > batch_len:
        raise ValueError(
            f"corrections_count {corrections_count} outside [0, {batch_len}]"
        )
    report.iteration_series.append(
        IterationRecord(
            iteration=len(report.iteration_series) + 1,
            batch_len=batch_len,
            correct_by_model=batch_len - corrections_count,
            corrected_by_user=corrections_count,
            kind=kind,
        )
    )
    return report


def record_training(
    report: Report, duration_seconds: float, classes_trained: set[str]
) -> Report:
    report.training_series.append(
        TrainingRecord(
            event_index=len(report.training_series) + 1,
            duration_seconds=duration_seconds,
            classes_trained=set(classes_trained),
        )
    )
    return report


def running_contribution_percent(report: Report) -> float:
    """100 * (model-labelled samples) / (all labelled samples) so far."""
    total = sum(r.batch_len for r in report.iteration_series)
    if total == 0:
        return 0.0
    correct = sum(r.correct_by_model for r in report.iteration_series)
    return 100.0 * correct / total


def finalize(report: Report, total_seconds: float | None = None) -> Report:
    """Compute the aggregate row. total_seconds defaults to training time only."""
    if not report.iteration_series:
        raise RuntimeError("cannot finalize a report with no iterations recorded")
    report.model_contribution_percent = running_contribution_percent(report)
    training_seconds = sum(r.duration_seconds for r in report.training_series)
    report.training_minutes = training_seconds / 60.0
    report.total_minutes = (
        total_seconds / 60.0 if total_seconds is not None else report.training_minutes
    )
    report.finalized = True
    return report


def companion_paths(path: str | Path) -> tuple[Path, Path]:
    path = Path(path)
    return (
        path.with_name(path.stem + "_iterations.csv"),
        path.with_name(path.stem + "_trainings.csv"),
    )


def emit_report(report: Report, path: str | Path) -> Path:
    """Write the report CSV plus the two series CSVs next to it."""
    if not report.finalized:
        raise RuntimeError("finalize the report before emitting it")
    path = Path(path)
    iterations_path, trainings_path = companion_paths(path)

    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerow(
            [
                report.dataset_name,
                report.sample_count,
                report.class_count,
                f"{report.model_contribution_percent:.2f}",
                f"{report.training_minutes:.2f}",
                f"{report.total_minutes:.2f}",
                "true" if report.balancing else "false",
            ]
        )

    with iterations_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ITERATION_COLUMNS)
        for rec in report.iteration_series:
            writer.writerow(
                [rec.iteration, rec.kind, rec.batch_len, rec.correct_by_model, rec.corrected_by_user]
            )

    with trainings_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAINING_COLUMNS)
        for rec in report.training_series:
            writer.writerow(
                [
                    rec.event_index,
                    f"{rec.duration_seconds:.6f}",
                    ";".join(sorted(rec.classes_trained)),
                ]
            )

    return path
