"""Labelling session state machine.

A session walks a dataset through: a bootstrap round the user labels by
hand, repeated bulk-edit rounds the models pre-label and the user corrects,
a bounded buffer of model mistakes, and two triggers — buffer full (retrain
on the most confidently wrong samples per class) and too many mistakes in
one round (fall back to a fresh bootstrap).

All operations validate before they mutate: a call made in the wrong phase
or with bad arguments raises and leaves the state untouched. Each state has
a single writer; per-class models are independent and may be trained
concurrently by callers that want to, but this engine trains sequentially.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

from . import classifier, metrics
from .classifier import BinaryExample, ModelParams, TrainConfig, TrainStats
from .feature_store import Dataset, shuffled_ids
from .rng import derive_seed

SNAPSHOT_FORMAT = "ovalabel-session/1"


class SessionError(Exception):
    """Base class for session protocol violations."""


class ConfigurationError(SessionError):
    """Session cannot start with this dataset/config combination."""


class PhaseError(SessionError):
    """Operation invoked in a phase its precondition does not allow."""


class SessionValidationError(SessionError):
    """Label payload does not match what the session asked for."""


class Phase(str, Enum):
    BOOTSTRAP = "Bootstrap"
    BULK_EDIT = "BulkEdit"
    AWAIT_CORRECTIONS = "AwaitCorrections"
    DONE = "Done"


class SortDirection(str, Enum):
    HIGH_TO_LOW = "HighToLow"
    LOW_TO_HIGH = "LowToHigh"


class TriggerKind(str, Enum):
    NONE = "None"
    BUFFER_FULL = "BufferFull"
    TOO_MANY_MISTAKES = "TooManyMistakes"


@dataclass
class SessionConfig:
    bootstrap_size: int = 30
    batch_size: int = 30
    mistake_threshold: int = 15
    buffer_per_class: int = 20
    select_per_class: int = 10
    balancing: bool = True
    sort_direction: SortDirection = SortDirection.HIGH_TO_LOW
    train_config: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.sort_direction, str):
            self.sort_direction = SortDirection(self.sort_direction)
        for name in ("bootstrap_size", "batch_size", "mistake_threshold",
                     "buffer_per_class", "select_per_class"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.mistake_threshold >= self.batch_size:
            raise ConfigurationError("mistake_threshold must be below batch_size")
        if self.select_per_class > self.buffer_per_class:
            raise ConfigurationError("select_per_class cannot exceed buffer_per_class")


@dataclass
class BufferEntry:
    """One model mistake: what was predicted, how confidently, and the truth."""

    sample_id: str
    predicted_class: str
    predicted_confidence: float
    correct_class: str

    def __post_init__(self):
        if self.predicted_class == self.correct_class:
            raise ValueError("buffer entries must be mistakes")
        if not 0.0 <= self.predicted_confidence <= 1.0:
            raise ValueError("predicted_confidence outside [0, 1]")


@dataclass
class BatchEntry:
    sample_id: str
    predicted_class: str
    predicted_confidence: float


@dataclass
class BatchPrediction:
    entries: list[BatchEntry]
    iteration: int


@dataclass
class TriggerOutcome:
    """What a trigger evaluation decided.

    For BufferFull, retrained_classes are the classes actually retrained.
    For TooManyMistakes, they are the live classes slated for retraining
    once the fallback bootstrap labels arrive (the retraining itself runs
    in submit_bootstrap_labels).
    """

    kind: TriggerKind
    retrained_classes: set[str]


@dataclass(eq=False)
class SessionState:
    dataset: Dataset
    config: SessionConfig
    phase: Phase
    unlabelled: list[str]
    labelled: dict[str, str]
    models: dict[str, ModelParams]
    buffer: list[BufferEntry]
    iteration: int
    training_events: int
    pending: list[str]
    pending_predictions: dict[str, BatchEntry]
    report: metrics.Report
    timer: Callable[[], float] = field(repr=False, default=time.perf_counter)
    started_at: float = 0.0
    last_training_stats: list[tuple[str, TrainStats]] = field(default_factory=list)

    def buffer_capacity(self) -> int:
        return len(self.models) * self.config.buffer_per_class


def start_session(
    dataset: Dataset,
    config: SessionConfig,
    *,
    dataset_name: str = "dataset",
    timer: Callable[[], float] = time.perf_counter,
) -> tuple[SessionState, list[str]]:
    """Open a session and return it with the bootstrap sample-id request."""
    if len(dataset) < config.bootstrap_size:
        raise ConfigurationError(
            f"dataset has {len(dataset)} samples, bootstrap needs {config.bootstrap_size}"
        )
    order = shuffled_ids(dataset, config.seed)
    state = SessionState(
        dataset=dataset,
        config=config,
        phase=Phase.BOOTSTRAP,
        unlabelled=order,
        labelled={},
        models={},
        buffer=[],
        iteration=0,
        training_events=0,
        pending=order[: config.bootstrap_size],
        pending_predictions={},
        report=metrics.Report(
            dataset_name=dataset_name,
            sample_count=len(dataset),
            class_count=0,
            balancing=config.balancing,
        ),
        timer=timer,
    )
    state.started_at = timer()
    return state, list(state.pending)


def add_class(state: SessionState, class_label: str) -> SessionState:
    """Spawn a fresh head for a new class; existing heads are untouched."""
    if not isinstance(class_label, str) or not class_label:
        raise SessionValidationError("class label must be a non-empty string")
    if class_label in state.models:
        raise SessionValidationError(f"class {class_label!r} already exists")
    seed = derive_seed(state.config.seed, "init", class_label)
    state.models[class_label] = classifier.init_model(class_label, state.dataset.dim, seed)
    state.report.class_count = len(state.models)
    return state


def _labelled_pool(state: SessionState) -> list[tuple]:
    return [(state.dataset.get(sid), label) for sid, label in state.labelled.items()]


def _run_training_event(
    state: SessionState, class_to_data: dict[str, list[BinaryExample]]
) -> list[tuple[str, TrainStats]]:
    """Train the given classes as one training event and record its duration."""
    started = state.timer()
    event_index = state.training_events
    stats: list[tuple[str, TrainStats]] = []
    for label in sorted(class_to_data):
        data = class_to_data[label]
        if state.config.balancing:
            data = classifier.balance(
                data, derive_seed(state.config.seed, "balance", label, event_index)
            )
        _, train_stats = classifier.train(state.models[label], data, state.config.train_config)
        stats.append((label, train_stats))
    state.training_events += 1
    metrics.record_training(state.report, state.timer() - started, set(class_to_data))
    state.last_training_stats.extend(stats)
    return stats


def _remove_from_unlabelled(state: SessionState, ids: Sequence[str]) -> None:
    gone = set(ids)
    state.unlabelled = [sid for sid in state.unlabelled if sid not in gone]


def submit_bootstrap_labels(state: SessionState, labels: dict[str, str]) -> SessionState:
    """Apply user labels for the requested bootstrap ids and train every head."""
    if state.phase is not Phase.BOOTSTRAP:
        raise PhaseError(f"bootstrap labels not accepted in phase {state.phase.value}")
    requested = set(state.pending)
    got = set(labels)
    if got != requested:
        missing = sorted(requested - got)
        extra = sorted(got - requested)
        raise SessionValidationError(
            f"labels must cover exactly the requested ids (missing {missing}, extra {extra})"
        )
    for sid, label in labels.items():
        if not isinstance(label, str) or not label:
            raise SessionValidationError(f"sample {sid!r}: class label must be a non-empty string")

    state.last_training_stats = []
    for sid in state.pending:
        label = labels[sid]
        state.labelled[sid] = label
        if label not in state.models:
            add_class(state, label)
    _remove_from_unlabelled(state, state.pending)

    pool = _labelled_pool(state)
    class_to_data = {
        label: classifier.prepare_binary_dataset(pool, label) for label in sorted(state.models)
    }
    _run_training_event(state, class_to_data)

    metrics.record_iteration(state.report, len(state.pending), len(state.pending), kind="bootstrap")
    state.pending = []
    state.phase = Phase.BULK_EDIT
    return state


def next_batch(state: SessionState) -> BatchPrediction:
    """Pre-label the next batch of unlabelled samples by maximum head confidence.

    Ties go to the lexicographically smallest class label. An exhausted pool
    moves the session to Done and yields an empty batch (also returned if the
    session is already Done).
    """
    if state.phase is Phase.DONE:
        return BatchPrediction(entries=[], iteration=state.iteration + 1)
    if state.phase is not Phase.BULK_EDIT:
        raise PhaseError(f"cannot predict a batch in phase {state.phase.value}")
    if not state.models:
        raise SessionError("no models exist; bootstrap the session first")

    take = state.unlabelled[: state.config.batch_size]
    if not take:
        state.phase = Phase.DONE
        return BatchPrediction(entries=[], iteration=state.iteration + 1)

    labels = sorted(state.models)
    entries = []
    for sid in take:
        features = state.dataset.get(sid).features
        best_label = None
        best_conf = -1.0
        for label in labels:
            conf = classifier.forward(state.models[label], features)
            if conf > best_conf:
                best_label, best_conf = label, conf
        entries.append(
            BatchEntry(sample_id=sid, predicted_class=best_label, predicted_confidence=best_conf)
        )

    state.pending = list(take)
    state.pending_predictions = {e.sample_id: e for e in entries}
    state.phase = Phase.AWAIT_CORRECTIONS
    return BatchPrediction(entries=entries, iteration=state.iteration + 1)


def submit_corrections(
    state: SessionState, corrections: dict[str, str]
) -> tuple[SessionState, TriggerOutcome]:
    """Apply user corrections to the in-flight batch and evaluate triggers.

    Uncorrected entries keep the model's label. A correction equal to the
    model's prediction is treated as an accept, not a mistake. Corrections
    may introduce new classes; their heads first train at the next training
    event.
    """
    if state.phase is not Phase.AWAIT_CORRECTIONS:
        raise PhaseError(f"corrections not accepted in phase {state.phase.value}")
    batch_ids = set(state.pending)
    unknown = sorted(set(corrections) - batch_ids)
    if unknown:
        raise SessionValidationError(f"corrections reference ids outside the batch: {unknown}")
    for sid, label in corrections.items():
        if not isinstance(label, str) or not label:
            raise SessionValidationError(f"sample {sid!r}: class label must be a non-empty string")

    state.last_training_stats = []
    effective = {
        sid: label
        for sid, label in corrections.items()
        if label != state.pending_predictions[sid].predicted_class
    }

    for sid in state.pending:
        prediction = state.pending_predictions[sid]
        label = effective.get(sid, prediction.predicted_class)
        if label not in state.models:
            add_class(state, label)
        state.labelled[sid] = label
        if sid in effective:
            state.buffer.append(
                BufferEntry(
                    sample_id=sid,
                    predicted_class=prediction.predicted_class,
                    predicted_confidence=prediction.predicted_confidence,
                    correct_class=label,
                )
            )

    _remove_from_unlabelled(state, state.pending)
    mistakes = len(effective)
    metrics.record_iteration(state.report, len(state.pending), mistakes, kind="bulk")
    state.iteration += 1
    state.pending = []
    state.pending_predictions = {}

    outcome = evaluate_triggers(state, mistakes)
    return state, outcome


def evaluate_triggers(state: SessionState, mistakes: int) -> TriggerOutcome:
    """Run the buffer-full and too-many-mistakes checks, in that order.

    A full buffer (length >= live class count * buffer_per_class) selects the
    top mistakes per class, retrains those classes on the selected samples,
    and drops the selected entries, repeating until the buffer is back under
    capacity. Otherwise, more mistakes than the threshold sends the session
    back to a fresh bootstrap drawn from the remaining unlabelled pool.
    """
    retrained: set[str] = set()
    fired_buffer = False
    while state.buffer and len(state.buffer) >= state.buffer_capacity():
        fired_buffer = True
        selected = select_from_buffer(state.buffer, state.config)
        pool = [
            (state.dataset.get(entry.sample_id), entry.correct_class)
            for label in sorted(selected)
            for entry in selected[label]
        ]
        class_to_data = {
            label: classifier.prepare_binary_dataset(pool, label) for label in sorted(selected)
        }
        _run_training_event(state, class_to_data)
        retrained |= set(selected)
        chosen = {id(entry) for group in selected.values() for entry in group}
        state.buffer = [entry for entry in state.buffer if id(entry) not in chosen]

    if fired_buffer:
        state.phase = Phase.BULK_EDIT
        return TriggerOutcome(kind=TriggerKind.BUFFER_FULL, retrained_classes=retrained)

    if mistakes > state.config.mistake_threshold:
        if state.unlabelled:
            state.phase = Phase.BOOTSTRAP
            state.pending = state.unlabelled[: state.config.bootstrap_size]
        else:
            state.phase = Phase.DONE
            state.pending = []
        return TriggerOutcome(
            kind=TriggerKind.TOO_MANY_MISTAKES, retrained_classes=set(state.models)
        )

    state.phase = Phase.BULK_EDIT
    return TriggerOutcome(kind=TriggerKind.NONE, retrained_classes=set())


def select_from_buffer(
    buffer: Sequence[BufferEntry], config: SessionConfig
) -> dict[str, list[BufferEntry]]:
    """Pick up to select_per_class entries per correct class from the buffer.

    Entries are grouped by correct class and sorted by predicted confidence
    in config.sort_direction; ties keep buffer insertion order (stable sort).
    """
    if not buffer:
        raise ValueError("buffer is empty")
    groups: dict[str, list[BufferEntry]] = {}
    for entry in buffer:
        groups.setdefault(entry.correct_class, []).append(entry)
    reverse = config.sort_direction is SortDirection.HIGH_TO_LOW
    return {
        label: sorted(entries, key=lambda e: e.predicted_confidence, reverse=reverse)[
            : config.select_per_class
        ]
        for label, entries in groups.items()
    }


def finalize_session(state: SessionState) -> metrics.Report:
    """Finalize the report with the total elapsed session time."""
    return metrics.finalize(state.report, total_seconds=state.timer() - state.started_at)


# -- snapshot (pause/resume) -------------------------------------------------


def session_dict(state: SessionState) -> dict:
    return {
        "format": SNAPSHOT_FORMAT,
        "dataset_name": state.report.dataset_name,
        "dataset_fingerprint": {"dim": state.dataset.dim, "sample_count": len(state.dataset)},
        "config": {
            "bootstrap_size": state.config.bootstrap_size,
            "batch_size": state.config.batch_size,
            "mistake_threshold": state.config.mistake_threshold,
            "buffer_per_class": state.config.buffer_per_class,
            "select_per_class": state.config.select_per_class,
            "balancing": state.config.balancing,
            "sort_direction": state.config.sort_direction.value,
            "train_config": {
                "batch_size": state.config.train_config.batch_size,
                "epochs": state.config.train_config.epochs,
                "learning_rate": state.config.train_config.learning_rate,
                "seed": state.config.train_config.seed,
            },
            "seed": state.config.seed,
        },
        "phase": state.phase.value,
        "iteration": state.iteration,
        "training_events": state.training_events,
        "unlabelled": list(state.unlabelled),
        "labelled": dict(state.labelled),
        "pending": list(state.pending),
        "pending_predictions": [
            {
                "sample_id": e.sample_id,
                "predicted_class": e.predicted_class,
                "predicted_confidence": e.predicted_confidence,
            }
            for e in state.pending_predictions.values()
        ],
        "buffer": [
            {
                "sample_id": e.sample_id,
                "predicted_class": e.predicted_class,
                "predicted_confidence": e.predicted_confidence,
                "correct_class": e.correct_class,
            }
            for e in state.buffer
        ],
        "models": {
            label: classifier.checkpoint_dict(model) for label, model in state.models.items()
        },
        "report": {
            "iteration_series": [
                {
                    "iteration": r.iteration,
                    "kind": r.kind,
                    "batch_len": r.batch_len,
                    "correct_by_model": r.correct_by_model,
                    "corrected_by_user": r.corrected_by_user,
                }
                for r in state.report.iteration_series
            ],
            "training_series": [
                {
                    "event_index": r.event_index,
                    "duration_seconds": r.duration_seconds,
                    "classes_trained": sorted(r.classes_trained),
                }
                for r in state.report.training_series
            ],
        },
        "elapsed_seconds": state.timer() - state.started_at,
    }


def save_session(state: SessionState, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(session_dict(state), fh)
        fh.write("\n")
    return path


def load_session(
    path: str | Path,
    dataset: Dataset,
    *,
    timer: Callable[[], float] = time.perf_counter,
) -> SessionState:
    """Rebuild a session from a snapshot against the same dataset."""
    with Path(path).open("r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if obj.get("format") != SNAPSHOT_FORMAT:
        raise SessionValidationError(f"unsupported snapshot format: {obj.get('format')!r}")
    fp = obj["dataset_fingerprint"]
    if fp["dim"] != dataset.dim or fp["sample_count"] != len(dataset):
        raise SessionValidationError("snapshot does not match this dataset")
    known = {s.id for s in dataset.samples}
    snapshot_ids = set(obj["labelled"]) | set(obj["unlabelled"])
    if snapshot_ids != known:
        raise SessionValidationError("snapshot ids do not match this dataset")

    cfg = obj["config"]
    config = SessionConfig(
        bootstrap_size=cfg["bootstrap_size"],
        batch_size=cfg["batch_size"],
        mistake_threshold=cfg["mistake_threshold"],
        buffer_per_class=cfg["buffer_per_class"],
        select_per_class=cfg["select_per_class"],
        balancing=cfg["balancing"],
        sort_direction=SortDirection(cfg["sort_direction"]),
        train_config=TrainConfig(**cfg["train_config"]),
        seed=cfg["seed"],
    )
    models = {
        label: classifier.params_from_dict(payload) for label, payload in obj["models"].items()
    }
    report = metrics.Report(
        dataset_name=obj["dataset_name"],
        sample_count=len(dataset),
        class_count=len(models),
        balancing=config.balancing,
        iteration_series=[
            metrics.IterationRecord(
                iteration=r["iteration"],
                batch_len=r["batch_len"],
                correct_by_model=r["correct_by_model"],
                corrected_by_user=r["corrected_by_user"],
                kind=r["kind"],
            )
            for r in obj["report"]["iteration_series"]
        ],
        training_series=[
            metrics.TrainingRecord(
                event_index=r["event_index"],
                duration_seconds=r["duration_seconds"],
                classes_trained=set(r["classes_trained"]),
            )
            for r in obj["report"]["training_series"]
        ],
    )
    state = SessionState(
        dataset=dataset,
        config=config,
        phase=Phase(obj["phase"]),
        unlabelled=list(obj["unlabelled"]),
        labelled=dict(obj["labelled"]),
        models=models,
        buffer=[
            BufferEntry(
                sample_id=e["sample_id"],
                predicted_class=e["predicted_class"],
                predicted_confidence=e["predicted_confidence"],
                correct_class=e["correct_class"],
            )
            for e in obj["buffer"]
        ],
        iteration=obj["iteration"],
        training_events=obj["training_events"],
        pending=list(obj["pending"]),
        pending_predictions={
            e["sample_id"]: BatchEntry(
                sample_id=e["sample_id"],
                predicted_class=e["predicted_class"],
                predicted_confidence=e["predicted_confidence"],
            )
            for e in obj["pending_predictions"]
        },
        report=report,
        timer=timer,
    )
    state.started_at = timer() - obj["elapsed_seconds"]
    return state
