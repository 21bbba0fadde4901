"""Real-time data labelling with independent one-vs-all binary heads."""

from .classifier import (
    BinaryExample,
    ModelParams,
    TrainConfig,
    TrainStats,
    balance,
    forward,
    gradient,
    init_model,
    load_model,
    prepare_binary_dataset,
    save_model,
    train,
)
from .feature_store import Dataset, DatasetError, Sample, load_dataset, save_dataset, shuffled_ids
from .metrics import Report, emit_report, finalize, record_iteration
from .session import (
    BatchPrediction,
    BufferEntry,
    ConfigurationError,
    Phase,
    PhaseError,
    SessionConfig,
    SessionState,
    SessionValidationError,
    SortDirection,
    TriggerKind,
    TriggerOutcome,
    add_class,
    evaluate_triggers,
    load_session,
    next_batch,
    save_session,
    select_from_buffer,
    start_session,
    submit_bootstrap_labels,
    submit_corrections,
)
from .simulate import make_synthetic, run_simulation

__version__ = "0.1.0"

__all__ = [
    "BinaryExample",
    "BatchPrediction",
    "BufferEntry",
    "ConfigurationError",
    "Dataset",
    "DatasetError",
    "ModelParams",
    "Phase",
    "PhaseError",
    "Report",
    "Sample",
    "SessionConfig",
    "SessionState",
    "SessionValidationError",
    "SortDirection",
    "TrainConfig",
    "TrainStats",
    "TriggerKind",
    "TriggerOutcome",
    "add_class",
    "balance",
    "emit_report",
    "evaluate_triggers",
    "finalize",
    "forward",
    "gradient",
    "init_model",
    "load_dataset",
    "load_model",
    "load_session",
    "make_synthetic",
    "next_batch",
    "prepare_binary_dataset",
    "record_iteration",
    "run_simulation",
    "save_dataset",
    "save_model",
    "save_session",
    "select_from_buffer",
    "start_session",
    "submit_bootstrap_labels",
    "submit_corrections",
    "train",
]
