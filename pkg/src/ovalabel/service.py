"""HTTP facade over labelling sessions.

Every response is derived from an engine call; no protocol logic lives in
the handlers. Requests to one session are serialized through a per-session
lock. Status codes: 400 invalid payloads, 404 unknown session, 409 phase
mismatch or an operation racing an in-flight training, 422 dataset errors.

Sessions created with ``async_training`` run label submissions that train
in a background thread: the submit returns 202 with phase ``Training`` and
clients poll ``GET /sessions/{id}`` until it reports the real phase again.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from pathlib import Path
from typing import Callable

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import session as engine
from .classifier import TrainConfig, TrainStats
from .feature_store import Dataset, DatasetError, Sample, load_dataset, make_dataset
from .metrics import running_contribution_percent
from .session import (
    ConfigurationError,
    Phase,
    PhaseError,
    SessionConfig,
    SessionState,
    SessionValidationError,
)

DATA_DIR_ENV = "OVALABEL_DATA_DIR"

TRAINING_PHASE = "Training"


class TrainConfigBody(BaseModel):
    batch_size: int = 10
    epochs: int = 20
    learning_rate: float = 0.01
    seed: int = 0


class SessionConfigBody(BaseModel):
    bootstrap_size: int = 30
    batch_size: int = 30
    mistake_threshold: int = 15
    buffer_per_class: int = 20
    select_per_class: int = 10
    balancing: bool = True
    sort_direction: str = "HighToLow"
    train_config: TrainConfigBody = Field(default_factory=TrainConfigBody)
    seed: int = 0


class SampleBody(BaseModel):
    id: str
    features: list[float]
    label: str | None = None


class CreateSessionBody(BaseModel):
    dataset_path: str | None = None
    samples: list[SampleBody] | None = None
    dataset_name: str | None = None
    config: SessionConfigBody = Field(default_factory=SessionConfigBody)
    async_training: bool = False


class LabelsBody(BaseModel):
    labels: dict[str, str]


class ClassBody(BaseModel):
    class_label: str


class SessionHolder:
    """One live session plus the locks that serialize access to it."""

    def __init__(self, state: SessionState, async_training: bool):
        self.state = state
        self.async_training = async_training
        self.op_lock = threading.Lock()
        self.meta = threading.Lock()
        self.training_busy = False
        self.last_async_result: dict | None = None
        self.last_async_error: str | None = None


def _training_stats_payload(stats: list[tuple[str, TrainStats]]) -> list[dict]:
    return [
        {
            "class_label": label,
            "duration_seconds": s.duration_seconds,
            "final_loss": s.final_loss,
            "epochs_run": s.epochs_run,
        }
        for label, s in stats
    ]


def _outcome_payload(outcome: engine.TriggerOutcome | None) -> dict | None:
    if outcome is None:
        return None
    return {
        "kind": outcome.kind.value,
        "retrained_classes": sorted(outcome.retrained_classes),
    }


def _apply_labels(state: SessionState, labels: dict[str, str]) -> dict:
    """Dispatch a label payload to the operation the current phase expects."""
    if state.phase is Phase.BOOTSTRAP:
        engine.submit_bootstrap_labels(state, labels)
        outcome = None
    elif state.phase is Phase.AWAIT_CORRECTIONS:
        _, outcome = engine.submit_corrections(state, labels)
    else:
        raise PhaseError(f"labels not accepted in phase {state.phase.value}")
    payload = {
        "phase": state.phase.value,
        "outcome": _outcome_payload(outcome),
        "training": _training_stats_payload(state.last_training_stats),
        "iteration": state.iteration,
    }
    if state.phase is Phase.BOOTSTRAP:
        payload["bootstrap_ids"] = list(state.pending)
    return payload


def _metrics_payload(state: SessionState) -> dict:
    report = state.report
    return {
        "dataset_name": report.dataset_name,
        "sample_count": report.sample_count,
        "class_count": report.class_count,
        "balancing": report.balancing,
        "model_contribution_percent": running_contribution_percent(report),
        "training_minutes": sum(r.duration_seconds for r in report.training_series) / 60.0,
        "iteration_series": [
            {
                "iteration": r.iteration,
                "kind": r.kind,
                "batch_len": r.batch_len,
                "correct_by_model": r.correct_by_model,
                "corrected_by_user": r.corrected_by_user,
            }
            for r in report.iteration_series
        ],
        "training_series": [
            {
                "event_index": r.event_index,
                "duration_seconds": r.duration_seconds,
                "classes_trained": sorted(r.classes_trained),
            }
            for r in report.training_series
        ],
    }


def _load_request_dataset(body: CreateSessionBody, data_dir: Path) -> tuple[Dataset, str]:
    if body.samples is not None:
        samples = [
            Sample(
                id=s.id,
                features=np.asarray(s.features, dtype=np.float32),
                truth_label=s.label,
            )
            for s in body.samples
        ]
        return make_dataset(samples), body.dataset_name or "uploaded"
    if body.dataset_path:
        raw = Path(body.dataset_path)
        path = raw if raw.is_absolute() else data_dir / raw
        if not path.exists():
            raise DatasetError(f"dataset file not found: {path}")
        return load_dataset(path), body.dataset_name or path.stem
    raise SessionValidationError("provide either dataset_path or samples")


def create_app(
    data_dir: str | Path | None = None,
    timer: Callable[[], float] = time.perf_counter,
) -> FastAPI:
    app = FastAPI(title="ovalabel", version="0.1.0")
    resolved_data_dir = Path(data_dir or os.environ.get(DATA_DIR_ENV, "."))
    sessions: dict[str, SessionHolder] = {}
    app.state.sessions = sessions

    @app.exception_handler(RequestValidationError)
    async def invalid_body(_: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(SessionValidationError)
    async def invalid_labels(_: Request, exc: SessionValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ConfigurationError)
    async def invalid_config(_: Request, exc: ConfigurationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(PhaseError)
    async def wrong_phase(_: Request, exc: PhaseError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(DatasetError)
    async def bad_dataset(_: Request, exc: DatasetError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    def holder_or_404(session_id: str) -> SessionHolder:
        holder = sessions.get(session_id)
        if holder is None:
            raise KeyError(session_id)
        return holder

    @app.exception_handler(KeyError)
    async def unknown_session(_: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"detail": f"unknown session {exc}"})

    def reject_if_training(holder: SessionHolder) -> None:
        with holder.meta:
            if holder.training_busy:
                raise PhaseError("training in progress; poll the session status")

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        dataset, dataset_name = _load_request_dataset(body, resolved_data_dir)
        config = SessionConfig(
            bootstrap_size=body.config.bootstrap_size,
            batch_size=body.config.batch_size,
            mistake_threshold=body.config.mistake_threshold,
            buffer_per_class=body.config.buffer_per_class,
            select_per_class=body.config.select_per_class,
            balancing=body.config.balancing,
            sort_direction=body.config.sort_direction,
            train_config=TrainConfig(
                batch_size=body.config.train_config.batch_size,
                epochs=body.config.train_config.epochs,
                learning_rate=body.config.train_config.learning_rate,
                seed=body.config.train_config.seed,
            ),
            seed=body.config.seed,
        )
        state, bootstrap_ids = engine.start_session(
            dataset, config, dataset_name=dataset_name, timer=timer
        )
        session_id = uuid.uuid4().hex
        sessions[session_id] = SessionHolder(state, body.async_training)
        return {
            "session_id": session_id,
            "phase": state.phase.value,
            "bootstrap_ids": bootstrap_ids,
        }

    @app.get("/sessions/{session_id}")
    def session_status(session_id: str):
        holder = holder_or_404(session_id)
        with holder.meta:
            if holder.training_busy:
                return {
                    "session_id": session_id,
                    "phase": TRAINING_PHASE,
                    "training_in_progress": True,
                    "last_result": None,
                    "error": None,
                }
            result = holder.last_async_result
            error = holder.last_async_error
        state = holder.state
        payload = {
            "session_id": session_id,
            "phase": state.phase.value,
            "training_in_progress": False,
            "last_result": result,
            "error": error,
            "classes": sorted(state.models),
            "iteration": state.iteration,
        }
        if state.phase is Phase.BOOTSTRAP:
            payload["bootstrap_ids"] = list(state.pending)
        return payload

    @app.post("/sessions/{session_id}/labels")
    def submit_labels(session_id: str, body: LabelsBody):
        holder = holder_or_404(session_id)
        reject_if_training(holder)

        if holder.async_training:
            with holder.meta:
                holder.training_busy = True
                holder.last_async_result = None
                holder.last_async_error = None

            def run():
                try:
                    with holder.op_lock:
                        result = _apply_labels(holder.state, body.labels)
                    with holder.meta:
                        holder.last_async_result = result
                except Exception as exc:  # surfaced via the status endpoint
                    with holder.meta:
                        holder.last_async_error = str(exc)
                finally:
                    with holder.meta:
                        holder.training_busy = False

            threading.Thread(target=run, daemon=True).start()
            return JSONResponse(
                status_code=202,
                content={"phase": TRAINING_PHASE, "training_in_progress": True},
            )

        with holder.op_lock:
            return _apply_labels(holder.state, body.labels)

    @app.get("/sessions/{session_id}/batch")
    def get_batch(session_id: str):
        holder = holder_or_404(session_id)
        reject_if_training(holder)
        with holder.op_lock:
            batch = engine.next_batch(holder.state)
            return {
                "phase": holder.state.phase.value,
                "iteration": batch.iteration,
                "entries": [
                    {
                        "sample_id": e.sample_id,
                        "predicted_class": e.predicted_class,
                        "predicted_confidence": e.predicted_confidence,
                    }
                    for e in batch.entries
                ],
            }

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        holder = holder_or_404(session_id)
        reject_if_training(holder)
        with holder.op_lock:
            return _metrics_payload(holder.state)

    @app.post("/sessions/{session_id}/classes")
    def post_class(session_id: str, body: ClassBody):
        holder = holder_or_404(session_id)
        reject_if_training(holder)
        if not body.class_label:
            return JSONResponse(status_code=400, content={"detail": "empty class label"})
        with holder.op_lock:
            if body.class_label in holder.state.models:
                return JSONResponse(
                    status_code=409,
                    content={"detail": f"class {body.class_label!r} already exists"},
                )
            engine.add_class(holder.state, body.class_label)
            return {"classes": sorted(holder.state.models)}

    return app
