"""Simulated annotator: drives a full session from ground-truth labels.

Lets the whole loop run unattended for benchmarking. The oracle never lies:
bootstrap answers come straight from truth labels, and corrections are
exactly the batch entries the models got wrong.
"""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from . import session as engine
from .feature_store import Dataset, Sample, make_dataset
from .metrics import Report
from .session import Phase, SessionConfig


def run_simulation(
    dataset: Dataset,
    config: SessionConfig,
    *,
    dataset_name: str = "dataset",
    timer: Callable[[], float] = time.perf_counter,
) -> Report:
    """Run a session to completion with truth labels standing in for the user."""
    missing = [s.id for s in dataset.samples if s.truth_label is None]
    if missing:
        raise ValueError(
            f"simulation needs truth labels for every sample; missing for {missing[:5]}"
            + ("..." if len(missing) > 5 else "")
        )
    truth = {s.id: s.truth_label for s in dataset.samples}

    state, bootstrap_ids = engine.start_session(
        dataset, config, dataset_name=dataset_name, timer=timer
    )
    engine.submit_bootstrap_labels(state, {sid: truth[sid] for sid in bootstrap_ids})

    while state.phase is not Phase.DONE:
        if state.phase is Phase.BOOTSTRAP:
            engine.submit_bootstrap_labels(state, {sid: truth[sid] for sid in state.pending})
        elif state.phase is Phase.BULK_EDIT:
            batch = engine.next_batch(state)
            if not batch.entries:
                break
            corrections = {
                e.sample_id: truth[e.sample_id]
                for e in batch.entries
                if e.predicted_class != truth[e.sample_id]
            }
            engine.submit_corrections(state, corrections)
        else:  # pragma: no cover - the loop never leaves a batch in flight
            raise RuntimeError(f"unexpected phase {state.phase}")

    return engine.finalize_session(state)


def make_synthetic(
    classes: int, per_class: int, dim: int, separation: float, seed: int
) -> Dataset:
    """Gaussian-cluster dataset: one unit-variance cluster per class.

    Cluster centers are rescaled so every pair sits at least `separation`
    (in units of the within-cluster standard deviation) apart.
    """
    if classes <= 0 or per_class <= 0 or dim <= 0 or separation <= 0:
        raise ValueError("classes, per_class, dim and separation must all be positive")

    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((classes, dim))
    if classes > 1:
        dists = [
            float(np.linalg.norm(centers[i] - centers[j]))
            for i in range(classes)
            for j in range(i + 1, classes)
        ]
        min_dist = min(dists)
        if min_dist <= 0:  # pragma: no cover - zero-distance Gaussian draw
            raise ValueError("degenerate center draw; use a different seed")
        if min_dist < separation:
            centers *= separation / min_dist

    samples = []
    for c in range(classes):
        label = f"class{c}"
        points = rng.standard_normal((per_class, dim)) + centers[c]
        for j in range(per_class):
            samples.append(
                Sample(
                    id=f"{label}-{j:05d}",
                    features=points[j].astype(np.float32),
                    truth_label=label,
                )
            )
    return make_dataset(samples)
