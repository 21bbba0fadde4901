"""Datasets of precomputed feature vectors, loaded from JSONL files.

File format: one sample per line, UTF-8, LF line endings. Each line is a
JSON object with ``id`` (string), ``features`` (array of numbers) and an
optional ``label`` (string, present for simulation datasets). The first
line fixes the feature dimension for the whole file.

Features are stored as 32-bit floats. Serialization writes each component
at full float64 repr precision, so a load -> save -> load round trip is
bit-exact at the float32 width.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .rng import SplitMix64


class DatasetError(ValueError):
    """Malformed or invalid dataset file."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(eq=False)
class Sample:
    """One data item: stable id, float32 feature vector, optional truth label."""

    id: str
    features: np.ndarray
    truth_label: str | None = None


@dataclass(eq=False)
class Dataset:
    """Immutable-after-load collection of samples sharing one feature dimension."""

    samples: list[Sample]
    dim: int
    classes: frozenset[str]
    _by_id: dict[str, Sample] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self._by_id:
            self._by_id = {s.id: s for s in self.samples}

    def __len__(self) -> int:
        return len(self.samples)

    def get(self, sample_id: str) -> Sample:
        return self._by_id[sample_id]

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self._by_id


def make_dataset(samples: Iterable[Sample]) -> Dataset:
    """Build a Dataset from samples, validating the shared invariants."""
    samples = list(samples)
    if not samples:
        raise DatasetError("dataset is empty")
    dim = int(samples[0].features.shape[0])
    if dim <= 0:
        raise DatasetError(f"sample {samples[0].id!r} has an empty feature vector")
    seen: set[str] = set()
    for s in samples:
        if s.id in seen:
            raise DatasetError(f"duplicate sample id {s.id!r}")
        seen.add(s.id)
        if s.features.shape != (dim,):
            raise DatasetError(
                f"sample {s.id!r} has {s.features.shape[0]} features, expected {dim}"
            )
        if not np.isfinite(s.features).all():
            raise DatasetError(f"sample {s.id!r} contains a non-finite feature value")
    classes = frozenset(s.truth_label for s in samples if s.truth_label is not None)
    return Dataset(samples=samples, dim=dim, classes=classes)


def _parse_line(text: str, lineno: int) -> Sample:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON ({exc.msg})", line=lineno) from exc
    if not isinstance(obj, dict):
        raise DatasetError("expected a JSON object", line=lineno)

    sample_id = obj.get("id")
    if not isinstance(sample_id, str) or not sample_id:
        raise DatasetError("missing or non-string 'id'", line=lineno)

    raw = obj.get("features")
    if not isinstance(raw, list) or not raw:
        raise DatasetError(f"sample {sample_id!r}: missing or empty 'features'", line=lineno)
    for value in raw:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DatasetError(
                f"sample {sample_id!r}: non-numeric feature value {value!r}", line=lineno
            )
        if not math.isfinite(value):
            raise DatasetError(
                f"sample {sample_id!r}: non-finite feature value {value!r}", line=lineno
            )

    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise DatasetError(f"sample {sample_id!r}: non-string 'label'", line=lineno)

    features = np.asarray(raw, dtype=np.float32)
    return Sample(id=sample_id, features=features, truth_label=label)


def load_dataset(path: str | Path) -> Dataset:
    """Load a JSONL dataset file, preserving file order.

    Raises DatasetError with the offending line number on parse failures and
    with the offending sample id on dimension/duplicate/finiteness violations.
    """
    path = Path(path)
    samples: list[Sample] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            samples.append(_parse_line(line, lineno))
    return make_dataset(samples)


def save_dataset(dataset: Dataset, path: str | Path) -> Path:
    """Write a dataset back to JSONL (LF endings, full-precision floats)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for s in dataset.samples:
            obj: dict = {"id": s.id, "features": [float(x) for x in s.features]}
            if s.truth_label is not None:
                obj["label"] = s.truth_label
            fh.write(json.dumps(obj) + "\n")
    return path


def shuffled_ids(dataset: Dataset, seed: int) -> list[str]:
    """Seeded permutation of all sample ids (SplitMix64 Fisher-Yates).

    Identical seed gives the identical permutation; see the rng module for
    the exact algorithm and constants.
    """
    ids = [s.id for s in dataset.samples]
    SplitMix64(seed).shuffle(ids)
    return ids
