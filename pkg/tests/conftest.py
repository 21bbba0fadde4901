from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from ovalabel.feature_store import Dataset, Sample, make_dataset

settings.register_profile("ci", derandomize=True, max_examples=50)
settings.load_profile("ci")


def build_dataset(labels: list[str | None], dim: int = 4, seed: int = 0) -> Dataset:
    """Small in-memory dataset with deterministic pseudo-random features."""
    rng = np.random.default_rng(seed)
    samples = [
        Sample(
            id=f"s{i:04d}",
            features=rng.standard_normal(dim).astype(np.float32),
            truth_label=label,
        )
        for i, label in enumerate(labels)
    ]
    return make_dataset(samples)


@pytest.fixture
def null_timer():
    return lambda: 0.0
