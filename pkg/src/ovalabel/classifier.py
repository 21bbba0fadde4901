"""Per-class binary heads: a 50-unit ReLU layer into a single sigmoid output.

Each class label gets its own independent head trained with mini-batch SGD
on mean binary cross-entropy, with gradients derived by hand. Parameters
are held as float64 arrays and all math runs in float64; the feature
vectors coming in are float32 and are widened on entry.

Checkpoint file layout (JSON, keys in this order):

    format       "ovalabel-model/1"
    class_label  string
    dim          input dimension D
    hidden       hidden width (always 50)
    train_count  times trained
    version      parameter version, bumped on every train
    w1           flat row-major list of D*50 numbers (input -> hidden)
    b1           list of 50 numbers
    w2           list of 50 numbers (hidden -> output)
    b2           single number

Numbers are written at full float64 repr precision, so save -> load is
bit-exact.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .feature_store import Sample
from .rng import SplitMix64

HIDDEN_UNITS = 50

# Sigmoid outputs are clamped to [EPS, 1-EPS] before the log so the loss
# stays finite on saturated predictions.
LOSS_EPS = 1e-7

CHECKPOINT_FORMAT = "ovalabel-model/1"


class SingleClassWarning(UserWarning):
    """balance() was asked to balance data containing only one target value."""


@dataclass
class TrainConfig:
    batch_size: int = 10
    epochs: int = 20
    learning_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.learning_rate >= 0:
            raise ValueError("learning_rate must be non-negative")


@dataclass(eq=False)
class ModelParams:
    """Weights of one binary head plus training metadata."""

    class_label: str
    w1: np.ndarray  # (D, 50)
    b1: np.ndarray  # (50,)
    w2: np.ndarray  # (50,)
    b2: float
    train_count: int = 0
    version: int = 0

    @property
    def dim(self) -> int:
        return int(self.w1.shape[0])

    def copy(self) -> "ModelParams":
        return ModelParams(
            class_label=self.class_label,
            w1=self.w1.copy(),
            b1=self.b1.copy(),
            w2=self.w2.copy(),
            b2=self.b2,
            train_count=self.train_count,
            version=self.version,
        )

    def params_bytes(self) -> bytes:
        """Concatenated raw bytes of all parameters, for bitwise comparisons."""
        b2 = np.asarray([self.b2], dtype=np.float64)
        return b"".join(a.tobytes() for a in (self.w1, self.b1, self.w2, b2))


@dataclass(eq=False)
class BinaryExample:
    features: np.ndarray
    target: int

    def __post_init__(self):
        if self.target not in (0, 1):
            raise ValueError(f"target must be 0 or 1, got {self.target!r}")


@dataclass
class Gradients:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float


@dataclass
class TrainStats:
    duration_seconds: float
    final_loss: float
    epochs_run: int
    steps_run: int


def init_model(class_label: str, dim: int, seed: int) -> ModelParams:
    """Fresh head with uniform Glorot weights and zero biases.

    Draw order is documented for reproducibility: w1 row-major (D*50
    uniforms in [-sqrt(6/(D+50)), +sqrt(6/(D+50))]), then w2 (50 uniforms
    in [-sqrt(6/51), +sqrt(6/51)]), all from SplitMix64(seed).
    """
    if dim <= 0:
        raise ValueError(f"dim must be positive, got {dim}")
    rng = SplitMix64(seed)
    lim1 = math.sqrt(6.0 / (dim + HIDDEN_UNITS))
    lim2 = math.sqrt(6.0 / (HIDDEN_UNITS + 1))
    w1 = np.array(
        [rng.uniform(-lim1, lim1) for _ in range(dim * HIDDEN_UNITS)], dtype=np.float64
    ).reshape(dim, HIDDEN_UNITS)
    w2 = np.array([rng.uniform(-lim2, lim2) for _ in range(HIDDEN_UNITS)], dtype=np.float64)
    return ModelParams(
        class_label=class_label,
        w1=w1,
        b1=np.zeros(HIDDEN_UNITS, dtype=np.float64),
        w2=w2,
        b2=0.0,
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Branching form avoids overflow warnings for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward_batch(params: ModelParams, x: np.ndarray):
    z1 = x @ params.w1 + params.b1
    h = np.maximum(z1, 0.0)
    p = _sigmoid(h @ params.w2 + params.b2)
    return z1, h, p


def forward(params: ModelParams, features: np.ndarray) -> float:
    """Confidence in (0, 1) that the input belongs to this head's class."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (params.dim,):
        raise ValueError(f"expected {params.dim} features, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("features contain non-finite values")
    _, _, p = _forward_batch(params, x[None, :])
    return float(p[0])


def _stack(batch: Sequence[BinaryExample]) -> tuple[np.ndarray, np.ndarray]:
    x = np.stack([np.asarray(ex.features, dtype=np.float64) for ex in batch])
    t = np.array([ex.target for ex in batch], dtype=np.float64)
    return x, t


def batch_loss(params: ModelParams, batch: Sequence[BinaryExample]) -> float:
    """Mean binary cross-entropy over the batch, with clamped log inputs."""
    if not batch:
        raise ValueError("batch must be non-empty")
    x, t = _stack(batch)
    _, _, p = _forward_batch(params, x)
    pc = np.clip(p, LOSS_EPS, 1.0 - LOSS_EPS)
    return float(-np.mean(t * np.log(pc) + (1.0 - t) * np.log(1.0 - pc)))


def gradient(params: ModelParams, batch: Sequence[BinaryExample]) -> Gradients:
    """Exact gradients of batch_loss with respect to every parameter.

    Where the sigmoid output falls outside the clamp interval the loss is
    locally constant in that example, so its contribution is zero.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    x, t = _stack(batch)
    n = x.shape[0]
    z1, h, p = _forward_batch(params, x)
    inside = (p > LOSS_EPS) & (p < 1.0 - LOSS_EPS)
    dz2 = np.where(inside, p - t, 0.0) / n
    dw2 = h.T @ dz2
    db2 = float(np.sum(dz2))
    dh = np.outer(dz2, params.w2)
    dz1 = dh * (z1 > 0.0)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)
    return Gradients(w1=dw1, b1=db1, w2=dw2, b2=db2)


def train(
    params: ModelParams, data: Sequence[BinaryExample], config: TrainConfig
) -> tuple[ModelParams, TrainStats]:
    """Mini-batch SGD over `config.epochs` passes, updating params in place.

    Each pass shuffles example order with SplitMix64(config.seed + epoch)
    and walks batches of config.batch_size (last one may be smaller).
    """
    if not data:
        raise ValueError("training data must be non-empty")
    started = time.perf_counter()
    n = len(data)
    indices = list(range(n))
    steps = 0
    for epoch in range(config.epochs):
        order = list(indices)
        SplitMix64(config.seed + epoch).shuffle(order)
        for start in range(0, n, config.batch_size):
            batch = [data[i] for i in order[start : start + config.batch_size]]
            g = gradient(params, batch)
            lr = config.learning_rate
            params.w1 = params.w1 - lr * g.w1
            params.b1 = params.b1 - lr * g.b1
            params.w2 = params.w2 - lr * g.w2
            params.b2 = params.b2 - lr * g.b2
            steps += 1
    params.train_count += 1
    params.version += 1
    stats = TrainStats(
        duration_seconds=time.perf_counter() - started,
        final_loss=batch_loss(params, data),
        epochs_run=config.epochs,
        steps_run=steps,
    )
    return params, stats


def prepare_binary_dataset(
    labelled: Sequence[tuple[Sample, str]], target_class: str
) -> list[BinaryExample]:
    """Relabel a labelled pool for one head: target class -> 1, rest -> 0."""
    if not labelled:
        raise ValueError("labelled pool must be non-empty")
    return [
        BinaryExample(features=sample.features, target=1 if label == target_class else 0)
        for sample, label in labelled
    ]


def balance(data: Sequence[BinaryExample], seed: int) -> list[BinaryExample]:
    """Oversample the minority target until positive and negative counts match.

    Synthesized examples are uniformly chosen minority examples plus
    per-component Gaussian jitter with sigma = 0.01 * the per-component
    standard deviation of the minority set. Originals are kept unmodified,
    in order, with synthesized examples appended. Single-class input is
    returned unchanged with a SingleClassWarning.

    Draw order per synthesized example: one next_below(len(minority)) for
    the source index, then one normal() per feature component.
    """
    positives = [ex for ex in data if ex.target == 1]
    negatives = [ex for ex in data if ex.target == 0]
    if not positives or not negatives:
        warnings.warn(
            "cannot balance single-class data; returning it unchanged",
            SingleClassWarning,
            stacklevel=2,
        )
        return list(data)
    if len(positives) == len(negatives):
        return list(data)

    minority = positives if len(positives) < len(negatives) else negatives
    deficit = abs(len(positives) - len(negatives))
    stacked = np.stack([np.asarray(ex.features, dtype=np.float64) for ex in minority])
    sigma = 0.01 * stacked.std(axis=0)
    target = minority[0].target

    rng = SplitMix64(seed)
    out = list(data)
    for _ in range(deficit):
        src = minority[rng.next_below(len(minority))]
        jitter = np.array(
            [rng.normal(0.0, s) for s in sigma], dtype=np.float64
        )
        synth = (np.asarray(src.features, dtype=np.float64) + jitter).astype(np.float32)
        out.append(BinaryExample(features=synth, target=target))
    return out


def checkpoint_dict(params: ModelParams) -> dict:
    """Checkpoint payload in the documented key order."""
    return {
        "format": CHECKPOINT_FORMAT,
        "class_label": params.class_label,
        "dim": params.dim,
        "hidden": HIDDEN_UNITS,
        "train_count": params.train_count,
        "version": params.version,
        "w1": [float(v) for v in params.w1.ravel()],
        "b1": [float(v) for v in params.b1],
        "w2": [float(v) for v in params.w2],
        "b2": float(params.b2),
    }


def params_from_dict(obj: dict) -> ModelParams:
    if obj.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"unsupported checkpoint format: {obj.get('format')!r}")
    dim = int(obj["dim"])
    hidden = int(obj["hidden"])
    if hidden != HIDDEN_UNITS:
        raise ValueError(f"unsupported hidden width {hidden}")
    w1 = np.asarray(obj["w1"], dtype=np.float64)
    if w1.shape != (dim * hidden,):
        raise ValueError("w1 has the wrong number of elements")
    params = ModelParams(
        class_label=obj["class_label"],
        w1=w1.reshape(dim, hidden),
        b1=np.asarray(obj["b1"], dtype=np.float64),
        w2=np.asarray(obj["w2"], dtype=np.float64),
        b2=float(obj["b2"]),
        train_count=int(obj["train_count"]),
        version=int(obj["version"]),
    )
    if params.b1.shape != (hidden,) or params.w2.shape != (hidden,):
        raise ValueError("bias/output vectors have the wrong length")
    if not all(np.isfinite(a).all() for a in (params.w1, params.b1, params.w2)):
        raise ValueError("checkpoint contains non-finite parameters")
    if not math.isfinite(params.b2):
        raise ValueError("checkpoint contains non-finite parameters")
    return params


def save_model(params: ModelParams, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(checkpoint_dict(params), fh)
        fh.write("\n")
    return path


def load_model(path: str | Path) -> ModelParams:
    with Path(path).open("r", encoding="utf-8") as fh:
        return params_from_dict(json.load(fh))
