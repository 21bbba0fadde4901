"""Command-line interface: serve the API, run simulations, build synthetic data.

``simulate`` configuration precedence: built-in defaults, then a --config
JSON file (same field names as the session config), then explicit flags.
``--timer null`` records all durations as zero so two identical runs emit
byte-identical CSVs; the default monotonic timer reports real wall time.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .classifier import TrainConfig
from .feature_store import load_dataset, save_dataset
from .metrics import companion_paths, emit_report
from .session import SessionConfig, SortDirection
from .simulate import make_synthetic, run_simulation

TIMERS = {
    "monotonic": time.perf_counter,
    "null": lambda: 0.0,
}


def _add_simulate_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="JSONL dataset with labels")
    parser.add_argument("--config", help="JSON file with session config fields")
    parser.add_argument("--out", default="report.csv", help="report CSV path")
    parser.add_argument("--dataset-name", help="name recorded in the report")
    parser.add_argument("--timer", choices=sorted(TIMERS), default="monotonic")
    parser.add_argument("--bootstrap-size", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--mistake-threshold", type=int)
    parser.add_argument("--buffer-per-class", type=int)
    parser.add_argument("--select-per-class", type=int)
    parser.add_argument("--balancing", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--sort-direction", choices=[d.value for d in SortDirection])
    parser.add_argument("--train-batch-size", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--learning-rate", type=float)
    parser.add_argument("--train-seed", type=int)
    parser.add_argument("--seed", type=int)


def _config_from_args(args: argparse.Namespace) -> SessionConfig:
    values: dict = {}
    train: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        train.update(loaded.pop("train_config", {}))
        values.update(loaded)

    overrides = {
        "bootstrap_size": args.bootstrap_size,
        "batch_size": args.batch_size,
        "mistake_threshold": args.mistake_threshold,
        "buffer_per_class": args.buffer_per_class,
        "select_per_class": args.select_per_class,
        "balancing": args.balancing,
        "sort_direction": args.sort_direction,
        "seed": args.seed,
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    train_overrides = {
        "batch_size": args.train_batch_size,
        "epochs": args.epochs,
        "learning_rate": args.learning_rate,
        "seed": args.train_seed,
    }
    for key, value in train_overrides.items():
        if value is not None:
            train[key] = value

    values["train_config"] = TrainConfig(**train)
    return SessionConfig(**values)


def cmd_simulate(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    config = _config_from_args(args)
    name = args.dataset_name or Path(args.data).stem
    report = run_simulation(dataset, config, dataset_name=name, timer=TIMERS[args.timer])
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    emit_report(report, out)
    iterations_path, trainings_path = companion_paths(out)
    print(f"dataset            {report.dataset_name}")
    print(f"samples            {report.sample_count}")
    print(f"classes            {report.class_count}")
    print(f"model contribution {report.model_contribution_percent:.2f}%")
    print(f"training minutes   {report.training_minutes:.2f}")
    print(f"total minutes      {report.total_minutes:.2f}")
    print(f"report             {out}")
    print(f"iteration series   {iterations_path}")
    print(f"training series    {trainings_path}")
    return 0


def cmd_make_synthetic(args: argparse.Namespace) -> int:
    dataset = make_synthetic(args.classes, args.per_class, args.dim, args.separation, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(dataset, out)
    print(f"wrote {len(dataset)} samples ({len(dataset.classes)} classes, dim {dataset.dim}) to {out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ovalabel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the labelling HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data-dir", help="directory for relative dataset paths")
    serve.add_argument("--log-level", default="info")
    serve.set_defaults(func=cmd_serve)

    simulate = sub.add_parser("simulate", help="run a full session with a simulated annotator")
    _add_simulate_flags(simulate)
    simulate.set_defaults(func=cmd_simulate)

    synth = sub.add_parser("make-synthetic", help="generate a Gaussian-cluster dataset")
    synth.add_argument("--classes", type=int, required=True)
    synth.add_argument("--per-class", type=int, required=True)
    synth.add_argument("--dim", type=int, required=True)
    synth.add_argument("--separation", type=float, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True)
    synth.set_defaults(func=cmd_make_synthetic)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
