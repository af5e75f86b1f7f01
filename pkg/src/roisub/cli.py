"""Command-line entry point.

Settings come from three layers; later layers win:

1. built-in defaults
2. the YAML file given with ``--config``
3. command-line flags

Log level is read from the ``ROISUB_LOG`` environment variable.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bench import (
    ConfigError,
    ExperimentConfig,
    cmd_run,
    cmd_sweep_keyframing,
    cmd_sweep_threshold,
    cmd_tradeoff,
    config_from_dict,
    load_config,
    synthetic_specs,
)
from .dataset_io import generate_synthetic, write_sequence

log = logging.getLogger("roisub")

DETECTOR_CHOICES = {"oracle": "oracle", "trace": "trace", "meanshift": "mean_shift"}


def _interval_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("intervals must be non-negative integers")
    return values


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML experiment config")
    p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="sequence worker processes (default: CPU count)")
    p.add_argument("--interval", type=_interval_list, help="keyframing interval(s), e.g. 1,11,31")
    p.add_argument("--detector", choices=sorted(DETECTOR_CHOICES))
    p.add_argument("--mode", choices=["kalman", "memo", "chain"])
    p.add_argument("--sensor", choices=["B1", "B2", "B3"])
    p.add_argument("--readout", choices=["window", "colskip"])
    p.add_argument("--label", help="run label used in CSV rows")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roisub", description="Adaptive ROI subsampling benchmark harness"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one keyframing interval and write a manifest")
    _common(p)
    p = sub.add_parser("sweep-keyframing", help="AUC/power/FPS as a function of keyframing interval")
    _common(p)
    p = sub.add_parser("sweep-threshold", help="21-point success plot per interval")
    _common(p)
    p = sub.add_parser("gen-synthetic", help="write a synthetic suite to disk in OTB layout")
    _common(p)
    p.add_argument("--no-frames", action="store_true", help="write annotations only")

    p = sub.add_parser("tradeoff", help="AUC vs. power table from run manifests")
    p.add_argument("manifests", nargs="+", type=Path, help="manifest.json files or run directories")
    p.add_argument("--out", type=Path, default=Path("tradeoff.csv"), help="output CSV path")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else config_from_dict({})
    changes = {}
    if args.out is not None:
        changes["output_dir"] = str(args.out)
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.interval is not None:
        changes["intervals"] = args.interval
    if args.mode is not None:
        changes["mode"] = args.mode
    if args.sensor is not None:
        changes["sensor"] = args.sensor
    if args.readout is not None:
        changes["readout"] = args.readout
    if args.label is not None:
        changes["label"] = args.label
    if args.detector is not None:
        changes["detector"] = replace(config.detector, kind=DETECTOR_CHOICES[args.detector])
    return replace(config, **changes) if changes else config


def _setup_logging() -> None:
    level = os.environ.get("ROISUB_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "tradeoff":
            path = cmd_tradeoff(args.manifests, args.out)
            print(path)
            return 0

        config = resolve_config(args)
        out = Path(config.output_dir)
        if args.command == "gen-synthetic":
            if config.dataset_root is not None:
                raise ConfigError("gen-synthetic needs a synthetic dataset, not dataset.root")
            for spec in synthetic_specs(config):
                seq_dir = write_sequence(generate_synthetic(spec), out, with_frames=not args.no_frames)
                log.info("wrote %s", seq_dir)
            print(out)
            return 0
        if args.command == "run":
            summaries = [cmd_run(config, out)]
            print(out / "manifest.json")
        elif args.command == "sweep-keyframing":
            path, summaries = cmd_sweep_keyframing(config, out)
            print(path)
        else:
            path, summaries = cmd_sweep_threshold(config, out)
            print(path)
    except (ConfigError, FileNotFoundError, KeyError, ValueError, OSError) as exc:
        print(f"roisub: error: {exc}", file=sys.stderr)
        return 2

    failed = [f for s in summaries for f in s.failures]
    for seq_id, err in failed:
        print(f"roisub: sequence {seq_id} failed: {err}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
