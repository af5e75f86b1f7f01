"""Experiment configuration and the batch runner behind the CLI.

A run executes :func:`roisub.pipeline.run_sequence` over every sequence of
a dataset (a directory tree or a seeded synthetic suite), then reduces the
per-sequence results into one manifest. Sequence jobs may fan out to a
process pool; results are always merged in sequence order so outputs are
independent of worker count.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import __version__
from .dataset_io import (
    ConstantVelocity,
    RandomWalk,
    Sequence,
    Sinusoidal,
    SyntheticSpec,
    generate_synthetic,
    list_dataset,
    load_dataset_sequence,
)
from .detectors import MeanShiftConfig, MeanShiftDetector, OracleDetector, TraceDetector
from .geometry import FrameDims, ReadoutMode
from .kalman_roi import DEFAULT_P0_DIAG, DEFAULT_Q_DIAG, DEFAULT_R_DIAG, KalmanParams
from .metrics import AGGREGATION, INEQUALITY, default_thresholds, sequence_auc, success_curve
from .pipeline import (
    LATENCY_PRESETS,
    FrameRecord,
    FrameSchedule,
    LatencyModel,
    PredictorMode,
    fps_estimate,
    mean_iou,
    run_sequence,
    scored_ious,
)
from .power_model import SENSOR_PRESETS, SensorModel, sequence_power, tradeoff_table

log = logging.getLogger("roisub")

INTERVAL_MAPPING = "interval i -> k = max(i - 1, 0) predicted frames between keyframes"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def fmt(value: float) -> str:
    return f"{value:.6f}"


def _round6(value: float) -> float:
    return float(fmt(value))


# -- configuration --------------------------------------------------------------


def _build(cls, data: Optional[dict], where: str):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    for key, value in data.items():
        if isinstance(value, list):
            data[key] = tuple(value)
    return cls(**data)


@dataclass(frozen=True)
class DetectorConfig:
    kind: str = "oracle"
    noise_sigma: float = 0.0
    drop_rate: float = 0.0
    box_scale: float = 1.0
    trace_dir: Optional[str] = None
    bins_per_channel: int = 16
    max_iters: int = 20
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        kind = {"meanshift": "mean_shift", "ms": "mean_shift"}.get(self.kind, self.kind)
        if kind not in ("oracle", "trace", "mean_shift"):
            raise ConfigError(f"unknown detector kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "trace" and not self.trace_dir:
            raise ConfigError("trace detector needs detector.trace_dir")


@dataclass(frozen=True)
class SuiteConfig:
    """A seeded family of synthetic sequences."""

    count: int = 10
    width: int = 640
    height: int = 480
    n_frames: int = 150
    box_size: tuple = (40.0, 40.0)
    motion: str = "constant_velocity"
    speed: tuple = (2.0, 4.0)
    amplitude: float = 40.0
    period: float = 60.0
    step_sigma: float = 2.0
    target_color: tuple = (220, 40, 40)
    background_color: tuple = (30, 90, 30)

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError("dataset.suite.count must be >= 1")
        if self.motion not in ("constant_velocity", "sinusoidal", "random_walk", "static"):
            raise ConfigError(f"unknown suite motion {self.motion!r}")

    def specs(self, seed: int) -> list[SyntheticSpec]:
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
        dims = FrameDims(self.width, self.height)
        w, h = (float(v) for v in self.box_size)
        width = len(str(self.count - 1))
        out = []
        for i in range(self.count):
            start = (
                float(rng.uniform(0.25, 0.75) * (self.width - w)),
                float(rng.uniform(0.25, 0.75) * (self.height - h)),
            )
            angle = rng.uniform(0.0, 2.0 * math.pi)
            speed = rng.uniform(*self.speed)
            if self.motion == "constant_velocity":
                motion = ConstantVelocity(float(speed * math.cos(angle)), float(speed * math.sin(angle)))
            elif self.motion == "static":
                motion = ConstantVelocity(0.0, 0.0)
            elif self.motion == "sinusoidal":
                motion = Sinusoidal(self.amplitude, self.period)
            else:
                motion = RandomWalk(self.step_sigma)
            out.append(
                SyntheticSpec(
                    dims=dims,
                    n_frames=self.n_frames,
                    motion=motion,
                    start=start,
                    box_size=(w, h),
                    target_color=tuple(self.target_color),
                    background_color=tuple(self.background_color),
                    rng_seed=int(rng.integers(2**31)),
                    id=f"syn{i:0{width}d}",
                )
            )
        return out


def _spec_from_dict(d: dict, index: int) -> SyntheticSpec:
    d = dict(d)
    motion = d.pop("motion", {"kind": "constant_velocity", "vx": 2.0, "vy": 0.0})
    motion = dict(motion)
    kind = motion.pop("kind", "constant_velocity")
    cls = {"constant_velocity": ConstantVelocity, "sinusoidal": Sinusoidal, "random_walk": RandomWalk}.get(kind)
    if cls is None:
        raise ConfigError(f"dataset.synthetic[{index}]: unknown motion {kind!r}")
    try:
        spec = SyntheticSpec(
            dims=FrameDims(int(d.pop("width")), int(d.pop("height"))),
            n_frames=int(d.pop("n_frames")),
            motion=cls(**motion),
            start=tuple(d.pop("start", (0.0, 0.0))),
            box_size=tuple(d.pop("box_size", (20.0, 20.0))),
            target_color=tuple(d.pop("target_color", (220, 40, 40))),
            background_color=tuple(d.pop("background_color", (30, 90, 30))),
            rng_seed=int(d.pop("rng_seed", index)),
            id=str(d.pop("id", f"synthetic{index}")),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"dataset.synthetic[{index}]: {exc}") from None
    if d:
        raise ConfigError(f"dataset.synthetic[{index}]: unknown key(s) {', '.join(sorted(d))}")
    return spec


@dataclass(frozen=True)
class KalmanConfig:
    q_diag: tuple = DEFAULT_Q_DIAG
    r_diag: tuple = DEFAULT_R_DIAG
    p0_diag: tuple = DEFAULT_P0_DIAG

    def params(self) -> KalmanParams:
        return KalmanParams.constant_velocity(q_diag=self.q_diag, r_diag=self.r_diag)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_root: Optional[str] = None
    synthetic: tuple = ()
    suite: Optional[SuiteConfig] = None
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    mode: str = "kalman"
    intervals: tuple = (11,)
    sensor: Any = "B3"
    kalman: KalmanConfig = field(default_factory=KalmanConfig)
    latency: Any = "eco_kf"
    readout: str = "window"
    output_dir: str = "results"
    seed: int = 0
    workers: Optional[int] = None
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.intervals:
            raise ConfigError("at least one keyframing interval is required")
        if any(int(i) != i or i < 0 for i in self.intervals):
            raise ConfigError(f"intervals must be non-negative integers: {self.intervals}")
        try:
            PredictorMode.parse(self.mode)
            ReadoutMode(self.readout)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        sources = sum(x is not None and x != () for x in (self.dataset_root, self.suite, self.synthetic or None))
        if sources > 1:
            raise ConfigError("choose exactly one of dataset.root, dataset.synthetic, dataset.suite")
        self.sensor_model()
        self.latency_model()

    @property
    def predictor_mode(self) -> PredictorMode:
        return PredictorMode.parse(self.mode)

    def sensor_model(self) -> SensorModel:
        if isinstance(self.sensor, SensorModel):
            return self.sensor
        if isinstance(self.sensor, str):
            if self.sensor.upper() not in SENSOR_PRESETS:
                raise ConfigError(f"unknown sensor {self.sensor!r}; presets: {sorted(SENSOR_PRESETS)}")
            return SENSOR_PRESETS[self.sensor.upper()]
        if isinstance(self.sensor, dict):
            d = dict(self.sensor)
            base = d.pop("preset", None)
            if base is not None:
                return replace(SENSOR_PRESETS[base.upper()], **d)
            return SensorModel(**d)
        raise ConfigError(f"bad sensor entry {self.sensor!r}")

    def latency_model(self) -> LatencyModel:
        if isinstance(self.latency, LatencyModel):
            return self.latency
        if isinstance(self.latency, str):
            if self.latency not in LATENCY_PRESETS:
                raise ConfigError(f"unknown latency preset {self.latency!r}; presets: {sorted(LATENCY_PRESETS)}")
            return LATENCY_PRESETS[self.latency]
        if isinstance(self.latency, dict):
            return _build(LatencyModel, self.latency, "latency")
        raise ConfigError(f"bad latency entry {self.latency!r}")

    def run_label(self, interval: Optional[int] = None) -> str:
        base = self.label or f"{self.predictor_mode.value}-{self.detector.kind}"
        return base if interval is None else f"{base}@{interval}"

    def snapshot(self) -> dict:
        """Config as plain data, without fields that must not affect results."""
        snap = {
            "dataset_root": self.dataset_root,
            "synthetic": [_spec_dict(s) for s in self.synthetic],
            "suite": asdict(self.suite) if self.suite else None,
            "detector": asdict(self.detector),
            "mode": self.predictor_mode.value,
            "intervals": list(self.intervals),
            "sensor": asdict(self.sensor_model()),
            "kalman": asdict(self.kalman),
            "latency": asdict(self.latency_model()),
            "readout": self.readout,
            "seed": self.seed,
            "label": self.label,
        }
        return json.loads(json.dumps(snap))


def _spec_dict(spec: SyntheticSpec) -> dict:
    d = asdict(spec)
    d["motion"] = {"kind": _MOTION_NAMES[type(spec.motion)], **asdict(spec.motion)}
    return d


_MOTION_NAMES = {ConstantVelocity: "constant_velocity", Sinusoidal: "sinusoidal", RandomWalk: "random_walk"}


def config_from_dict(data: dict) -> ExperimentConfig:
    data = dict(data or {})
    kwargs: dict[str, Any] = {}
    dataset = dict(data.pop("dataset", {}) or {})
    if "root" in dataset:
        kwargs["dataset_root"] = str(dataset.pop("root"))
    if "synthetic" in dataset:
        kwargs["synthetic"] = tuple(
            _spec_from_dict(d, i) for i, d in enumerate(dataset.pop("synthetic") or [])
        )
    if "suite" in dataset:
        kwargs["suite"] = _build(SuiteConfig, dataset.pop("suite"), "dataset.suite")
    if dataset:
        raise ConfigError(f"dataset: unknown key(s) {', '.join(sorted(dataset))}")
    if "detector" in data:
        kwargs["detector"] = _build(DetectorConfig, data.pop("detector"), "detector")
    if "kalman" in data:
        kwargs["kalman"] = _build(KalmanConfig, data.pop("kalman"), "kalman")
    if "intervals" in data:
        iv = data.pop("intervals")
        kwargs["intervals"] = tuple(int(i) for i in (iv if isinstance(iv, (list, tuple)) else [iv]))
    for key in ("mode", "sensor", "latency", "readout", "output_dir", "seed", "workers", "label"):
        if key in data:
            kwargs[key] = data.pop(key)
    if data:
        raise ConfigError(f"unknown top-level key(s) {', '.join(sorted(data))}")
    return ExperimentConfig(**kwargs)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(data or {})


# -- running ---------------------------------------------------------------------


def sequence_ids(config: ExperimentConfig) -> list[str]:
    if config.dataset_root is not None:
        root = Path(config.dataset_root)
        if not root.is_dir():
            raise FileNotFoundError(f"dataset directory not found: {root}")
        return list_dataset(root)
    return [s.id for s in synthetic_specs(config)]


def synthetic_specs(config: ExperimentConfig) -> list[SyntheticSpec]:
    if config.synthetic:
        return list(config.synthetic)
    suite = config.suite or SuiteConfig()
    return suite.specs(config.seed)


def load_sequence_by_index(config: ExperimentConfig, index: int, seq_id: str) -> Sequence:
    if config.dataset_root is not None:
        return load_dataset_sequence(config.dataset_root, seq_id)
    return generate_synthetic(synthetic_specs(config)[index])


def _sequence_seed(config: ExperimentConfig, index: int) -> int:
    return int(np.random.SeedSequence([config.seed, index]).generate_state(1)[0])


def make_detector(config: ExperimentConfig, seq_id: str, index: int):
    d = config.detector
    if d.kind == "oracle":
        return OracleDetector(d.noise_sigma, d.drop_rate, _sequence_seed(config, index), d.box_scale)
    if d.kind == "trace":
        return TraceDetector(Path(d.trace_dir) / f"{seq_id}.txt")
    return MeanShiftDetector(MeanShiftConfig(d.bins_per_channel, d.max_iters, d.epsilon))


@dataclass
class SequenceResult:
    seq_id: str
    records: list[FrameRecord] = field(default_factory=list)
    error: Optional[str] = None


def run_one(config: ExperimentConfig, interval: int, index: int, seq_id: str) -> SequenceResult:
    try:
        seq = load_sequence_by_index(config, index, seq_id)
        detector = make_detector(config, seq_id, index)
        records = run_sequence(
            seq.frames,
            seq.ground_truth,
            detector,
            mode=config.predictor_mode,
            schedule=FrameSchedule.from_interval(interval),
            kf_params=config.kalman.params(),
            p0_diag=config.kalman.p0_diag,
            latency=config.latency_model(),
            dims=seq.dims,
            readout=config.readout,
        )
    except Exception as exc:  # reported per sequence; the run continues
        return SequenceResult(seq_id, error=f"{type(exc).__name__}: {exc}")
    return SequenceResult(seq_id, records)


def _run_one_star(args):
    return run_one(*args)


def run_all(config: ExperimentConfig, interval: int, workers: Optional[int] = None) -> list[SequenceResult]:
    ids = sequence_ids(config)
    jobs = [(config, interval, i, sid) for i, sid in enumerate(ids)]
    workers = workers if workers is not None else (config.workers or os.cpu_count() or 1)
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        # map() yields in submission order, which keeps the reduce deterministic
        return list(pool.map(_run_one_star, jobs))


# -- outputs ----------------------------------------------------------------------


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def conventions(config: ExperimentConfig, **extra) -> dict:
    meta = {
        "inequality": INEQUALITY,
        "aggregation": AGGREGATION,
        "interval_mapping": INTERVAL_MAPPING,
        "readout_mode": ReadoutMode(config.readout).value,
        "mode": config.predictor_mode.value,
        "detector": config.detector.kind,
        "sensor": config.sensor_model().name,
        "power_units": "model watts",
        "degenerate_ground_truth": "excluded from metric denominators",
        "tool_version": __version__,
    }
    meta.update(extra)
    return meta


def write_csv(path: Path, header: list[str], rows: list[list[Any]], meta: dict) -> None:
    atomic_write(path, _csv_text(header, rows))
    atomic_write(path.with_suffix(".meta.json"), _dump_json(meta))


RECORD_HEADER = [
    "frame", "phase", "pred_x", "pred_y", "pred_w", "pred_h", "det_valid",
    "det_x", "det_y", "det_w", "det_h", "active_pixels", "total_pixels",
    "iou", "latency_ms", "retry", "empty_mask",
]


def _num(v: Optional[float]) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return fmt(v)


def record_rows(records: list[FrameRecord]) -> list[list[str]]:
    rows = []
    for r in records:
        det = r.detection
        det_cols = (
            [str(int(det.valid))] + [_num(v) for v in det.box.as_tuple()]
            if det is not None
            else ["", "", "", "", ""]
        )
        rows.append(
            [str(r.frame_index), r.phase.value]
            + [_num(v) for v in r.predicted_box.as_tuple()]
            + det_cols
            + [str(r.active_pixels), str(r.total_pixels), _num(r.iou_vs_gt), fmt(r.latency_ms),
               str(int(r.retry)), str(int(r.empty_mask))]
        )
    return rows


@dataclass
class RunSummary:
    interval: int
    label: str
    manifest: dict
    per_sequence_ious: list[list[float]]
    failures: list[tuple[str, str]]

    @property
    def ok(self) -> bool:
        return not self.failures


def cmd_run(
    config: ExperimentConfig,
    out_dir: Optional[str | os.PathLike] = None,
    interval: Optional[int] = None,
    workers: Optional[int] = None,
) -> RunSummary:
    """Run one keyframing interval over the dataset and write its outputs."""
    interval = config.intervals[0] if interval is None else int(interval)
    out = Path(out_dir if out_dir is not None else config.output_dir)
    sensor = config.sensor_model()
    latency = config.latency_model()
    mode = config.predictor_mode
    label = config.label or config.run_label(interval)
    results = run_all(config, interval, workers)

    seq_entries = {}
    ious_all: list[list[float]] = []
    powers, savings = [], []
    total_frames, algo_ms, system_ms = 0, 0.0, 0.0
    failures = []
    for res in results:
        if res.error is not None:
            log.error("sequence %s failed: %s", res.seq_id, res.error)
            failures.append((res.seq_id, res.error))
            continue
        ious = scored_ious(res.records)
        rel = Path("sequences") / f"{res.seq_id}.csv"
        write_csv(out / rel, RECORD_HEADER, record_rows(res.records),
                  conventions(config, sequence=res.seq_id, interval=interval))
        report = sequence_power(sensor, res.records, config.readout)
        entry = {
            "records": rel.as_posix(),
            "frames": len(res.records),
            "mean_iou": _round6(mean_iou(res.records)),
            "mean_power": _round6(report.mean_power),
            "savings_ratio": _round6(report.savings_ratio),
        }
        if ious:
            entry["auc"] = _round6(sequence_auc(ious))
            ious_all.append(ious)
        seq_entries[res.seq_id] = entry
        powers.append(report.mean_power)
        savings.append(report.savings_ratio)
        afps, sfps = fps_estimate(res.records, latency, mode) if latency.keyframe_cost(mode) > 0 else (math.inf, math.inf)
        n = len(res.records)
        total_frames += n
        if math.isfinite(afps):
            algo_ms += 1000.0 * n / afps
            system_ms += 1000.0 * n / sfps

    aggregate: dict[str, Any] = {"sequences": len(seq_entries), "failed": len(failures)}
    if ious_all:
        curves = [success_curve(i).precision for i in ious_all]
        mean_curve = [math.fsum(c[j] for c in curves) / len(curves) for j in range(len(curves[0]))]
        aggregate["auc"] = _round6(math.fsum(sequence_auc(i) for i in ious_all) / len(ious_all))
        aggregate["success_curve"] = [_round6(v) for v in mean_curve]
    if powers:
        aggregate["mean_power"] = _round6(math.fsum(powers) / len(powers))
        aggregate["savings_ratio"] = _round6(math.fsum(savings) / len(savings))
    if algo_ms > 0:
        aggregate["algorithm_fps"] = _round6(1000.0 * total_frames / algo_ms)
        aggregate["system_fps"] = _round6(1000.0 * total_frames / system_ms)

    agg_doc = {
        "label": label,
        "interval": interval,
        "k": FrameSchedule.from_interval(interval).k,
        "aggregate": aggregate,
        "conventions": conventions(config, interval=interval),
    }
    manifest = {
        **agg_doc,
        "tool_version": __version__,
        "config": config.snapshot(),
        "per_sequence": seq_entries,
        "failures": [{"sequence": s, "error": e} for s, e in failures],
    }
    if "success_curve" in aggregate:
        write_csv(
            out / "success_plot.csv",
            ["threshold", "precision"],
            [[fmt(t), fmt(p)] for t, p in zip(default_thresholds(), aggregate["success_curve"])],
            conventions(config, interval=interval, label=label),
        )
    atomic_write(out / "aggregate.json", _dump_json(agg_doc))
    atomic_write(out / "manifest.json", _dump_json(manifest))
    return RunSummary(interval, label, manifest, ious_all, failures)


def cmd_sweep_keyframing(
    config: ExperimentConfig, out_dir: Optional[str | os.PathLike] = None, workers: Optional[int] = None
) -> tuple[Path, list[RunSummary]]:
    out = Path(out_dir if out_dir is not None else config.output_dir)
    summaries = [
        cmd_run(config, out / f"interval_{i}", interval=i, workers=workers) for i in config.intervals
    ]
    rows = []
    for s in summaries:
        agg = s.manifest["aggregate"]
        rows.append([
            str(s.interval),
            fmt(agg.get("auc", float("nan"))),
            fmt(agg.get("mean_power", float("nan"))),
            fmt(agg.get("algorithm_fps", float("nan"))),
            fmt(agg.get("system_fps", float("nan"))),
        ])
    path = out / "keyframing.csv"
    write_csv(path, ["interval", "auc", "mean_power", "algorithm_fps", "system_fps"], rows,
              conventions(config, intervals=list(config.intervals), label=config.run_label()))
    return path, summaries


def cmd_sweep_threshold(
    config: ExperimentConfig, out_dir: Optional[str | os.PathLike] = None, workers: Optional[int] = None
) -> tuple[Path, list[RunSummary]]:
    out = Path(out_dir if out_dir is not None else config.output_dir)
    summaries = [
        cmd_run(config, out / f"interval_{i}", interval=i, workers=workers) for i in config.intervals
    ]
    thresholds = default_thresholds()
    header = ["label"] + [f"iou>{fmt(t)}" for t in thresholds]
    rows = []
    for s in summaries:
        curve = s.manifest["aggregate"].get("success_curve", [0.0] * len(thresholds))
        rows.append([config.run_label(s.interval)] + [fmt(v) for v in curve])
    path = out / "success_plot.csv"
    write_csv(path, header, rows, conventions(config, thresholds=[fmt(t) for t in thresholds]))
    return path, summaries


def read_manifest(path: str | os.PathLike) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.json"
    return json.loads(path.read_text(encoding="utf-8"))


def cmd_tradeoff(manifests: list[str | os.PathLike], out_path: str | os.PathLike) -> Path:
    if not manifests:
        raise ValueError("tradeoff needs at least one manifest")
    runs = []
    for m in manifests:
        doc = read_manifest(m)
        agg = doc["aggregate"]
        if "auc" not in agg or "mean_power" not in agg:
            raise ValueError(f"{m}: manifest has no aggregate auc/mean_power")
        runs.append((doc["label"], agg["auc"], agg["mean_power"]))
    rows = [[r.label, fmt(r.auc), fmt(r.mean_power)] for r in tradeoff_table(runs)]
    out_path = Path(out_path)
    write_csv(out_path, ["label", "auc", "mean_power"], rows,
              {"sort": "auc descending, ties by lower mean_power", "power_units": "model watts",
               "sources": [str(Path(m)) for m in manifests], "tool_version": __version__})
    return out_path
