"""Detectors that turn (possibly subsampled) frames into measurement boxes.

Deep trackers are represented by two stand-ins: a noisy oracle built from
ground truth and a replay of boxes exported from any external model. A
fixed-window color-histogram mean-shift tracker is implemented natively.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence, Union

import numpy as np

from .dataset_io import read_boxes
from .geometry import BoundingBox


class DetectorError(RuntimeError):
    """A detector was called in a state it cannot serve."""


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    valid: bool = True

    @classmethod
    def failed(cls) -> Detection:
        return cls(BoundingBox.invalid(), valid=False)


class Detector(Protocol):
    def reset(self, frame: Optional[np.ndarray], box: BoundingBox) -> None:
        """Seed with the first-frame annotation."""

    def detect(
        self,
        frame: Optional[np.ndarray],
        frame_index: int,
        ground_truth: Optional[BoundingBox] = None,
        prior: Optional[BoundingBox] = None,
    ) -> Detection:
        ...


class OracleDetector:
    """Ground truth plus i.i.d. Gaussian noise, with random dropouts.

    ``box_scale`` inflates (>1) or tightens (<1) the reported box about its
    center, which emulates detectors that produce looser or tighter ROIs.
    """

    needs_frames = False

    def __init__(
        self,
        noise_sigma: float = 0.0,
        drop_rate: float = 0.0,
        rng_seed: Union[int, np.random.SeedSequence, None] = 0,
        box_scale: float = 1.0,
    ):
        if noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not 0.0 <= drop_rate <= 1.0:
            raise ValueError("drop_rate must be in [0, 1]")
        if box_scale <= 0:
            raise ValueError("box_scale must be > 0")
        self.noise_sigma = float(noise_sigma)
        self.drop_rate = float(drop_rate)
        self.box_scale = float(box_scale)
        self.rng_seed = rng_seed
        self.rng = np.random.default_rng(rng_seed)

    def reset(self, frame, box):
        self.rng = np.random.default_rng(self.rng_seed)

    def detect(self, frame, frame_index, ground_truth=None, prior=None):
        if ground_truth is None:
            raise DetectorError(f"oracle detector needs ground truth (frame {frame_index})")
        # draw both every call so the stream does not depend on which frames drop
        noise = self.rng.normal(0.0, 1.0, size=4) * self.noise_sigma
        dropped = self.rng.random() < self.drop_rate
        if dropped or ground_truth.is_degenerate:
            return Detection.failed()
        box = ground_truth.scale(self.box_scale) if self.box_scale != 1.0 else ground_truth
        x, y, w, h = np.asarray(box.as_tuple()) + noise
        return Detection(BoundingBox(float(x), float(y), max(float(w), 0.0), max(float(h), 0.0)))


class TraceDetector:
    """Replays boxes from a trace file (same grammar as annotation files)."""

    needs_frames = False

    def __init__(self, boxes: Union[Sequence[BoundingBox], str, os.PathLike]):
        if isinstance(boxes, (str, os.PathLike)):
            self.path = str(boxes)
            boxes = read_boxes(boxes)
        else:
            self.path = None
        self.boxes = list(boxes)

    def reset(self, frame, box):
        pass

    def detect(self, frame, frame_index, ground_truth=None, prior=None):
        if not 0 <= frame_index < len(self.boxes):
            where = f" in {self.path}" if self.path else ""
            raise DetectorError(
                f"frame {frame_index} outside trace of {len(self.boxes)} frames{where}"
            )
        box = self.boxes[frame_index]
        if box.is_degenerate:
            return Detection.failed()
        return Detection(box)


# -- mean shift -------------------------------------------------------------------


@dataclass(frozen=True)
class MeanShiftConfig:
    bins_per_channel: int = 16
    max_iters: int = 20
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        if not 2 <= self.bins_per_channel <= 256:
            raise ValueError("bins_per_channel must be in [2, 256]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")


@dataclass
class MeanShiftModel:
    hist: np.ndarray
    width: float
    height: float
    config: MeanShiftConfig = field(default_factory=MeanShiftConfig)


def _as_rgb(frame: np.ndarray) -> np.ndarray:
    if frame.ndim == 2:
        return np.repeat(frame[:, :, None], 3, axis=2)
    if frame.ndim == 3 and frame.shape[2] == 3:
        return frame
    raise ValueError(f"expected an (H, W) or (H, W, 3) image, got {frame.shape}")


def _bin_index(pixels: np.ndarray, bins: int) -> np.ndarray:
    """Joint RGB bin of each uint8 pixel; ``pixels`` is (..., 3)."""
    q = (pixels.astype(np.int64) * bins) // 256
    return (q[..., 0] * bins + q[..., 1]) * bins + q[..., 2]


def _coverage(lo: float, hi: float, size: int) -> tuple[int, np.ndarray]:
    """First pixel index and per-pixel overlap of [lo, hi) with the pixel grid."""
    lo, hi = max(lo, 0.0), min(hi, float(size))
    if hi <= lo:
        return 0, np.zeros(0)
    first, last = int(np.floor(lo)), int(np.ceil(hi))
    edges = np.arange(first, last + 1, dtype=float)
    cover = np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo)
    return first, cover


def _window(frame_shape, cx: float, cy: float, w: float, h: float):
    """Window centered at (cx, cy) as pixel slices plus fractional coverage."""
    H, W = frame_shape[:2]
    x0, cov_x = _coverage(cx - w / 2.0, cx + w / 2.0, W)
    y0, cov_y = _coverage(cy - h / 2.0, cy + h / 2.0, H)
    if cov_x.size == 0 or cov_y.size == 0:
        return None
    return x0, y0, cov_y[:, None] * cov_x[None, :]


def init_mean_shift(
    frame: np.ndarray, seed_box: BoundingBox, config: MeanShiftConfig | None = None
) -> MeanShiftModel:
    config = config or MeanShiftConfig()
    if seed_box.is_degenerate:
        raise ValueError(f"degenerate mean-shift seed box {seed_box}")
    rgb = _as_rgb(frame)
    cx, cy = seed_box.center
    win = _window(rgb.shape, cx, cy, seed_box.w, seed_box.h)
    if win is None:
        raise ValueError(f"seed box {seed_box} covers no pixels of the frame")
    x0, y0, cover = win
    patch = rgb[y0 : y0 + cover.shape[0], x0 : x0 + cover.shape[1]]
    idx = _bin_index(patch, config.bins_per_channel).ravel()
    hist = np.bincount(idx, weights=cover.ravel(), minlength=config.bins_per_channel**3)
    hist /= hist.sum()
    return MeanShiftModel(hist=hist, width=seed_box.w, height=seed_box.h, config=config)


@dataclass(frozen=True)
class MeanShiftResult:
    detection: Detection
    iterations: int


def mean_shift_iterate(
    model: MeanShiftModel, frame: np.ndarray, prev_box: BoundingBox
) -> MeanShiftResult:
    cfg = model.config
    rgb = _as_rgb(frame)
    w, h = model.width, model.height
    if prev_box.is_degenerate:
        return MeanShiftResult(Detection.failed(), 0)
    cx, cy = prev_box.center
    iterations = 0
    while iterations < cfg.max_iters:
        iterations += 1
        win = _window(rgb.shape, cx, cy, w, h)
        if win is None:
            return MeanShiftResult(Detection.failed(), iterations)
        x0, y0, cover = win
        rows, cols = cover.shape
        idx = _bin_index(rgb[y0 : y0 + rows, x0 : x0 + cols], cfg.bins_per_channel)
        cand = np.bincount(idx.ravel(), weights=cover.ravel(), minlength=model.hist.size)
        cand /= cand.sum()
        # bins of covered pixels have cand > 0; zero-coverage pixels get weight 0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(cand[idx] > 0, model.hist[idx] / cand[idx], 0.0)
        weights = cover * np.sqrt(ratio)
        total = weights.sum()
        if not total > 0:
            return MeanShiftResult(Detection.failed(), iterations)
        ys, xs = np.mgrid[y0 : y0 + rows, x0 : x0 + cols]
        new_cx = float((weights * (xs + 0.5)).sum() / total)
        new_cy = float((weights * (ys + 0.5)).sum() / total)
        shift = np.hypot(new_cx - cx, new_cy - cy)
        cx, cy = new_cx, new_cy
        if shift < cfg.epsilon:
            break
    return MeanShiftResult(Detection(BoundingBox.from_center(cx, cy, w, h)), iterations)


def mean_shift_track(
    model: MeanShiftModel, frame: np.ndarray, prev_box: BoundingBox
) -> Detection:
    return mean_shift_iterate(model, frame, prev_box).detection


class MeanShiftDetector:
    """Mean-shift tracker seeded from the first-frame annotation.

    Each call starts from ``prior`` when the pipeline supplies one, otherwise
    from the previous output.
    """

    needs_frames = True

    def __init__(self, config: MeanShiftConfig | None = None):
        self.config = config or MeanShiftConfig()
        self.model: MeanShiftModel | None = None
        self.last_box: BoundingBox | None = None
        self.last_iterations = 0

    def reset(self, frame, box):
        if frame is None:
            raise DetectorError("mean-shift detector needs pixel data to seed")
        self.model = init_mean_shift(frame, box, self.config)
        self.last_box = box

    def detect(self, frame, frame_index, ground_truth=None, prior=None):
        if self.model is None:
            raise DetectorError("mean-shift detector used before reset()")
        if frame is None:
            raise DetectorError(f"mean-shift detector needs pixel data (frame {frame_index})")
        start = prior if prior is not None and not prior.is_degenerate else self.last_box
        result = mean_shift_iterate(self.model, frame, start)
        self.last_iterations = result.iterations
        if result.detection.valid:
            self.last_box = result.detection.box
        return result.detection
