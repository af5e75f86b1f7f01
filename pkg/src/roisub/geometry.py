"""Bounding boxes, IoU and sensor readout masks.

Boxes are stored as ``(x, y, w, h)`` in pixel units, the same layout used by
OTB/LaSOT annotation files. Masks use half-open integer intervals after
rounding the continuous box outward, so a predicted ROI is never clipped by
discretization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        # NaN is allowed (absent annotation); negative extents are not.
        if self.w < 0 or self.h < 0:
            raise ValueError(f"negative box extent: w={self.w}, h={self.h}")

    @classmethod
    def from_corners(cls, x1: float, y1: float, x2: float, y2: float) -> BoundingBox:
        return cls(x1, y1, x2 - x1, y2 - y1)

    @classmethod
    def from_center(cls, cx: float, cy: float, w: float, h: float) -> BoundingBox:
        return cls(cx - w / 2.0, cy - h / 2.0, w, h)

    @classmethod
    def invalid(cls) -> BoundingBox:
        nan = float("nan")
        return cls(nan, nan, nan, nan)

    @property
    def corners(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.x + self.w, self.y + self.h)

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        if self.is_degenerate:
            return 0.0
        return self.w * self.h

    @property
    def is_degenerate(self) -> bool:
        """True for zero-area or non-finite boxes."""
        vals = (self.x, self.y, self.w, self.h)
        if not all(math.isfinite(v) for v in vals):
            return True
        return self.w <= 0 or self.h <= 0

    def translate(self, dx: float, dy: float) -> BoundingBox:
        return BoundingBox(self.x + dx, self.y + dy, self.w, self.h)

    def scale(self, factor: float) -> BoundingBox:
        """Scale width and height about the box center."""
        cx, cy = self.center
        return BoundingBox.from_center(cx, cy, self.w * factor, self.h * factor)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.w, self.h)


@dataclass(frozen=True)
class FrameDims:
    width: int
    height: int

    def __post_init__(self) -> None:
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ValueError("frame dimensions must be integers")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"frame dimensions must be positive, got {self.width}x{self.height}")

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    @classmethod
    def of(cls, image: np.ndarray) -> FrameDims:
        return cls(int(image.shape[1]), int(image.shape[0]))


class ReadoutMode(str, enum.Enum):
    WINDOW = "window"
    COLUMN_SKIP = "colskip"


@dataclass(frozen=True)
class SensorMask:
    """Readout mask; ``active`` is ``(x0, y0, x1, y1)`` with half-open bounds."""

    dims: FrameDims
    mode: ReadoutMode
    active: tuple[int, int, int, int]

    @property
    def is_empty(self) -> bool:
        x0, y0, x1, y1 = self.active
        return x1 <= x0 or y1 <= y0

    @property
    def window(self) -> tuple[int, int, int, int]:
        """Pixel rectangle actually read out, after applying the readout mode."""
        if self.is_empty:
            return (0, 0, 0, 0)
        x0, y0, x1, y1 = self.active
        if self.mode is ReadoutMode.COLUMN_SKIP:
            return (x0, 0, x1, self.dims.height)
        return (x0, y0, x1, y1)

    def to_array(self) -> np.ndarray:
        arr = np.zeros((self.dims.height, self.dims.width), dtype=bool)
        x0, y0, x1, y1 = self.window
        arr[y0:y1, x0:x1] = True
        return arr

    @classmethod
    def full(cls, dims: FrameDims, mode: ReadoutMode = ReadoutMode.WINDOW) -> SensorMask:
        return cls(dims, ReadoutMode(mode), (0, 0, dims.width, dims.height))


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0 when either box is degenerate."""
    if a.is_degenerate or b.is_degenerate:
        return 0.0
    ix = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    iy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    if union <= 0:
        return 0.0
    return min(1.0, max(0.0, inter / union))


def rasterize_mask(
    pred: BoundingBox, dims: FrameDims, mode: ReadoutMode | str = ReadoutMode.WINDOW
) -> SensorMask:
    mode = ReadoutMode(mode)
    if pred.is_degenerate:
        return SensorMask(dims, mode, (0, 0, 0, 0))
    x0 = max(0, math.floor(pred.x))
    y0 = max(0, math.floor(pred.y))
    x1 = min(dims.width, math.ceil(pred.x + pred.w))
    y1 = min(dims.height, math.ceil(pred.y + pred.h))
    if x1 <= x0 or y1 <= y0:
        return SensorMask(dims, mode, (0, 0, 0, 0))
    return SensorMask(dims, mode, (x0, y0, x1, y1))


def active_pixel_count(mask: SensorMask) -> int:
    x0, y0, x1, y1 = mask.window
    return (x1 - x0) * (y1 - y0)


def subsample(frame: np.ndarray, mask: SensorMask) -> np.ndarray:
    """Zero every pixel the mask does not read out."""
    if frame.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D image, got shape {frame.shape}")
    if FrameDims.of(frame) != mask.dims:
        raise ValueError(
            f"frame is {frame.shape[1]}x{frame.shape[0]} but mask is "
            f"{mask.dims.width}x{mask.dims.height}"
        )
    out = np.zeros_like(frame)
    x0, y0, x1, y1 = mask.window
    out[y0:y1, x0:x1] = frame[y0:y1, x0:x1]
    return out
