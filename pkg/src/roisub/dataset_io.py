"""Sequence loading (OTB100/LaSOT layout) and a synthetic sequence generator.

Annotation and trace files share one grammar: UTF-8 text, one frame per
line, four numbers ``x,y,w,h`` separated by commas and/or whitespace.
``NaN`` tokens or an all-zero line mark a frame with no usable box.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence as SequenceT, Union

import numpy as np

from .geometry import BoundingBox, FrameDims

GROUND_TRUTH_NAMES = ("groundtruth_rect.txt", "groundtruth.txt")
FRAME_DIR_NAMES = ("img", "frames")
FRAME_SUFFIXES = (".ppm", ".pgm", ".pnm", ".npy")
DEFAULT_FPS = 30.0

_SPLIT = re.compile(r"[,\s]+")


class AnnotationError(ValueError):
    """Malformed annotation/trace file."""


# -- box text grammar ---------------------------------------------------------


def parse_box_line(line: str, lineno: int = 0) -> BoundingBox:
    tokens = [t for t in _SPLIT.split(line.strip()) if t]
    if len(tokens) != 4:
        raise AnnotationError(f"line {lineno}: expected 4 values, got {len(tokens)}: {line.strip()!r}")
    try:
        # float() is locale-independent; only '.' is accepted as decimal point
        vals = [float(t) for t in tokens]
    except ValueError:
        raise AnnotationError(f"line {lineno}: non-numeric value in {line.strip()!r}") from None
    if any(math.isnan(v) for v in vals):
        return BoundingBox.invalid()
    if any(math.isinf(v) for v in vals):
        raise AnnotationError(f"line {lineno}: infinite value in {line.strip()!r}")
    x, y, w, h = vals
    if w < 0 or h < 0:
        raise AnnotationError(f"line {lineno}: negative width/height in {line.strip()!r}")
    return BoundingBox(x, y, w, h)


def parse_boxes(text: str) -> list[BoundingBox]:
    boxes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        boxes.append(parse_box_line(line, lineno))
    return boxes


def read_boxes(path: Union[str, os.PathLike]) -> list[BoundingBox]:
    return parse_boxes(Path(path).read_text(encoding="utf-8"))


def _fmt_number(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def format_box(box: BoundingBox) -> str:
    if any(math.isnan(v) for v in box.as_tuple()):
        return "NaN,NaN,NaN,NaN"
    return ",".join(_fmt_number(v) for v in box.as_tuple())


def write_boxes(path: Union[str, os.PathLike], boxes: Iterable[BoundingBox]) -> None:
    lines = [format_box(b) for b in boxes]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- images -------------------------------------------------------------------


def _netpbm_tokens(data: bytes) -> Iterator[tuple[bytes, int]]:
    """Yield header tokens and the offset just past each one."""
    i, n = 0, len(data)
    while i < n:
        c = data[i : i + 1]
        if c == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            yield data[i:j], j
            i = j


def read_netpbm(path: Union[str, os.PathLike]) -> np.ndarray:
    """Read a P2/P3/P5/P6 image as uint8 (H, W) or (H, W, 3)."""
    data = Path(path).read_bytes()
    tokens = _netpbm_tokens(data)
    try:
        magic, _ = next(tokens)
        width = int(next(tokens)[0])
        height = int(next(tokens)[0])
        maxval_tok, end = next(tokens)
        maxval = int(maxval_tok)
    except (StopIteration, ValueError):
        raise ValueError(f"{path}: truncated or malformed netpbm header") from None
    channels = {b"P2": 1, b"P5": 1, b"P3": 3, b"P6": 3}.get(magic)
    if channels is None:
        raise ValueError(f"{path}: unsupported netpbm type {magic!r}")
    count = width * height * channels
    if magic in (b"P5", b"P6"):
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=end + 1)
    else:
        raw = np.array([int(t) for t, _ in tokens][:count])
        if raw.size != count:
            raise ValueError(f"{path}: expected {count} samples, found {raw.size}")
    img = raw.astype(np.float64)
    if maxval != 255:
        img = img * (255.0 / maxval)
    img = np.rint(img).astype(np.uint8)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return img.reshape(shape)


def write_netpbm(path: Union[str, os.PathLike], image: np.ndarray) -> None:
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim == 2:
        magic = b"P5"
    elif image.ndim == 3 and image.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"cannot write image of shape {image.shape} as netpbm")
    h, w = image.shape[:2]
    header = magic + f"\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.tobytes())


def read_image(path: Union[str, os.PathLike]) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".npy":
        return np.load(path)
    return read_netpbm(path)


class DirectoryFrames:
    """Lazily loaded frames from a directory of netpbm or ``.npy`` files."""

    def __init__(self, directory: Union[str, os.PathLike]):
        self.directory = Path(directory)
        self.paths = sorted(
            p for p in self.directory.iterdir() if p.suffix.lower() in FRAME_SUFFIXES
        )

    def __len__(self) -> int:
        return len(self.paths)

    def __getitem__(self, index: int) -> np.ndarray:
        return read_image(self.paths[index])


# -- sequences ------------------------------------------------------------------


@dataclass
class Sequence:
    id: str
    dims: FrameDims
    ground_truth: list[BoundingBox]
    frames: SequenceT[np.ndarray] | None = None
    fps: float = DEFAULT_FPS

    def __post_init__(self) -> None:
        if self.frames is not None and len(self.frames) != len(self.ground_truth):
            raise ValueError(
                f"sequence {self.id}: {len(self.frames)} frames but "
                f"{len(self.ground_truth)} annotations"
            )

    def __len__(self) -> int:
        return len(self.ground_truth)


def _infer_dims(boxes: SequenceT[BoundingBox]) -> FrameDims:
    # Without frames the best available extent is the annotation hull.
    xs = [b.x + b.w for b in boxes if not b.is_degenerate]
    ys = [b.y + b.h for b in boxes if not b.is_degenerate]
    if not xs:
        raise AnnotationError("no valid boxes to infer frame size from")
    return FrameDims(max(1, math.ceil(max(xs))), max(1, math.ceil(max(ys))))


def load_sequence(
    annotation_path: Union[str, os.PathLike],
    frames_dir: Union[str, os.PathLike, None] = None,
    dims: FrameDims | None = None,
    seq_id: str | None = None,
) -> Sequence:
    annotation_path = Path(annotation_path)
    if not annotation_path.is_file():
        raise FileNotFoundError(f"annotation file not found: {annotation_path}")
    try:
        boxes = read_boxes(annotation_path)
    except AnnotationError as exc:
        raise AnnotationError(f"{annotation_path}: {exc}") from None
    frames = None
    if frames_dir is not None:
        frames = DirectoryFrames(frames_dir)
        if len(frames) != len(boxes):
            raise ValueError(
                f"{frames_dir}: {len(frames)} frames but {len(boxes)} annotations"
            )
        if len(frames) and dims is None:
            dims = FrameDims.of(frames[0])
    if dims is None:
        dims = _infer_dims(boxes)
    return Sequence(
        id=seq_id or annotation_path.parent.name,
        dims=dims,
        ground_truth=boxes,
        frames=frames,
    )


def _ground_truth_file(seq_dir: Path) -> Path | None:
    for name in GROUND_TRUTH_NAMES:
        if (seq_dir / name).is_file():
            return seq_dir / name
    return None


def _is_class_dir(path: Path) -> bool:
    return any(
        child.is_dir() and _ground_truth_file(child) is not None for child in path.iterdir()
    )


def _flat_id(class_name: str, leaf: str) -> str:
    # LaSOT leaves are already named "<class>-<n>"
    return leaf if leaf.startswith(f"{class_name}-") else f"{class_name}-{leaf}"


def _sequence_dirs(root: Path) -> dict[str, Path]:
    found: dict[str, Path] = {}
    for entry in sorted(root.iterdir()):
        if not entry.is_dir():
            continue
        if _ground_truth_file(entry) is None and _is_class_dir(entry):
            for leaf in sorted(entry.iterdir()):
                if leaf.is_dir() and _ground_truth_file(leaf) is not None:
                    found[_flat_id(entry.name, leaf.name)] = leaf
        else:
            found[entry.name] = entry
    return found


def list_dataset(root_dir: Union[str, os.PathLike]) -> list[str]:
    """Sequence ids under ``root_dir`` in lexicographic order.

    Flat OTB layouts yield directory names; LaSOT's ``class/sequence`` layout
    is flattened to ``class-sequence`` ids.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {root}")
    return sorted(_sequence_dirs(root))


def load_dataset_sequence(root_dir: Union[str, os.PathLike], seq_id: str) -> Sequence:
    root = Path(root_dir)
    dirs = _sequence_dirs(root)
    if seq_id not in dirs:
        raise KeyError(f"sequence {seq_id!r} not found under {root}")
    seq_dir = dirs[seq_id]
    gt = _ground_truth_file(seq_dir)
    if gt is None:
        raise FileNotFoundError(f"{seq_dir}: no ground-truth file ({', '.join(GROUND_TRUTH_NAMES)})")
    frames_dir = next(
        (seq_dir / n for n in FRAME_DIR_NAMES if (seq_dir / n).is_dir()), None
    )
    return load_sequence(gt, frames_dir, seq_id=seq_id)


# -- synthetic sequences -----------------------------------------------------------


@dataclass(frozen=True)
class ConstantVelocity:
    vx: float
    vy: float


@dataclass(frozen=True)
class Sinusoidal:
    """Horizontal oscillation about the start position."""

    amplitude: float
    period: float


@dataclass(frozen=True)
class RandomWalk:
    step_sigma: float


Motion = Union[ConstantVelocity, Sinusoidal, RandomWalk]


@dataclass(frozen=True)
class SyntheticSpec:
    dims: FrameDims
    n_frames: int
    motion: Motion
    start: tuple[float, float] = (0.0, 0.0)
    box_size: tuple[float, float] = (20.0, 20.0)
    target_color: tuple[int, int, int] = (220, 40, 40)
    background_color: tuple[int, int, int] = (30, 90, 30)
    rng_seed: int = 0
    id: str = "synthetic"


class SyntheticFrames:
    """Renders frames on demand: a solid rectangle over a flat background."""

    def __init__(self, spec: SyntheticSpec, boxes: list[BoundingBox]):
        self.spec = spec
        self.boxes = boxes

    def __len__(self) -> int:
        return len(self.boxes)

    def __getitem__(self, index: int) -> np.ndarray:
        dims = self.spec.dims
        img = np.empty((dims.height, dims.width, 3), dtype=np.uint8)
        img[:] = self.spec.background_color
        b = self.boxes[index]
        x0 = max(0, int(round(b.x)))
        y0 = max(0, int(round(b.y)))
        x1 = min(dims.width, int(round(b.x + b.w)))
        y1 = min(dims.height, int(round(b.y + b.h)))
        img[y0:y1, x0:x1] = self.spec.target_color
        return img


def generate_synthetic(spec: SyntheticSpec) -> Sequence:
    w, h = spec.box_size
    dims = spec.dims
    if w <= 0 or h <= 0:
        raise ValueError("synthetic target must have positive size")
    if w > dims.width or h > dims.height:
        raise ValueError(
            f"target {w}x{h} does not fit in a {dims.width}x{dims.height} frame"
        )
    if spec.n_frames < 1:
        raise ValueError("n_frames must be >= 1")

    max_x, max_y = dims.width - w, dims.height - h
    x, y = spec.start
    rng = np.random.default_rng(spec.rng_seed)
    boxes: list[BoundingBox] = []
    motion = spec.motion
    for t in range(spec.n_frames):
        if isinstance(motion, ConstantVelocity):
            px, py = x + motion.vx * t, y + motion.vy * t
        elif isinstance(motion, Sinusoidal):
            px = x + motion.amplitude * math.sin(2.0 * math.pi * t / motion.period)
            py = y
        elif isinstance(motion, RandomWalk):
            if t > 0:
                dx, dy = rng.normal(0.0, motion.step_sigma, size=2)
                x = min(max(x + dx, 0.0), max_x)
                y = min(max(y + dy, 0.0), max_y)
            px, py = x, y
        else:
            raise TypeError(f"unknown motion model {motion!r}")
        # clamp so the whole target stays in frame
        px = min(max(px, 0.0), max_x)
        py = min(max(py, 0.0), max_y)
        boxes.append(BoundingBox(float(px), float(py), float(w), float(h)))

    return Sequence(
        id=spec.id,
        dims=dims,
        ground_truth=boxes,
        frames=SyntheticFrames(spec, boxes),
    )


def write_sequence(seq: Sequence, root: Union[str, os.PathLike], with_frames: bool = True) -> Path:
    """Write ``seq`` in OTB layout: ``<root>/<id>/groundtruth.txt`` (+ ``img/``)."""
    seq_dir = Path(root) / seq.id
    seq_dir.mkdir(parents=True, exist_ok=True)
    write_boxes(seq_dir / "groundtruth.txt", seq.ground_truth)
    if with_frames and seq.frames is not None:
        img_dir = seq_dir / "img"
        img_dir.mkdir(exist_ok=True)
        width = max(4, len(str(len(seq))))
        for i in range(len(seq)):
            write_netpbm(img_dir / f"{i + 1:0{width}d}.ppm", seq.frames[i])
    return seq_dir
