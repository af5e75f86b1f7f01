"""CMOS image-sensor average power under ROI readout.

Average power at frame rate ``R`` with ``N`` pixels read out and sensor clock
``f`` is::

    P = alpha1 * R * T_exp * f + R * c2 * N / f

Running at the power-optimal clock ``f* = sqrt(c2 * N / (alpha1 * T_exp))``
makes both terms equal, so ``P = 2 * R * sqrt(alpha1 * T_exp * c2 * N)``.
ROI readout substitutes the per-frame effective pixel count for ``N`` and
re-optimizes the clock every frame.

Constants are used exactly as tabulated (``T_exp`` in milliseconds). The
result is reported in "model watts"; only ratios and orderings are meant to
be compared across configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Protocol, Sequence

from .geometry import ReadoutMode


@dataclass(frozen=True)
class SensorModel:
    name: str
    width: int
    height: int
    c2: float
    alpha1: float
    frame_rate: float = 30.0
    t_exp: float = 0.05

    def __post_init__(self) -> None:
        for attr in ("width", "height", "c2", "alpha1", "frame_rate", "t_exp"):
            if not getattr(self, attr) > 0:
                raise ValueError(f"sensor {self.name}: {attr} must be positive")

    @property
    def n_pixels(self) -> int:
        return self.width * self.height


SENSOR_PRESETS: dict[str, SensorModel] = {
    "B1": SensorModel("B1", 3264, 2448, c2=159.0, alpha1=4.0e-06),
    "B2": SensorModel("B2", 2592, 1944, c2=93.0, alpha1=8.2e-07),
    "B3": SensorModel("B3", 752, 480, c2=13.1, alpha1=3.35e-06),
}


def get_sensor(name: str, **overrides) -> SensorModel:
    try:
        sensor = SENSOR_PRESETS[name.upper()]
    except KeyError:
        raise KeyError(f"unknown sensor preset {name!r}; choose from {sorted(SENSOR_PRESETS)}") from None
    return replace(sensor, **overrides) if overrides else sensor


def optimal_clock(sensor: SensorModel, n_effective: float) -> float:
    if not n_effective > 0:
        raise ValueError("optimal clock is undefined for an empty readout")
    return math.sqrt(sensor.c2 * n_effective / (sensor.alpha1 * sensor.t_exp))


def power_terms(sensor: SensorModel, n_effective: float, f: float) -> tuple[float, float]:
    """The exposure and readout terms of the power equation at clock ``f``."""
    exposure = sensor.alpha1 * sensor.frame_rate * sensor.t_exp * f
    readout = sensor.frame_rate * sensor.c2 * n_effective / f
    return exposure, readout


def frame_power(sensor: SensorModel, n_effective: float) -> float:
    if n_effective < 0:
        raise ValueError("n_effective must be >= 0")
    if n_effective == 0:
        return 0.0
    exposure, readout = power_terms(sensor, n_effective, optimal_clock(sensor, n_effective))
    return exposure + readout


def frame_power_phases(
    p_idle: float, p_active: float, t_exp: float, t_active: float, t_frame: float
) -> float:
    """Duty-cycle average of idle (exposure) and active (readout) power."""
    if t_frame <= 0:
        raise ValueError("t_frame must be > 0")
    return (p_idle * t_exp + p_active * t_active) / t_frame


class _PixelRecord(Protocol):
    active_pixels: int
    total_pixels: int


@dataclass(frozen=True)
class PowerReport:
    sensor: str
    mean_power: float
    per_frame_power: tuple[float, ...]
    full_frame_power: float
    savings_ratio: float
    readout_mode: str = ReadoutMode.WINDOW.value

    def as_dict(self) -> dict:
        return {
            "sensor": self.sensor,
            "mean_power": self.mean_power,
            "full_frame_power": self.full_frame_power,
            "savings_ratio": self.savings_ratio,
            "readout_mode": self.readout_mode,
            "units": "model watts",
        }


def effective_pixels(sensor: SensorModel, active_pixels: int, total_pixels: int) -> float:
    """Map an ROI pixel count on the video frame onto the sensor array."""
    if total_pixels <= 0:
        raise ValueError("total_pixels must be > 0")
    if total_pixels == sensor.n_pixels:
        return float(active_pixels)
    return sensor.n_pixels * (active_pixels / total_pixels)


def sequence_power(
    sensor: SensorModel,
    records: Sequence[_PixelRecord],
    readout_mode: ReadoutMode | str = ReadoutMode.WINDOW,
) -> PowerReport:
    if not records:
        raise ValueError("no frame records to evaluate")
    full = frame_power(sensor, sensor.n_pixels)
    per_frame = tuple(
        frame_power(sensor, effective_pixels(sensor, r.active_pixels, r.total_pixels))
        for r in records
    )
    mean = math.fsum(per_frame) / len(per_frame)
    return PowerReport(
        sensor=sensor.name,
        mean_power=mean,
        per_frame_power=per_frame,
        full_frame_power=full,
        savings_ratio=1.0 - mean / full,
        readout_mode=ReadoutMode(readout_mode).value,
    )


@dataclass(frozen=True)
class TradeoffRow:
    label: str
    auc: float
    mean_power: float


def tradeoff_table(runs: Iterable[tuple[str, float, PowerReport | float]]) -> list[TradeoffRow]:
    """Rows sorted by AUC (best first); ties go to the lower-power run."""
    rows = []
    for label, auc_value, power in runs:
        mean_power = power.mean_power if isinstance(power, PowerReport) else float(power)
        rows.append(TradeoffRow(label, float(auc_value), mean_power))
    return sorted(rows, key=lambda r: (-r.auc, r.mean_power, r.label))
