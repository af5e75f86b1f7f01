"""Constant-velocity Kalman filter over bounding-box state.

State layout is ``[cx, cy, w, h, vcx, vcy, vw, vh]`` (pixels, pixels/frame).
The filter only ever sees boxes, so any detector that emits a box can drive
the update phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import BoundingBox

STATE_DIM = 8
MEAS_DIM = 4

DEFAULT_Q_DIAG = (1.0, 1.0, 1.0, 1.0, 0.25, 0.25, 0.25, 0.25)
DEFAULT_R_DIAG = (4.0, 4.0, 4.0, 4.0)
DEFAULT_P0_DIAG = (10.0, 10.0, 10.0, 10.0, 100.0, 100.0, 100.0, 100.0)

# Above this condition number the innovation covariance is treated as singular.
MAX_CONDITION = 1e12


class DegenerateNoiseError(ValueError):
    """Innovation covariance is numerically singular."""


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _check_psd(name: str, m: np.ndarray, strict: bool = False) -> None:
    if not np.allclose(m, m.T, atol=1e-9, rtol=0.0):
        raise ValueError(f"{name} must be symmetric")
    eig = np.linalg.eigvalsh(_symmetrize(m))
    tol = 1e-12 * max(1.0, float(np.abs(eig).max()))
    if strict and eig.min() <= 0:
        raise ValueError(f"{name} must be positive definite")
    if eig.min() < -tol:
        raise ValueError(f"{name} must be positive semidefinite")


@dataclass(frozen=True)
class KalmanParams:
    A: np.ndarray
    Q: np.ndarray
    H: np.ndarray
    R_meas: np.ndarray

    def __post_init__(self) -> None:
        shapes = {
            "A": (STATE_DIM, STATE_DIM),
            "Q": (STATE_DIM, STATE_DIM),
            "H": (MEAS_DIM, STATE_DIM),
            "R_meas": (MEAS_DIM, MEAS_DIM),
        }
        for name, shape in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            object.__setattr__(self, name, arr)
        _check_psd("Q", self.Q)
        _check_psd("R_meas", self.R_meas, strict=True)

    @classmethod
    def constant_velocity(
        cls,
        q_diag: Sequence[float] = DEFAULT_Q_DIAG,
        r_diag: Sequence[float] = DEFAULT_R_DIAG,
        dt: float = 1.0,
    ) -> KalmanParams:
        eye4 = np.eye(MEAS_DIM)
        A = np.block([[eye4, dt * eye4], [np.zeros((4, 4)), eye4]])
        H = np.hstack([eye4, np.zeros((4, 4))])
        return cls(A=A, Q=np.diag(np.asarray(q_diag, float)), H=H, R_meas=np.diag(np.asarray(r_diag, float)))


@dataclass
class KalmanState:
    x: np.ndarray
    P: np.ndarray


@dataclass(frozen=True)
class Innovation:
    y: np.ndarray
    S: np.ndarray
    K: np.ndarray


def box_to_measurement(box: BoundingBox) -> np.ndarray:
    cx, cy = box.center
    return np.array([cx, cy, box.w, box.h], dtype=float)


def init(
    first_box: BoundingBox,
    params: KalmanParams | None = None,
    p0_diag: Sequence[float] = DEFAULT_P0_DIAG,
) -> KalmanState:
    """Seed the filter from a ground-truth box with zero velocity."""
    if first_box.is_degenerate:
        raise ValueError(f"cannot seed Kalman filter from degenerate box {first_box}")
    p0 = np.asarray(p0_diag, dtype=float)
    if p0.shape != (STATE_DIM,):
        raise ValueError(f"p0_diag needs {STATE_DIM} entries")
    x = np.zeros(STATE_DIM)
    x[:4] = box_to_measurement(first_box)
    return KalmanState(x=x, P=np.diag(p0))


def predict(state: KalmanState, params: KalmanParams) -> KalmanState:
    x = params.A @ state.x
    P = params.A @ state.P @ params.A.T + params.Q
    return KalmanState(x=x, P=_symmetrize(P))


def update(
    state_pred: KalmanState, measurement: BoundingBox, params: KalmanParams
) -> tuple[KalmanState, Innovation]:
    z = box_to_measurement(measurement)
    H = params.H
    y = z - H @ state_pred.x
    S = _symmetrize(H @ state_pred.P @ H.T + params.R_meas)
    if not np.all(np.isfinite(S)) or np.linalg.cond(S) > MAX_CONDITION:
        raise DegenerateNoiseError("innovation covariance is numerically singular")
    # K = P H^T S^-1, computed as a linear solve: S K^T = H P (P, S symmetric)
    K = np.linalg.solve(S, H @ state_pred.P).T
    x = state_pred.x + K @ y
    P = (np.eye(STATE_DIM) - K @ H) @ state_pred.P
    return KalmanState(x=x, P=_symmetrize(P)), Innovation(y=y, S=S, K=K)


def state_to_box(state: KalmanState) -> BoundingBox:
    cx, cy, w, h = (float(v) for v in state.x[:4])
    return BoundingBox(cx - w / 2.0, cy - h / 2.0, max(w, 0.0), max(h, 0.0))


@dataclass
class KalmanRoiFilter:
    """Stateful wrapper used by the pipeline: one instance per sequence."""

    params: KalmanParams = field(default_factory=KalmanParams.constant_velocity)
    p0_diag: Sequence[float] = DEFAULT_P0_DIAG
    state: KalmanState | None = None
    last_innovation: Innovation | None = None

    def reset(self, box: BoundingBox) -> None:
        self.state = init(box, self.params, self.p0_diag)
        self.last_innovation = None

    def predict(self) -> BoundingBox:
        self.state = predict(self._require_state(), self.params)
        return state_to_box(self.state)

    def update(self, box: BoundingBox) -> BoundingBox:
        self.state, self.last_innovation = update(self._require_state(), box, self.params)
        return state_to_box(self.state)

    @property
    def box(self) -> BoundingBox:
        return state_to_box(self._require_state())

    def _require_state(self) -> KalmanState:
        if self.state is None:
            raise RuntimeError("filter used before reset()")
        return self.state
