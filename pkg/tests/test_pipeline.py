import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roisub.bench import SuiteConfig
from roisub.dataset_io import ConstantVelocity, SyntheticSpec, generate_synthetic
from roisub.detectors import Detection, MeanShiftDetector, OracleDetector, TraceDetector
from roisub.geometry import BoundingBox, FrameDims
from roisub.metrics import dataset_auc
from roisub.pipeline import (
    LATENCY_PRESETS,
    FrameSchedule,
    LatencyModel,
    Phase,
    PipelineError,
    PredictorMode,
    fps_estimate,
    mean_iou,
    run_sequence,
    scored_ious,
)

DIMS = FrameDims(320, 240)


def moving(n=60, vx=3.0, vy=1.0, seed=0):
    spec = SyntheticSpec(DIMS, n, ConstantVelocity(vx, vy), start=(20, 40), box_size=(30, 30), rng_seed=seed)
    return generate_synthetic(spec)


def static(n=60):
    return generate_synthetic(SyntheticSpec(DIMS, n, ConstantVelocity(0, 0), start=(100, 100), box_size=(30, 30)))


def run(seq, detector=None, mode="kalman", k=10, **kw):
    return run_sequence(None, seq.ground_truth, detector or OracleDetector(), mode, FrameSchedule(k), dims=seq.dims, **kw)


class TestSchedule:
    def test_k0_every_frame(self):
        assert FrameSchedule(0).keyframes(5) == [0, 1, 2, 3, 4]

    def test_k2(self):
        assert FrameSchedule(2).keyframes(7) == [0, 3, 6]

    def test_interval_mapping(self):
        assert FrameSchedule.from_interval(11).k == 10
        assert FrameSchedule.from_interval(1).k == 0
        assert FrameSchedule.from_interval(0).k == 0
        assert FrameSchedule(4).interval == 5

    @given(st.integers(0, 50), st.integers(1, 400))
    def test_keyframe_count(self, k, length):
        s = FrameSchedule(k)
        assert len(s.keyframes(length)) == s.n_keyframes(length) == math.ceil(length / (k + 1))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            FrameSchedule(-1)


class TestRunSequence:
    def test_k0_oracle_is_perfect(self):
        recs = run(moving(), k=0)
        assert all(r.phase is Phase.UPDATE for r in recs)
        assert all(v == 1.0 for v in scored_ious(recs))
        assert dataset_auc([scored_ious(recs)]) == pytest.approx(20 / 21, abs=1e-12)

    def test_phases_follow_schedule(self):
        recs = run(moving(n=7), k=2)
        assert [r.frame_index for r in recs if r.is_keyframe] == [0, 3, 6]

    def test_memo_static_is_perfect(self):
        recs = run(static(), mode="memo", k=9)
        assert all(v == 1.0 for v in scored_ious(recs))

    def test_keyframes_read_full_frame(self):
        recs = run(moving(), k=4)
        for r in recs:
            assert r.active_pixels <= r.total_pixels == DIMS.n_pixels
            if r.is_keyframe:
                assert r.active_pixels == DIMS.n_pixels

    def test_prediction_reads_roi_only(self):
        recs = run(static(), mode="memo", k=5)
        # 30x30 box on integer coordinates
        assert {r.active_pixels for r in recs if not r.is_keyframe} == {900}

    def test_mean_iou_decreases_with_k(self):
        suite = SuiteConfig(count=20, width=320, height=240, n_frames=120, box_size=(30, 30))
        seqs = [generate_synthetic(s) for s in suite.specs(seed=3)]
        means = [np.mean([mean_iou(run(s, k=k)) for s in seqs]) for k in (0, 1, 3, 7, 15, 31)]
        assert all(b <= a + 0.01 for a, b in zip(means, means[1:])), means

    def test_kalman_beats_memo_when_moving(self):
        seq = moving(n=90)
        kal = mean_iou(run(seq, mode="kalman", k=10))
        memo = mean_iou(run(seq, mode="memo", k=10))
        assert kal > memo

    def test_kalman_close_to_memo_when_static(self):
        seq = static(90)
        kal = mean_iou(run(seq, OracleDetector(1.0, rng_seed=2), mode="kalman", k=10))
        memo = mean_iou(run(seq, OracleDetector(1.0, rng_seed=2), mode="memo", k=10))
        assert abs(kal - memo) <= 0.05

    def test_chain_matches_kalman_at_k0(self):
        seq = moving()
        a = run(seq, OracleDetector(2.0, rng_seed=5), mode="chain", k=0)
        b = run(seq, OracleDetector(2.0, rng_seed=5), mode="kalman", k=0)
        assert scored_ious(a) == scored_ious(b)

    def test_chain_calls_detector_on_subsampled_frames(self):
        seq = moving(n=30, vx=2, vy=0)
        recs = run_sequence(seq.frames, seq.ground_truth, MeanShiftDetector(), "chain", FrameSchedule(4))
        pred = [r for r in recs if not r.is_keyframe]
        assert all(r.detection is not None for r in pred)
        assert mean_iou(recs) > 0.8

    def test_retry_after_failed_keyframe(self):
        seq = moving(n=12)
        boxes = list(seq.ground_truth)
        boxes[5] = BoundingBox.invalid()
        recs = run(seq, TraceDetector(boxes), k=4)
        assert recs[5].is_keyframe and not recs[5].detection.valid
        assert recs[6].is_keyframe and recs[6].retry
        assert not recs[7].is_keyframe
        assert recs[10].is_keyframe and not recs[10].retry

    def test_absent_target_not_scored(self):
        seq = moving(n=10)
        gt = list(seq.ground_truth)
        gt[4] = BoundingBox.invalid()
        recs = run_sequence(None, gt, OracleDetector(), "kalman", FrameSchedule(2), dims=DIMS)
        assert recs[4].iou_vs_gt is None
        assert len(scored_ious(recs)) == 9

    def test_frame_count_mismatch(self):
        seq = moving(n=5)
        with pytest.raises(PipelineError):
            run_sequence([np.zeros((240, 320, 3))] * 4, seq.ground_truth, OracleDetector(), dims=DIMS)

    def test_detector_error_names_frame(self):
        seq = moving(n=10)
        with pytest.raises(PipelineError, match="frame 3"):
            run(seq, TraceDetector(seq.ground_truth[:3]), k=0)

    def test_pixel_detector_needs_frames(self):
        seq = moving(n=5)
        with pytest.raises(PipelineError):
            run(seq, MeanShiftDetector())

    def test_mode_aliases(self):
        assert PredictorMode.parse("memoization") is PredictorMode.MEMOIZATION
        assert PredictorMode.parse("KALMAN") is PredictorMode.KALMAN
        with pytest.raises(ValueError):
            PredictorMode.parse("nope")


class _Stub:
    needs_frames = False

    def reset(self, frame, box):
        pass

    def detect(self, frame, frame_index, ground_truth=None, prior=None):
        return Detection(ground_truth)


class TestFps:
    def test_uniform_one_ms(self):
        lat = LatencyModel(capture=0.25, preprocess=0.25, detect=0.25, postprocess=0.25, kf_predict=1.0)
        recs = run(moving(n=20), _Stub(), k=3, latency=lat)
        algo, _ = fps_estimate(recs, lat)
        assert algo == pytest.approx(1000.0)

    def test_zero_latency_raises(self):
        recs = run(moving(n=5), k=0)
        with pytest.raises(ValueError):
            fps_estimate(recs, LatencyModel())

    def test_eco_preset(self):
        lat = LATENCY_PRESETS["eco_kf"]
        recs = run(moving(n=100), k=9, latency=lat)
        algo, system = fps_estimate(recs, lat)
        # per 10 frames: one 511 ms keyframe + nine 1 ms predictions; system adds 9 captures
        assert algo == pytest.approx(10_000 / 520)
        assert system == pytest.approx(10_000 / 745)

    def test_yolo_preset(self):
        lat = LATENCY_PRESETS["yolo_kf"]
        recs = run(moving(n=100), k=9, latency=lat)
        algo, system = fps_estimate(recs, lat)
        assert algo == pytest.approx(65.4, abs=0.1)
        assert system == pytest.approx(24.6, abs=0.1)

    def test_more_keyframing_is_faster(self):
        lat = LATENCY_PRESETS["eco_kf"]
        seq = moving(n=120)
        fps = [fps_estimate(run(seq, k=k, latency=lat), lat)[0] for k in (0, 4, 9, 19)]
        assert fps == sorted(fps)
