import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roisub.dataset_io import (
    AnnotationError,
    ConstantVelocity,
    RandomWalk,
    Sequence,
    Sinusoidal,
    SyntheticSpec,
    format_box,
    generate_synthetic,
    list_dataset,
    load_dataset_sequence,
    load_sequence,
    parse_box_line,
    parse_boxes,
    read_boxes,
    read_netpbm,
    write_boxes,
    write_netpbm,
    write_sequence,
)
from roisub.geometry import BoundingBox, FrameDims


class TestBoxGrammar:
    def test_comma(self):
        assert parse_box_line("1,2,3,4") == BoundingBox(1, 2, 3, 4)

    def test_tabs_and_spaces(self):
        assert parse_box_line("1.5\t2  3\t4\n") == BoundingBox(1.5, 2, 3, 4)

    def test_nan_is_absent(self):
        assert parse_box_line("NaN,NaN,NaN,NaN").is_degenerate

    def test_all_zero_is_absent(self):
        assert parse_box_line("0,0,0,0").is_degenerate

    def test_blank_lines_skipped(self):
        assert len(parse_boxes("1,2,3,4\n\n5,6,7,8\n")) == 2

    @pytest.mark.parametrize("bad", ["1,2,3", "1,2,3,x", "1,2,-3,4", "1,2,inf,4"])
    def test_errors_name_the_line(self, bad):
        with pytest.raises(AnnotationError, match="line 1"):
            parse_boxes(bad)

    def test_error_on_later_line(self):
        with pytest.raises(AnnotationError, match="line 3"):
            parse_boxes("1,2,3,4\n1,2,3,4\n1,2\n")

    def test_format(self):
        assert format_box(BoundingBox(1, 2, 3, 4)) == "1,2,3,4"
        assert format_box(BoundingBox(1.25, 2, 3, 4)) == "1.25,2,3,4"
        assert format_box(BoundingBox.invalid()) == "NaN,NaN,NaN,NaN"

    @given(
        st.lists(
            st.builds(
                BoundingBox,
                st.floats(-1e4, 1e4),
                st.floats(-1e4, 1e4),
                st.floats(0, 1e4),
                st.floats(0, 1e4),
            ),
            min_size=1,
            max_size=20,
        )
    )
    def test_round_trip(self, boxes):
        text = "\n".join(format_box(b) for b in boxes)
        assert parse_boxes(text) == boxes

    def test_file_round_trip_with_absent(self, tmp_path):
        boxes = [BoundingBox(1, 2, 3, 4), BoundingBox.invalid(), BoundingBox(0.1, 0.2, 5, 6)]
        write_boxes(tmp_path / "gt.txt", boxes)
        back = read_boxes(tmp_path / "gt.txt")
        assert back[0] == boxes[0] and back[2] == boxes[2]
        assert back[1].is_degenerate


class TestNetpbm:
    @pytest.mark.parametrize("shape", [(5, 7), (5, 7, 3)])
    def test_round_trip(self, tmp_path, shape):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, size=shape, dtype=np.uint8)
        path = tmp_path / ("x.pgm" if len(shape) == 2 else "x.ppm")
        write_netpbm(path, img)
        np.testing.assert_array_equal(read_netpbm(path), img)

    def test_ascii_with_comment(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P2\n# hand made\n3 2\n255\n0 1 2\n3 4 5\n")
        np.testing.assert_array_equal(read_netpbm(path), [[0, 1, 2], [3, 4, 5]])


class TestSynthetic:
    def test_constant_velocity_positions(self):
        spec = SyntheticSpec(FrameDims(100, 100), 5, ConstantVelocity(2, 0), start=(0, 10), box_size=(10, 10))
        seq = generate_synthetic(spec)
        assert [b.x for b in seq.ground_truth] == [0, 2, 4, 6, 8]
        assert all(b.y == 10 for b in seq.ground_truth)

    def test_frames_draw_target(self):
        spec = SyntheticSpec(FrameDims(30, 20), 2, ConstantVelocity(1, 0), start=(5, 5), box_size=(4, 3))
        seq = generate_synthetic(spec)
        img = seq.frames[1]
        assert img.shape == (20, 30, 3)
        target = np.all(img == spec.target_color, axis=2)
        assert target.sum() == 12
        assert target[5:8, 6:10].all()

    def test_deterministic(self):
        spec = SyntheticSpec(FrameDims(64, 48), 50, RandomWalk(3.0), start=(20, 20), rng_seed=9)
        assert generate_synthetic(spec).ground_truth == generate_synthetic(spec).ground_truth

    @given(st.integers(0, 2**31 - 1))
    def test_random_walk_stays_in_frame(self, seed):
        dims = FrameDims(64, 48)
        spec = SyntheticSpec(dims, 1000, RandomWalk(5.0), start=(20, 20), box_size=(16, 12), rng_seed=seed)
        for b in generate_synthetic(spec).ground_truth:
            assert 0 <= b.x and b.x + b.w <= dims.width
            assert 0 <= b.y and b.y + b.h <= dims.height

    def test_sinusoid(self):
        spec = SyntheticSpec(FrameDims(200, 50), 5, Sinusoidal(10, 4), start=(50, 5))
        xs = [b.x for b in generate_synthetic(spec).ground_truth]
        np.testing.assert_allclose(xs, [50, 60, 50, 40, 50], atol=1e-9)

    def test_target_too_big(self):
        with pytest.raises(ValueError):
            generate_synthetic(SyntheticSpec(FrameDims(10, 10), 3, ConstantVelocity(0, 0), box_size=(20, 5)))


class TestDatasetLayout:
    def _seq(self, root, name, n=3):
        d = root / name
        d.mkdir(parents=True)
        write_boxes(d / "groundtruth.txt", [BoundingBox(1, 1, 4, 4)] * n)
        return d

    def test_empty(self, tmp_path):
        assert list_dataset(tmp_path) == []

    def test_missing_root(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            list_dataset(tmp_path / "nope")

    def test_flat_sorted(self, tmp_path):
        self._seq(tmp_path, "b")
        self._seq(tmp_path, "a")
        (tmp_path / "notes.txt").write_text("x")
        assert list_dataset(tmp_path) == ["a", "b"]

    def test_class_nested(self, tmp_path):
        self._seq(tmp_path / "airplane", "airplane-1")
        self._seq(tmp_path / "airplane", "airplane-2")
        self._seq(tmp_path / "bird", "3")
        assert list_dataset(tmp_path) == ["airplane-1", "airplane-2", "bird-3"]
        assert len(load_dataset_sequence(tmp_path, "bird-3")) == 3

    def test_unknown_id(self, tmp_path):
        self._seq(tmp_path, "a")
        with pytest.raises(KeyError):
            load_dataset_sequence(tmp_path, "zzz")

    def test_written_sequence_loads_back(self, tmp_path):
        spec = SyntheticSpec(FrameDims(32, 24), 4, ConstantVelocity(1.5, 0.5), start=(2, 3), box_size=(8, 6), id="s0")
        seq = generate_synthetic(spec)
        write_sequence(seq, tmp_path)
        back = load_dataset_sequence(tmp_path, "s0")
        assert back.dims == FrameDims(32, 24)
        assert back.ground_truth == seq.ground_truth
        np.testing.assert_array_equal(back.frames[2], seq.frames[2])

    def test_frame_count_mismatch(self, tmp_path):
        d = self._seq(tmp_path, "a", n=3)
        (d / "img").mkdir()
        for i in range(2):
            write_netpbm(d / "img" / f"{i:04d}.pgm", np.zeros((8, 8), dtype=np.uint8))
        with pytest.raises(ValueError, match="2 frames but 3"):
            load_dataset_sequence(tmp_path, "a")

    def test_dims_inferred_without_frames(self, tmp_path):
        d = self._seq(tmp_path, "a")
        seq = load_sequence(d / "groundtruth.txt")
        assert seq.dims == FrameDims(5, 5)
        assert seq.frames is None


def test_sequence_length_check():
    with pytest.raises(ValueError):
        Sequence("x", FrameDims(4, 4), [BoundingBox(0, 0, 1, 1)] * 2, frames=[np.zeros((4, 4))])


def test_format_is_lossless_for_floats():
    b = BoundingBox(math.pi, 1 / 3, 2.5e-7, 1e6)
    assert parse_box_line(format_box(b)) == b
